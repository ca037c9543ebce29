#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "adaudit/clusterlab/embedding.hpp"

namespace adaudit::clusterlab {

/// `cosine` is realised as euclidean distance between L2-normalised rows.
enum class Metric { euclidean, manhattan, cosine };

std::string_view to_string(Metric metric) noexcept;
std::optional<Metric> parse_metric(std::string_view text);

/// Dense symmetric n x n distance matrix.
template <typename Derived>
RowMatrix<typename Derived::Scalar> pairwise_distances(const Eigen::MatrixBase<Derived>& points, Metric metric) {
  using Scalar = typename Derived::Scalar;
  RowMatrix<Scalar> x = points;
  if (metric == Metric::cosine) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Scalar norm = x.row(i).norm();
      if (norm > Scalar(0)) x.row(i) /= norm;
    }
  }
  const Eigen::Index n = x.rows();
  RowMatrix<Scalar> d = RowMatrix<Scalar>::Zero(n, n);
  if (metric == Metric::manhattan) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (x.row(i) - x.row(j)).cwiseAbs().sum();
    return d;
  }
  // ||a-b||^2 = |a|^2 + |b|^2 - 2ab, then exact recomputation where cancellation bites.
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sq = x.rowwise().squaredNorm();
  const RowMatrix<Scalar> gram = x * x.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Scalar v = sq(i) + sq(j) - Scalar(2) * gram(i, j);
      if (v < Scalar(1e-6) * (sq(i) + sq(j))) v = (x.row(i) - x.row(j)).squaredNorm();
      d(i, j) = d(j, i) = std::sqrt(std::max(v, Scalar(0)));
    }
  }
  return d;
}

}  // namespace adaudit::clusterlab
