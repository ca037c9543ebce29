#pragma once

#include <algorithm>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "adaudit/clusterlab/embedding.hpp"
#include "adaudit/common/error.hpp"

namespace adaudit::clusterlab {

struct ReductionOptions {
  int neighborhood = 15;  // minimum number of points the reducer accepts
  int oversample = 10;
  int power_iterations = 2;
};

/// Seeded randomized PCA (range finder + power iterations + thin SVD).
/// Output columns are ordered by explained variance; each column's sign is
/// fixed so that its largest-magnitude entry is positive.
template <typename Scalar>
EmbeddingMatrix<Scalar> reduce_dimensions(const EmbeddingMatrix<Scalar>& m, int target_dim, std::uint64_t seed,
                                          const ReductionOptions& options = {}) {
  using Mat = Eigen::MatrixXd;
  require(target_dim >= 1 && target_dim < m.dim(), "target_dim must be in [1, dim)");
  if (m.rows() < options.neighborhood)
    fail(Errc::too_few_points, std::to_string(m.rows()) + " points, reducer needs " + std::to_string(options.neighborhood));

  const Eigen::Index n = m.rows();
  const Eigen::Index d = m.dim();
  Mat x = m.vectors.template cast<double>();
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;

  const Eigen::Index width = std::min<Eigen::Index>(target_dim + options.oversample, std::min(n, d));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat omega(d, width);
  for (Eigen::Index j = 0; j < width; ++j)
    for (Eigen::Index i = 0; i < d; ++i) omega(i, j) = normal(rng);

  auto orthonormal = [&](const Mat& y) -> Mat {
    Eigen::HouseholderQR<Mat> qr(y);
    return qr.householderQ() * Mat::Identity(y.rows(), y.cols());
  };
  Mat q = orthonormal(x * omega);
  for (int it = 0; it < options.power_iterations; ++it) {
    q = orthonormal(x.transpose() * q);
    q = orthonormal(x * q);
  }
  const Mat b = q.transpose() * x;  // width x d
  Eigen::JacobiSVD<Mat> svd(b, Eigen::ComputeThinV);
  const Mat& v = svd.matrixV();     // d x width

  Mat components = Mat::Zero(d, target_dim);
  const Eigen::Index usable = std::min<Eigen::Index>(target_dim, v.cols());
  components.leftCols(usable) = v.leftCols(usable);
  Mat z = x * components;
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    Eigen::Index arg = 0;
    z.col(j).cwiseAbs().maxCoeff(&arg);
    if (z(arg, j) < 0.0) z.col(j) *= -1.0;
  }

  EmbeddingMatrix<Scalar> out;
  out.ids = m.ids;
  out.vectors = z.cast<Scalar>();
  return out;
}

}  // namespace adaudit::clusterlab
