#pragma once

// Density-Based Clustering Validation.
//
// For a point x in cluster C (|C| = n_C) in a D-dimensional space the
// all-points core distance is
//
//   a(x) = ( sum_{y in C, y != x} (1 / d(x,y))^D / (n_C - 1) )^(-1/D)
//
// and mutual reachability is max(a(x), a(y), d(x,y)). Each cluster gets an
// MST under mutual reachability; its internal vertices are those of degree
// > 1. Density sparseness DSC is the heaviest edge joining two internal
// vertices, density separation DSPC(Ci, Cj) is the smallest mutual
// reachability between internal vertices of the two clusters, and
//
//   V(Ci) = (min_j DSPC(Ci,Cj) - DSC(Ci)) / max(min_j DSPC(Ci,Cj), DSC(Ci))
//   DBCV  = sum_i |Ci| / N * V(Ci)        (N counts noise points too)

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "adaudit/clusterlab/distance.hpp"
#include "adaudit/common/error.hpp"

namespace adaudit::clusterlab {

namespace detail {

// (sum (1/d)^D / k)^(-1/D) rewritten around the smallest distance m as
// m * (sum (m/d)^D / k)^(-1/D), which neither overflows nor underflows for
// large D. Coincident points (d == 0) are skipped.
inline double all_points_core(const std::vector<double>& dists, double dim) {
  double m = std::numeric_limits<double>::infinity();
  for (double d : dists)
    if (d > 0.0) m = std::min(m, d);
  if (!std::isfinite(m)) return 0.0;
  double s = 0.0;
  for (double d : dists)
    if (d > 0.0) s += std::pow(m / d, dim);
  return m * std::pow(s / static_cast<double>(dists.size()), -1.0 / dim);
}

}  // namespace detail

struct DbcvDetail {
  double score = 0.0;
  std::map<int, double> validity;    // per cluster label
  std::map<int, double> sparseness;  // DSC
  std::map<int, double> separation;  // min over other clusters of DSPC
};

/// `dist` is the full n x n distance matrix, `dim` the dimensionality of the
/// space it came from, `labels[i]` the cluster of row i (-1 = noise).
template <typename Derived>
DbcvDetail dbcv_detail(const Eigen::MatrixBase<Derived>& dist, const std::vector<int>& labels, int dim) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  require(dist.rows() == n && dist.cols() == n, "dbcv: distance matrix does not match labels");
  require(dim >= 1, "dbcv: dimension must be >= 1");

  std::map<int, std::vector<Eigen::Index>> members;
  for (Eigen::Index i = 0; i < n; ++i)
    if (labels[static_cast<std::size_t>(i)] >= 0) members[labels[static_cast<std::size_t>(i)]].push_back(i);
  if (members.size() < 2)
    fail(Errc::undefined_for_single_cluster, fmt::format("dbcv needs >= 2 clusters, got {}", members.size()));
  for (const auto& [label, pts] : members)
    require(pts.size() >= 2, fmt::format("dbcv: cluster {} has a single member", label));

  Eigen::VectorXd core = Eigen::VectorXd::Zero(n);
  std::vector<double> scratch;
  for (const auto& [label, pts] : members) {
    for (Eigen::Index x : pts) {
      scratch.clear();
      for (Eigen::Index y : pts)
        if (y != x) scratch.push_back(static_cast<double>(dist(x, y)));
      core(x) = detail::all_points_core(scratch, static_cast<double>(dim));
    }
  }
  const auto mreach = [&](Eigen::Index a, Eigen::Index b) {
    return std::max({core(a), core(b), static_cast<double>(dist(a, b))});
  };

  DbcvDetail out;
  std::map<int, std::vector<Eigen::Index>> internal;
  for (const auto& [label, pts] : members) {
    const std::size_t k = pts.size();
    // Prim over the cluster's complete mutual-reachability graph.
    std::vector<bool> in(k, false);
    std::vector<double> best(k, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> from(k, 0);
    std::vector<int> degree(k, 0);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<double> weights;
    std::size_t cur = 0;
    in[0] = true;
    for (std::size_t step = 1; step < k; ++step) {
      std::size_t next = k;
      for (std::size_t j = 0; j < k; ++j) {
        if (in[j]) continue;
        const double w = mreach(pts[cur], pts[j]);
        if (w < best[j]) {
          best[j] = w;
          from[j] = cur;
        }
        if (next == k || best[j] < best[next]) next = j;
      }
      in[next] = true;
      edges.emplace_back(from[next], next);
      weights.push_back(best[next]);
      ++degree[from[next]];
      ++degree[next];
      cur = next;
    }

    std::vector<bool> is_internal(k, false);
    bool any_internal = false;
    for (std::size_t v = 0; v < k; ++v)
      if (degree[v] > 1) is_internal[v] = any_internal = true;
    if (!any_internal) std::fill(is_internal.begin(), is_internal.end(), true);

    double dsc = -std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (is_internal[edges[e].first] && is_internal[edges[e].second]) dsc = std::max(dsc, weights[e]);
    if (!std::isfinite(dsc))
      for (double w : weights) dsc = std::max(dsc, w);
    out.sparseness[label] = dsc;

    for (std::size_t v = 0; v < k; ++v)
      if (is_internal[v]) internal[label].push_back(pts[v]);
  }

  for (const auto& [li, vi] : internal) {
    double sep = std::numeric_limits<double>::infinity();
    for (const auto& [lj, vj] : internal) {
      if (li == lj) continue;
      for (Eigen::Index a : vi)
        for (Eigen::Index b : vj) sep = std::min(sep, mreach(a, b));
    }
    out.separation[li] = sep;
  }

  for (const auto& [label, pts] : members) {
    const double dsc = out.sparseness[label];
    const double dspc = out.separation[label];
    const double denom = std::max(dspc, dsc);
    const double v = denom > 0.0 ? (dspc - dsc) / denom : 0.0;
    out.validity[label] = v;
    out.score += static_cast<double>(pts.size()) / static_cast<double>(n) * v;
  }
  return out;
}

template <typename Derived>
double dbcv_score(const Eigen::MatrixBase<Derived>& dist, const std::vector<int>& labels, int dim) {
  return dbcv_detail(dist, labels, dim).score;
}

/// Convenience overload computing distances from row vectors.
template <typename Derived>
double dbcv_score_points(const Eigen::MatrixBase<Derived>& points, const std::vector<int>& labels,
                         Metric metric = Metric::euclidean) {
  const auto dist = pairwise_distances(points, metric);
  return dbcv_score(dist, labels, static_cast<int>(points.cols()));
}

}  // namespace adaudit::clusterlab
