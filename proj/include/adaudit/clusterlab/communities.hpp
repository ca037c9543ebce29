#pragma once

// Louvain modularity maximisation on small dense weighted graphs (one node per
// cluster centroid, so a few hundred nodes at most).

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "adaudit/common/error.hpp"

namespace adaudit::clusterlab {

/// Q = 1/2m * sum_ij (A_ij - k_i k_j / 2m) [c_i == c_j]; 0 for an edgeless graph.
inline double modularity(const Eigen::MatrixXd& adj, const std::vector<int>& community) {
  require(adj.rows() == adj.cols(), "modularity: adjacency must be square");
  require(static_cast<std::size_t>(adj.rows()) == community.size(), "modularity: partition size mismatch");
  const double m2 = adj.sum();
  if (m2 <= 0.0) return 0.0;
  const Eigen::VectorXd k = adj.rowwise().sum();
  double q = 0.0;
  for (Eigen::Index i = 0; i < adj.rows(); ++i)
    for (Eigen::Index j = 0; j < adj.cols(); ++j)
      if (community[static_cast<std::size_t>(i)] == community[static_cast<std::size_t>(j)])
        q += adj(i, j) - k(i) * k(j) / m2;
  return q / m2;
}

namespace detail {

/// One local-moving pass set. Returns true if any node changed community.
inline bool louvain_local_moves(const Eigen::MatrixXd& adj, std::vector<int>& comm, std::mt19937_64& rng) {
  const Eigen::Index n = adj.rows();
  const double m2 = adj.sum();
  const Eigen::VectorXd k = adj.rowwise().sum();
  Eigen::VectorXd tot = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) tot(comm[static_cast<std::size_t>(i)]) += k(i);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  bool moved_any = false;
  Eigen::VectorXd link(n);
  for (bool improved = true; improved;) {
    improved = false;
    for (Eigen::Index i : order) {
      const int own = comm[static_cast<std::size_t>(i)];
      link.setZero();
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i && adj(i, j) > 0.0) link(comm[static_cast<std::size_t>(j)]) += adj(i, j);
      tot(own) -= k(i);

      int best = own;
      double best_gain = link(own) - tot(own) * k(i) / m2;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i || adj(i, j) <= 0.0) continue;
        const int c = comm[static_cast<std::size_t>(j)];
        const double gain = link(c) - tot(c) * k(i) / m2;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best = c;
        }
      }
      tot(best) += k(i);
      if (best != own) {
        comm[static_cast<std::size_t>(i)] = best;
        improved = moved_any = true;
      }
    }
  }
  return moved_any;
}

/// Renumber to 0..k-1 by first appearance.
inline int compact(std::vector<int>& comm) {
  std::map<int, int> remap;
  for (int& c : comm) {
    auto [it, fresh] = remap.emplace(c, static_cast<int>(remap.size()));
    c = it->second;
  }
  return static_cast<int>(remap.size());
}

}  // namespace detail

/// Community id per node, numbered by first appearance. Nodes without edges
/// stay in singleton communities.
inline std::vector<int> louvain(const Eigen::MatrixXd& adj, std::uint64_t seed) {
  require(adj.rows() == adj.cols(), "louvain: adjacency must be square");
  const Eigen::Index n = adj.rows();
  std::vector<int> node_comm(static_cast<std::size_t>(n));
  std::iota(node_comm.begin(), node_comm.end(), 0);
  if (n == 0 || adj.sum() <= 0.0) return node_comm;

  std::mt19937_64 rng(seed);
  Eigen::MatrixXd level = adj;
  while (true) {
    std::vector<int> comm(static_cast<std::size_t>(level.rows()));
    std::iota(comm.begin(), comm.end(), 0);
    const bool moved = detail::louvain_local_moves(level, comm, rng);
    const int k = detail::compact(comm);
    for (int& c : node_comm) c = comm[static_cast<std::size_t>(c)];
    if (!moved || k == level.rows()) break;

    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(level.rows(), k);
    for (Eigen::Index i = 0; i < level.rows(); ++i) s(i, comm[static_cast<std::size_t>(i)]) = 1.0;
    level = s.transpose() * level * s;
  }
  detail::compact(node_comm);
  return node_comm;
}

/// Edge weight = cosine similarity of cluster centroids when it is >= `similarity_floor`
/// and positive. Returns cluster label -> community id.
template <typename Derived>
std::map<int, int> cluster_communities(const Eigen::MatrixBase<Derived>& points, const std::vector<int>& labels,
                                       double similarity_floor, std::uint64_t seed) {
  require(static_cast<std::size_t>(points.rows()) == labels.size(), "cluster_communities: labels do not match rows");
  std::map<int, std::pair<Eigen::VectorXd, int>> sums;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    if (l < 0) continue;
    auto [it, fresh] = sums.try_emplace(l, Eigen::VectorXd::Zero(points.cols()), 0);
    it->second.first += points.row(i).transpose().template cast<double>();
    ++it->second.second;
  }
  require(!sums.empty(), "cluster_communities: run has no clusters");

  std::vector<int> ids;
  Eigen::MatrixXd centroids(static_cast<Eigen::Index>(sums.size()), points.cols());
  for (const auto& [label, acc] : sums) {
    const Eigen::Index r = static_cast<Eigen::Index>(ids.size());
    centroids.row(r) = (acc.first / acc.second).transpose();
    const double norm = centroids.row(r).norm();
    if (norm > 0.0) centroids.row(r) /= norm;
    ids.push_back(label);
  }
  Eigen::MatrixXd adj = centroids * centroids.transpose();
  adj.diagonal().setZero();
  adj = adj.unaryExpr([&](double s) { return (s >= similarity_floor && s > 0.0) ? s : 0.0; });

  const auto comm = louvain(adj, seed);
  std::map<int, int> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]] = comm[i];
  return out;
}

}  // namespace adaudit::clusterlab
