#pragma once

// Hierarchical density-based clustering over a precomputed distance matrix:
// core distances -> mutual-reachability MST -> single-linkage hierarchy ->
// condensed tree -> excess-of-mass or leaf cluster extraction.

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "adaudit/clusterlab/distance.hpp"
#include "adaudit/common/error.hpp"

namespace adaudit::clusterlab {

enum class SelectionMethod { eom, leaf };

std::string_view to_string(SelectionMethod method) noexcept;
std::optional<SelectionMethod> parse_selection_method(std::string_view text);

struct ClusterParams {
  int min_cluster_size = 5;  // >= 2
  int min_samples = 5;       // >= 1, <= min_cluster_size
  Metric metric = Metric::euclidean;
  SelectionMethod cluster_selection_method = SelectionMethod::eom;

  auto operator<=>(const ClusterParams&) const = default;
};

void validate(const ClusterParams& params);

struct MstEdge {
  Eigen::Index a = 0;
  Eigen::Index b = 0;
  double weight = 0.0;
};

/// Distance to the `k`-th nearest other point (k clamped to n-1).
template <typename Derived>
Eigen::VectorXd core_distances(const Eigen::MatrixBase<Derived>& dist, int k) {
  const Eigen::Index n = dist.rows();
  Eigen::VectorXd core = Eigen::VectorXd::Zero(n);
  if (n < 2) return core;
  const Eigen::Index kk = std::clamp<Eigen::Index>(k, 1, n - 1);
  std::vector<double> row;
  for (Eigen::Index i = 0; i < n; ++i) {
    row.clear();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) row.push_back(static_cast<double>(dist(i, j)));
    std::nth_element(row.begin(), row.begin() + (kk - 1), row.end());
    core(i) = row[static_cast<std::size_t>(kk - 1)];
  }
  return core;
}

/// Prim's algorithm on the dense graph weighted by max(core_i, core_j, d_ij).
/// Returned edges are sorted by weight (stable on discovery order).
template <typename Derived>
std::vector<MstEdge> mutual_reachability_mst(const Eigen::MatrixBase<Derived>& dist, const Eigen::VectorXd& core) {
  const Eigen::Index n = dist.rows();
  std::vector<MstEdge> edges;
  if (n < 2) return edges;
  std::vector<bool> in_tree(static_cast<std::size_t>(n), false);
  std::vector<double> best(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n), 0);
  Eigen::Index current = 0;
  in_tree[0] = true;
  edges.reserve(static_cast<std::size_t>(n - 1));
  for (Eigen::Index step = 1; step < n; ++step) {
    Eigen::Index next = -1;
    double next_w = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (in_tree[static_cast<std::size_t>(j)]) continue;
      const double w = std::max({core(current), core(j), static_cast<double>(dist(current, j))});
      auto& bj = best[static_cast<std::size_t>(j)];
      if (w < bj) {
        bj = w;
        parent[static_cast<std::size_t>(j)] = current;
      }
      if (bj < next_w || next < 0) {
        next_w = bj;
        next = j;
      }
    }
    in_tree[static_cast<std::size_t>(next)] = true;
    edges.push_back({parent[static_cast<std::size_t>(next)], next, next_w});
    current = next;
  }
  std::stable_sort(edges.begin(), edges.end(), [](const MstEdge& l, const MstEdge& r) { return l.weight < r.weight; });
  return edges;
}

/// Row i merges `left` and `right` into node n+i.
struct LinkageRow {
  Eigen::Index left = 0;
  Eigen::Index right = 0;
  double distance = 0.0;
  Eigen::Index size = 0;
};

std::vector<LinkageRow> single_linkage(const std::vector<MstEdge>& sorted_edges, Eigen::Index n);

struct CondensedRow {
  Eigen::Index parent = 0;  // cluster id (>= n)
  Eigen::Index child = 0;   // point (< n) or cluster id
  double lambda = 0.0;
  Eigen::Index child_size = 0;
};

struct CondensedTree {
  Eigen::Index n_points = 0;
  std::vector<CondensedRow> rows;
  Eigen::Index root() const { return n_points; }
};

CondensedTree condense_tree(const std::vector<LinkageRow>& hierarchy, Eigen::Index n, int min_cluster_size);

/// Selected cluster ids (ascending). The root is never selected.
std::vector<Eigen::Index> select_clusters(const CondensedTree& tree, SelectionMethod method);

/// -1 for noise; selected clusters numbered 0..k-1 in ascending cluster-id order.
std::vector<int> label_points(const CondensedTree& tree, const std::vector<Eigen::Index>& selected);

/// Full pipeline from a dense distance matrix computed with `params.metric`.
template <typename Derived>
std::vector<int> hdbscan(const Eigen::MatrixBase<Derived>& dist, const ClusterParams& params) {
  validate(params);
  const Eigen::Index n = dist.rows();
  if (n < 2) return std::vector<int>(static_cast<std::size_t>(n), -1);
  const auto core = core_distances(dist, params.min_samples);
  const auto mst = mutual_reachability_mst(dist, core);
  const auto tree = condense_tree(single_linkage(mst, n), n, params.min_cluster_size);
  return label_points(tree, select_clusters(tree, params.cluster_selection_method));
}

}  // namespace adaudit::clusterlab
