#include "adaudit/clusterlab/hdbscan.hpp"

#include <cmath>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

namespace adaudit::clusterlab {

namespace {

// Cap for 1/distance when points coincide; keeps stabilities finite.
constexpr double kMaxLambda = 1e12;

double lambda_of(double distance) { return distance > 0.0 ? std::min(1.0 / distance, kMaxLambda) : kMaxLambda; }

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void attach(std::size_t child_root, std::size_t new_root) { parent_[child_root] = new_root; }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::string_view to_string(SelectionMethod method) noexcept {
  return method == SelectionMethod::eom ? "eom" : "leaf";
}

std::optional<SelectionMethod> parse_selection_method(std::string_view text) {
  if (text == "eom") return SelectionMethod::eom;
  if (text == "leaf") return SelectionMethod::leaf;
  return std::nullopt;
}

void validate(const ClusterParams& params) {
  require(params.min_cluster_size >= 2, fmt::format("min_cluster_size must be >= 2, got {}", params.min_cluster_size));
  require(params.min_samples >= 1, fmt::format("min_samples must be >= 1, got {}", params.min_samples));
  require(params.min_samples <= params.min_cluster_size,
          fmt::format("min_samples ({}) exceeds min_cluster_size ({})", params.min_samples, params.min_cluster_size));
}

std::vector<LinkageRow> single_linkage(const std::vector<MstEdge>& sorted_edges, Eigen::Index n) {
  std::vector<LinkageRow> rows;
  rows.reserve(sorted_edges.size());
  UnionFind uf(static_cast<std::size_t>(2 * n));
  std::vector<Eigen::Index> size(static_cast<std::size_t>(2 * n), 1);
  Eigen::Index next = n;
  for (const auto& e : sorted_edges) {
    const auto ra = static_cast<Eigen::Index>(uf.find(static_cast<std::size_t>(e.a)));
    const auto rb = static_cast<Eigen::Index>(uf.find(static_cast<std::size_t>(e.b)));
    const Eigen::Index merged = size[static_cast<std::size_t>(ra)] + size[static_cast<std::size_t>(rb)];
    rows.push_back({ra, rb, e.weight, merged});
    size[static_cast<std::size_t>(next)] = merged;
    uf.attach(static_cast<std::size_t>(ra), static_cast<std::size_t>(next));
    uf.attach(static_cast<std::size_t>(rb), static_cast<std::size_t>(next));
    ++next;
  }
  return rows;
}

CondensedTree condense_tree(const std::vector<LinkageRow>& hierarchy, Eigen::Index n, int min_cluster_size) {
  CondensedTree tree;
  tree.n_points = n;
  if (hierarchy.empty()) return tree;

  const auto node_size = [&](Eigen::Index node) -> Eigen::Index {
    return node < n ? 1 : hierarchy[static_cast<std::size_t>(node - n)].size;
  };
  // Every point below `node`, collected depth-first.
  const auto leaves_under = [&](Eigen::Index node) {
    std::vector<Eigen::Index> out;
    std::vector<Eigen::Index> stack{node};
    while (!stack.empty()) {
      const Eigen::Index cur = stack.back();
      stack.pop_back();
      if (cur < n) {
        out.push_back(cur);
      } else {
        const auto& row = hierarchy[static_cast<std::size_t>(cur - n)];
        stack.push_back(row.right);
        stack.push_back(row.left);
      }
    }
    return out;
  };

  const Eigen::Index top = n + static_cast<Eigen::Index>(hierarchy.size()) - 1;
  std::unordered_map<Eigen::Index, Eigen::Index> relabel{{top, n}};
  Eigen::Index next_label = n + 1;

  std::deque<Eigen::Index> queue{top};
  while (!queue.empty()) {
    const Eigen::Index node = queue.front();
    queue.pop_front();
    const auto& row = hierarchy[static_cast<std::size_t>(node - n)];
    const double lambda = lambda_of(row.distance);
    const Eigen::Index parent = relabel.at(node);
    const Eigen::Index lsize = node_size(row.left);
    const Eigen::Index rsize = node_size(row.right);
    const bool lbig = lsize >= min_cluster_size;
    const bool rbig = rsize >= min_cluster_size;

    const auto shed = [&](Eigen::Index side) {
      for (Eigen::Index p : leaves_under(side)) tree.rows.push_back({parent, p, lambda, 1});
    };
    const auto continue_as = [&](Eigen::Index side, Eigen::Index label) {
      if (side < n) {
        tree.rows.push_back({parent, side, lambda, 1});
        return;
      }
      relabel[side] = label;
      queue.push_back(side);
    };

    if (lbig && rbig) {
      for (Eigen::Index side : {row.left, row.right}) {
        const Eigen::Index label = next_label++;
        tree.rows.push_back({parent, label, lambda, node_size(side)});
        relabel[side] = label;
        queue.push_back(side);
      }
    } else if (!lbig && !rbig) {
      shed(row.left);
      shed(row.right);
    } else if (!lbig) {
      shed(row.left);
      continue_as(row.right, parent);
    } else {
      shed(row.right);
      continue_as(row.left, parent);
    }
  }
  return tree;
}

namespace {

struct ClusterIndex {
  std::map<Eigen::Index, double> stability;                       // every cluster id, root included
  std::map<Eigen::Index, std::vector<Eigen::Index>> children;     // cluster -> child clusters
};

ClusterIndex index_clusters(const CondensedTree& tree) {
  ClusterIndex idx;
  std::map<Eigen::Index, double> birth{{tree.root(), 0.0}};
  idx.stability[tree.root()] = 0.0;
  for (const auto& r : tree.rows) {
    if (r.child_size > 1) {
      birth[r.child] = r.lambda;
      idx.stability.emplace(r.child, 0.0);
      idx.children[r.parent].push_back(r.child);
    }
  }
  for (const auto& r : tree.rows) {
    idx.stability[r.parent] += (r.lambda - birth.at(r.parent)) * static_cast<double>(r.child_size);
  }
  return idx;
}

}  // namespace

std::vector<Eigen::Index> select_clusters(const CondensedTree& tree, SelectionMethod method) {
  auto idx = index_clusters(tree);
  std::vector<Eigen::Index> selected;
  if (idx.stability.size() <= 1) return selected;

  if (method == SelectionMethod::leaf) {
    for (const auto& [id, _] : idx.stability)
      if (id != tree.root() && !idx.children.contains(id)) selected.push_back(id);
    return selected;
  }

  std::map<Eigen::Index, bool> is_cluster;
  for (const auto& [id, _] : idx.stability)
    if (id != tree.root()) is_cluster[id] = true;
  // Children always carry larger ids than their parent, so descending order is bottom-up.
  for (auto it = is_cluster.rbegin(); it != is_cluster.rend(); ++it) {
    const Eigen::Index node = it->first;
    double subtree = 0.0;
    if (auto c = idx.children.find(node); c != idx.children.end())
      for (Eigen::Index child : c->second) subtree += idx.stability.at(child);
    if (subtree > idx.stability.at(node)) {
      it->second = false;
      idx.stability[node] = subtree;
    } else {
      std::vector<Eigen::Index> stack;
      if (auto c = idx.children.find(node); c != idx.children.end()) stack = c->second;
      while (!stack.empty()) {
        const Eigen::Index sub = stack.back();
        stack.pop_back();
        is_cluster[sub] = false;
        if (auto c = idx.children.find(sub); c != idx.children.end())
          stack.insert(stack.end(), c->second.begin(), c->second.end());
      }
    }
  }
  for (const auto& [id, keep] : is_cluster)
    if (keep) selected.push_back(id);
  return selected;
}

std::vector<int> label_points(const CondensedTree& tree, const std::vector<Eigen::Index>& selected) {
  std::vector<int> labels(static_cast<std::size_t>(tree.n_points), -1);
  std::unordered_map<Eigen::Index, int> label_of;
  for (std::size_t i = 0; i < selected.size(); ++i) label_of[selected[i]] = static_cast<int>(i);

  std::unordered_map<Eigen::Index, Eigen::Index> cluster_parent;
  for (const auto& r : tree.rows)
    if (r.child_size > 1 || r.child >= tree.n_points) cluster_parent[r.child] = r.parent;

  for (const auto& r : tree.rows) {
    if (r.child >= tree.n_points) continue;
    Eigen::Index c = r.parent;
    while (true) {
      if (auto hit = label_of.find(c); hit != label_of.end()) {
        labels[static_cast<std::size_t>(r.child)] = hit->second;
        break;
      }
      if (c == tree.root()) break;
      c = cluster_parent.at(c);
    }
  }
  return labels;
}

}  // namespace adaudit::clusterlab
