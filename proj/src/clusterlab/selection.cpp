#include "adaudit/clusterlab/selection.hpp"

#include <algorithm>
#include <map>
#include <random>

#include <fmt/format.h>

namespace adaudit::clusterlab {

bool better_run(const ClusterRun& a, const ClusterRun& b) {
  if (a.n_clusters != b.n_clusters) return a.n_clusters > b.n_clusters;
  if (a.n_noise != b.n_noise) return a.n_noise < b.n_noise;
  if (a.dbcv != b.dbcv) return a.dbcv > b.dbcv;
  return a.params < b.params;
}

namespace {

const ClusterRun* best_of(const std::vector<ClusterRun>& runs, bool above, double floor) {
  const ClusterRun* best = nullptr;
  for (const auto& r : runs) {
    if ((r.dbcv >= floor) != above) continue;
    if (best == nullptr || better_run(r, *best)) best = &r;
  }
  return best;
}

}  // namespace

const ClusterRun& select_best_run(const std::vector<ClusterRun>& runs, double dbcv_floor) {
  const ClusterRun* best = best_of(runs, true, dbcv_floor);
  if (best == nullptr)
    fail(Errc::no_surviving_runs, fmt::format("no run out of {} reaches dbcv {}", runs.size(), dbcv_floor));
  return *best;
}

std::vector<BlindItem> blind_validation_sample(const std::vector<ClusterRun>& runs, const std::vector<std::string>& ids,
                                               Stratum stratum, std::size_t n, std::uint64_t seed, double dbcv_floor) {
  const ClusterRun* run = best_of(runs, stratum == Stratum::above_floor, dbcv_floor);
  if (run == nullptr)
    fail(Errc::no_surviving_runs,
         fmt::format("no run {} dbcv {}", stratum == Stratum::above_floor ? "at or above" : "below", dbcv_floor));
  require(run->labels.size() == ids.size(), "blind_validation_sample: ids do not match run labels");
  if (n < static_cast<std::size_t>(run->n_clusters))
    fail(Errc::sample_too_small,
         fmt::format("cannot cover {} clusters with a sample of {}", run->n_clusters, n));

  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (run->labels[i] >= 0) members[run->labels[i]].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> picked;
  std::vector<std::size_t> rest;
  for (auto& [label, idx] : members) {
    std::uniform_int_distribution<std::size_t> pick(0, idx.size() - 1);
    const std::size_t chosen = pick(rng);
    picked.push_back(idx[chosen]);
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (k != chosen) rest.push_back(idx[k]);
  }
  std::shuffle(rest.begin(), rest.end(), rng);
  const std::size_t fill = std::min(rest.size(), n - picked.size());
  picked.insert(picked.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(fill));
  std::shuffle(picked.begin(), picked.end(), rng);

  std::vector<BlindItem> out;
  out.reserve(picked.size());
  for (std::size_t i : picked) out.push_back({ids[i], run->labels[i]});
  return out;
}

}  // namespace adaudit::clusterlab
