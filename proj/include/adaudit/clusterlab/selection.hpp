#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adaudit/clusterlab/grid.hpp"

namespace adaudit::clusterlab {

/// Strict weak ordering used for run selection: more clusters, then less
/// noise, then higher DBCV, then smaller params.
bool better_run(const ClusterRun& a, const ClusterRun& b);

/// Best run among those with dbcv >= floor. Throws no_surviving_runs.
const ClusterRun& select_best_run(const std::vector<ClusterRun>& runs, double dbcv_floor = kDefaultDbcvFloor);

enum class Stratum { above_floor, below_floor };

struct BlindItem {
  std::string tweet_id;
  int hidden_label = -1;
};

/// Picks the best run of the stratum and samples n of its non-noise points so
/// that every cluster appears at least once. Throws sample_too_small when n is
/// below the run's cluster count and no_surviving_runs when the stratum is empty.
std::vector<BlindItem> blind_validation_sample(const std::vector<ClusterRun>& runs, const std::vector<std::string>& ids,
                                               Stratum stratum, std::size_t n, std::uint64_t seed,
                                               double dbcv_floor = kDefaultDbcvFloor);

}  // namespace adaudit::clusterlab
