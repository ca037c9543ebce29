#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adaudit/clusterlab/embedding.hpp"
#include "adaudit/clusterlab/hdbscan.hpp"

namespace adaudit::clusterlab {

inline constexpr double kDefaultDbcvFloor = 0.1;

struct ClusterRun {
  ClusterParams params;
  std::vector<int> labels;  // aligned with the matrix rows, -1 = noise
  int n_clusters = 0;
  int n_noise = 0;
  double dbcv = 0.0;
  bool survived = false;  // dbcv >= floor
};

struct RunFailure {
  ClusterParams params;
  Errc code = Errc::precondition;
  std::string message;
};

struct GridResult {
  std::vector<ClusterRun> runs;  // sorted by params
  std::vector<RunFailure> failures;
  std::size_t surviving() const;
};

struct GridBounds {
  int min_cluster_size_lo = 2;
  int min_cluster_size_hi = 15;
  int min_samples_lo = 1;
  int min_samples_hi = 10;
  std::vector<Metric> metrics{Metric::euclidean, Metric::manhattan};
  std::vector<SelectionMethod> methods{SelectionMethod::eom, SelectionMethod::leaf};
};

/// Every combination inside `bounds` with min_samples <= min_cluster_size.
std::vector<ClusterParams> make_grid(const GridBounds& bounds = {});

/// Runs every grid point on `points` with `workers` threads (0 = hardware
/// concurrency). A point whose DBCV is undefined (fewer than two clusters) is
/// recorded as a failure, not a run.
GridResult grid_search_clusters(const RowMatrix<double>& points, const std::vector<ClusterParams>& grid,
                                double dbcv_floor = kDefaultDbcvFloor, unsigned workers = 0);

/// Single clustering with DBCV evaluated under the same metric.
ClusterRun run_clustering(const RowMatrix<double>& points, const ClusterParams& params, double dbcv_floor);

}  // namespace adaudit::clusterlab
