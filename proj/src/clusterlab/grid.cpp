#include "adaudit/clusterlab/grid.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "adaudit/clusterlab/dbcv.hpp"
#include "adaudit/clusterlab/distance.hpp"

namespace adaudit::clusterlab {

namespace {

ClusterRun finish_run(const RowMatrix<double>& dist, int dim, const ClusterParams& params, double dbcv_floor) {
  ClusterRun run;
  run.params = params;
  run.labels = hdbscan(dist, params);
  std::set<int> distinct;
  for (int l : run.labels) {
    if (l < 0)
      ++run.n_noise;
    else
      distinct.insert(l);
  }
  run.n_clusters = static_cast<int>(distinct.size());
  run.dbcv = dbcv_score(dist, run.labels, dim);
  run.survived = run.dbcv >= dbcv_floor;
  return run;
}

}  // namespace

std::size_t GridResult::surviving() const {
  return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const ClusterRun& r) { return r.survived; }));
}

std::vector<ClusterParams> make_grid(const GridBounds& bounds) {
  std::vector<ClusterParams> grid;
  for (int mcs = bounds.min_cluster_size_lo; mcs <= bounds.min_cluster_size_hi; ++mcs)
    for (int ms = bounds.min_samples_lo; ms <= std::min(bounds.min_samples_hi, mcs); ++ms)
      for (Metric metric : bounds.metrics)
        for (SelectionMethod method : bounds.methods) grid.push_back({mcs, ms, metric, method});
  return grid;
}

ClusterRun run_clustering(const RowMatrix<double>& points, const ClusterParams& params, double dbcv_floor) {
  validate(params);
  return finish_run(pairwise_distances(points, params.metric), static_cast<int>(points.cols()), params, dbcv_floor);
}

GridResult grid_search_clusters(const RowMatrix<double>& points, const std::vector<ClusterParams>& grid,
                                double dbcv_floor, unsigned workers) {
  require(!grid.empty(), "grid_search_clusters: empty grid");

  std::map<Metric, RowMatrix<double>> dist;
  for (const auto& p : grid)
    if (!dist.contains(p.metric)) dist.emplace(p.metric, pairwise_distances(points, p.metric));
  const int dim = static_cast<int>(points.cols());

  std::vector<std::optional<ClusterRun>> runs(grid.size());
  std::vector<std::optional<RunFailure>> failures(grid.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        validate(grid[i]);
        runs[i] = finish_run(dist.at(grid[i].metric), dim, grid[i], dbcv_floor);
      } catch (const Error& e) {
        failures[i] = RunFailure{grid[i], e.code(), e.what()};
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, grid.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  GridResult result;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (runs[i]) result.runs.push_back(std::move(*runs[i]));
    if (failures[i]) result.failures.push_back(std::move(*failures[i]));
  }
  std::sort(result.runs.begin(), result.runs.end(),
            [](const ClusterRun& a, const ClusterRun& b) { return a.params < b.params; });
  std::sort(result.failures.begin(), result.failures.end(),
            [](const RunFailure& a, const RunFailure& b) { return a.params < b.params; });
  return result;
}

}  // namespace adaudit::clusterlab
