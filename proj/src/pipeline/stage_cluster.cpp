#include <algorithm>
#include <map>

#include "adaudit/clusterlab/communities.hpp"
#include "adaudit/clusterlab/embedding.hpp"
#include "adaudit/clusterlab/grid.hpp"
#include "adaudit/clusterlab/reduce.hpp"
#include "adaudit/clusterlab/selection.hpp"
#include "adaudit/clusterlab/template_pattern.hpp"
#include "adaudit/common/csv.hpp"
#include "adaudit/common/error.hpp"
#include "stage_io.hpp"

namespace adaudit::pipeline::detail {

namespace fs = std::filesystem;
using nlohmann::json;
namespace cl = clusterlab;

namespace {

std::vector<std::string> param_cells(const cl::ClusterParams& p) {
  return {std::to_string(p.min_cluster_size), std::to_string(p.min_samples), std::string(cl::to_string(p.metric)),
          std::string(cl::to_string(p.cluster_selection_method))};
}

json params_json(const cl::ClusterParams& p) {
  return json{{"min_cluster_size", p.min_cluster_size},
              {"min_samples", p.min_samples},
              {"metric", cl::to_string(p.metric)},
              {"cluster_selection_method", cl::to_string(p.cluster_selection_method)}};
}

json error_json(const Error& e) { return json{{"status", "error"}, {"error", adaudit::to_string(e.code())}, {"message", e.what()}}; }

json blind_json(const std::vector<cl::ClusterRun>& runs, const std::vector<std::string>& ids, cl::Stratum stratum,
                const AuditConfig& cfg) {
  try {
    const auto items = cl::blind_validation_sample(runs, ids, stratum, cfg.blind_sample_size, cfg.blind_seed, cfg.dbcv_floor);
    // Same choice of run as the sampler makes.
    const cl::ClusterRun* best = nullptr;
    for (const auto& r : runs) {
      if ((r.dbcv >= cfg.dbcv_floor) != (stratum == cl::Stratum::above_floor)) continue;
      if (!best || cl::better_run(r, *best)) best = &r;
    }
    json j{{"status", "ok"}, {"params", params_json(best->params)}, {"n_clusters", best->n_clusters}, {"dbcv", best->dbcv}};
    j["items"] = json::array();
    for (const auto& it : items) j["items"].push_back({{"tweet_id", it.tweet_id}, {"hidden_label", it.hidden_label}});
    return j;
  } catch (const Error& e) {
    return error_json(e);
  }
}

}  // namespace

void run_cluster(const StageContext& ctx) {
  const auto& cfg = ctx.config;
  std::set<std::string> target;
  {
    const auto t = read_csv(ctx.upstream(Stage::calibrate, "adult.csv"));
    const auto id = t.column("tweet_id"), v = t.column("violating"), st = t.column("status");
    for (const auto& row : t.rows)
      if (row[v] == "1" && row[st] == "retained") target.insert(row[id]);
  }
  std::vector<corpus::TweetRecord> records;
  for (auto& r : read_jsonl(ctx.upstream(Stage::ingest, "ads.jsonl")))
    if (target.count(r.tweet_id)) records.push_back(std::move(r));

  cl::TemplateMatches templates;
  if (cfg.lexicon) templates = cl::detect_template_pattern(records, cl::Lexicon::load(*cfg.lexicon));
  {
    CsvWriter csv(ctx.out / "template.csv");
    csv.row({"tweet_id", "username", "text_match", "camelcase_username"});
    for (const auto& r : records) {
      const bool text = templates.text_matches.count(r.tweet_id) > 0;
      const bool name = templates.camelcase_usernames.count(r.tweet_id) > 0;
      if (text || name) csv.row({r.tweet_id, r.username, yes_no(text), yes_no(name)});
    }
  }

  json summary{{"points", records.size()},
               {"template_text_matches", templates.text_matches.size()},
               {"camelcase_usernames", templates.camelcase_usernames.size()}};

  cl::HttpEmbeddingClient client(make_service(cfg, cfg.embedding_service, "embed"), cfg.embedding_model);
  const auto embedded = cl::embed_texts(records, client);

  cl::EmbeddingMatrixd reduced;
  try {
    reduced = cl::reduce_dimensions(embedded, cfg.reduce_dim, cfg.reduction_seed);
  } catch (const Error& e) {
    if (e.code() != Errc::too_few_points) throw;
    summary.update(error_json(e));
    write_json(ctx.out / "cluster.json", summary);
    return;
  }

  const auto grid = cl::make_grid(cfg.cluster_grid);
  const auto result = cl::grid_search_clusters(reduced.vectors, grid, cfg.dbcv_floor, cfg.cluster_workers);
  {
    CsvWriter csv(ctx.out / "runs.csv");
    csv.row({"min_cluster_size", "min_samples", "metric", "method", "n_clusters", "n_noise", "dbcv", "survived"});
    for (const auto& r : result.runs) {
      auto cells = param_cells(r.params);
      cells.insert(cells.end(), {std::to_string(r.n_clusters), std::to_string(r.n_noise), fmt_real(r.dbcv), yes_no(r.survived)});
      csv.row(cells);
    }
  }
  {
    CsvWriter csv(ctx.out / "failures.csv");
    csv.row({"min_cluster_size", "min_samples", "metric", "method", "error", "message"});
    for (const auto& f : result.failures) {
      auto cells = param_cells(f.params);
      cells.insert(cells.end(), {std::string(adaudit::to_string(f.code)), f.message});
      csv.row(cells);
    }
  }
  summary["grid_points"] = grid.size();
  summary["runs"] = result.runs.size();
  summary["failed_runs"] = result.failures.size();
  summary["surviving_runs"] = result.surviving();

  write_json(ctx.out / "blind_above.json", blind_json(result.runs, reduced.ids, cl::Stratum::above_floor, cfg));
  write_json(ctx.out / "blind_below.json", blind_json(result.runs, reduced.ids, cl::Stratum::below_floor, cfg));

  try {
    const auto& best = cl::select_best_run(result.runs, cfg.dbcv_floor);
    const auto communities = cl::cluster_communities(reduced.vectors, best.labels, cfg.similarity_floor, cfg.community_seed);
    const auto projection = cl::reduce_dimensions(reduced, 2, cfg.reduction_seed);
    CsvWriter labels(ctx.out / "labels.csv");
    labels.row({"tweet_id", "cluster", "community"});
    CsvWriter proj(ctx.out / "projection.csv");
    proj.row({"tweet_id", "x", "y", "cluster"});
    for (std::size_t i = 0; i < reduced.ids.size(); ++i) {
      const int l = best.labels[i];
      const auto row = static_cast<Eigen::Index>(i);
      labels.row({reduced.ids[i], std::to_string(l), l < 0 ? "" : std::to_string(communities.at(l))});
      proj.row({reduced.ids[i], fmt_real(projection.vectors(row, 0)), fmt_real(projection.vectors(row, 1)), std::to_string(l)});
    }
    int n_communities = 0;
    for (const auto& [label, c] : communities) n_communities = std::max(n_communities, c + 1);
    summary["status"] = "ok";
    summary["best"] = params_json(best.params);
    summary["n_clusters"] = best.n_clusters;
    summary["n_noise"] = best.n_noise;
    summary["dbcv"] = best.dbcv;
    summary["n_communities"] = n_communities;
  } catch (const Error& e) {
    if (e.code() != Errc::no_surviving_runs) throw;
    summary.update(error_json(e));
  }
  write_json(ctx.out / "cluster.json", summary);
}

}  // namespace adaudit::pipeline::detail
