// annotate-export and report.

#include <algorithm>
#include <random>

#include "adaudit/annotate/session.hpp"
#include "adaudit/common/csv.hpp"
#include "adaudit/common/error.hpp"
#include "adaudit/common/url.hpp"
#include "adaudit/report/charts.hpp"
#include "adaudit/report/series.hpp"
#include "adaudit/report/summary.hpp"
#include "adaudit/urlaudit/redirects.hpp"
#include "stage_io.hpp"

namespace adaudit::pipeline::detail {

namespace fs = std::filesystem;
using nlohmann::json;
namespace an = annotate;

namespace {

std::map<std::string, corpus::TweetRecord> ads_by_id(const StageContext& ctx) {
  std::map<std::string, corpus::TweetRecord> out;
  for (auto& r : read_jsonl(ctx.upstream(Stage::ingest, "ads.jsonl"))) out.emplace(r.tweet_id, std::move(r));
  return out;
}

std::string cluster_choice(int label) { return "cluster_" + std::to_string(label); }

/// Creates the session or records why it was skipped.
json create(an::SessionStore& store, const std::string& name, an::SessionSpec spec) {
  json entry{{"name", name}, {"kind", an::to_string(spec.kind)}, {"items", spec.items.size()}};
  if (spec.items.empty()) {
    entry["skipped"] = "no items";
    return entry;
  }
  entry["session_id"] = store.create_session(spec);
  return entry;
}

}  // namespace

void run_annotate_export(const StageContext& ctx) {
  const auto& cfg = ctx.config;
  const auto ads = ads_by_id(ctx);
  const auto item_for = [&](const std::string& id) { return an::SessionItem{id, ads.at(id).text, std::nullopt}; };
  an::SessionStore store(ctx.out / "sessions");
  json sessions = json::array();

  an::SessionSpec adult{an::TaskKind::adult_binary, {}, cfg.annotators, cfg.annotation_seed, {}};
  for (const auto& row : read_csv(ctx.upstream(Stage::calibrate, "calibration_sample.csv")).rows)
    adult.items.push_back(item_for(row[0]));
  sessions.push_back(create(store, "adult_binary", adult));

  // Flagged ads are reviewed for false positives; a seeded shuffle picks which.
  std::vector<std::string> flagged;
  {
    const auto t = read_csv(ctx.upstream(Stage::calibrate, "adult.csv"));
    const auto id = t.column("tweet_id"), f = t.column("flagged");
    for (const auto& row : t.rows)
      if (row[f] == "1") flagged.push_back(row[id]);
  }
  std::mt19937_64 rng(cfg.annotation_seed);
  std::shuffle(flagged.begin(), flagged.end(), rng);
  if (flagged.size() > cfg.adult_sample) flagged.resize(cfg.adult_sample);
  std::sort(flagged.begin(), flagged.end());
  an::SessionSpec fp{an::TaskKind::fp_review, {}, cfg.annotators, cfg.annotation_seed, {}};
  for (const auto& id : flagged) fp.items.push_back(item_for(id));
  sessions.push_back(create(store, "fp_review", fp));

  for (const char* stratum : {"above", "below"}) {
    const std::string name = std::string("cluster_blind_") + stratum;
    const auto blind = read_json(ctx.upstream(Stage::cluster, std::string("blind_") + stratum + ".json"));
    if (blind.value("status", "") != "ok") {
      sessions.push_back(json{{"name", name}, {"kind", "cluster_blind"}, {"skipped", blind.value("error", "no clustering")}});
      continue;
    }
    an::SessionSpec spec{an::TaskKind::cluster_blind, {}, cfg.annotators, cfg.annotation_seed, {}};
    for (int k = 0; k < blind.at("n_clusters").get<int>(); ++k) spec.choice_set.push_back(cluster_choice(k));
    for (const auto& it : blind.at("items")) {
      auto item = item_for(it.at("tweet_id"));
      item.hidden_label = cluster_choice(it.at("hidden_label").get<int>());
      spec.items.push_back(std::move(item));
    }
    sessions.push_back(create(store, name, spec));
  }

  // Landing pages of problematic ads; annotators see where the ad led.
  std::map<std::string, std::string> landing_of;
  for (const auto& row : read_csv(ctx.upstream(Stage::urls, "url_chains.csv")).rows) landing_of[row[0]] = row[1];
  an::SessionSpec landing{an::TaskKind::landing_category, {}, cfg.annotators, cfg.annotation_seed, {}};
  {
    const auto t = read_csv(ctx.upstream(Stage::urls, "verdicts.csv"));
    const auto id = t.column("tweet_id"), p = t.column("problematic");
    for (const auto& row : t.rows) {
      if (row[p] != "1") continue;
      std::string shown;
      for (const auto& url : urlaudit::extract_embedded_urls(ads.at(row[id]))) {
        const auto it = landing_of.find(canonicalize_url(url));
        shown += (shown.empty() ? "" : "\n") + (it == landing_of.end() ? url : it->second);
      }
      landing.items.push_back({row[id], shown, std::nullopt});
    }
  }
  sessions.push_back(create(store, "landing_category", landing));

  write_json(ctx.out / "sessions.json", json{{"annotators", cfg.annotators}, {"sessions", sessions}});
}

namespace {

std::vector<double> day_offsets(const std::vector<std::string>& dates) {
  std::vector<double> out;
  if (dates.empty()) return out;
  const Date first = *parse_date(dates.front());
  for (const auto& d : dates) out.push_back(static_cast<double>((*parse_date(d) - first).count()));
  return out;
}

void copy_if_present(const fs::path& from, const fs::path& to) {
  if (fs::exists(from)) fs::copy_file(from, to, fs::copy_options::overwrite_existing);
}

}  // namespace

void run_report(const StageContext& ctx) {
  const auto& out = ctx.out;
  const auto counts_json = read_json(ctx.upstream(Stage::calibrate, "counts.json"));
  report::ComplianceCounts counts;
  counts.total_ads = counts_json.at("total_ads");
  counts.rehydrated_ads = counts_json.at("rehydrated_ads");
  counts.removed_diff = counts_json.at("removed_diff");
  counts.late_removed = counts_json.at("late_removed");
  counts.flagged_total = counts_json.at("flagged_total");
  counts.fp_total = counts_json.at("fp_total");
  counts.flagged_retained = counts_json.at("flagged_retained");
  counts.fp_retained = counts_json.at("fp_retained");
  counts.violating_moderated = counts_json.at("violating_moderated");
  const auto summary = report::compliance_summary(counts);

  json doc{{"compliance", report::to_json(summary)},
           {"explicit_threshold", counts_json.at("threshold")},
           {"unscored_ads", counts_json.at("unscored")},
           {"ingest", read_json(ctx.upstream(Stage::ingest, "stats.json"))},
           {"rehydrate", read_json(ctx.upstream(Stage::rehydrate, "stats.json"))},
           {"calibration", read_json(ctx.upstream(Stage::calibrate, "calibration.json"))},
           {"cluster", read_json(ctx.upstream(Stage::cluster, "cluster.json"))},
           {"urls", read_json(ctx.upstream(Stage::urls, "urls.json"))}};
  write_json(out / "summary.json", doc);

  const auto scores = read_scores(ctx.upstream(Stage::score, "scores.csv"));
  const auto cdf = report::score_cdf(scores, 0.05);
  {
    CsvWriter csv(out / "score_cdf.csv");
    csv.row({"score", "at_or_below", "total", "cumulative_fraction"});
    report::LineSeries s{"ads", {}, {}};
    for (const auto& p : cdf) {
      csv.row({fmt_real(p.score), std::to_string(p.at_or_below), std::to_string(p.total), fmt_real(p.cumulative_fraction)});
      s.x.push_back(p.score);
      s.y.push_back(p.cumulative_fraction);
    }
    report::write_text_file(out / "score_cdf.svg",
                            report::line_chart_svg({s}, {"Explicitness score CDF", "score", "fraction of ads"}));
  }

  std::vector<corpus::TweetRecord> ads = read_jsonl(ctx.upstream(Stage::ingest, "ads.jsonl"));
  {
    const auto rows = report::weekday_trend(ads);
    CsvWriter csv(out / "weekday_trend.csv");
    csv.row({"weekday", "days", "ads", "advertisers", "mean_ads", "mean_distinct_advertisers"});
    std::vector<std::string> names;
    std::vector<double> means;
    for (const auto& r : rows) {
      csv.row({r.weekday, std::to_string(r.days), std::to_string(r.ads), std::to_string(r.advertisers),
               fmt_real(r.mean_ads), fmt_real(r.mean_distinct_advertisers)});
      names.push_back(r.weekday);
      means.push_back(r.mean_ads);
    }
    report::write_text_file(out / "weekday_trend.svg",
                            report::bar_chart_svg(names, means, {"Ads per weekday", "weekday", "mean ads per day"}));
  }
  {
    const auto rows = report::language_distribution(ads);
    CsvWriter csv(out / "language_distribution.csv");
    csv.row({"lang", "count", "total", "fraction"});
    std::vector<std::string> names;
    std::vector<double> values;
    for (const auto& r : rows) {
      csv.row({r.lang, std::to_string(r.count), std::to_string(r.total), fmt_real(r.fraction)});
      if (names.size() < 10) {
        names.push_back(r.lang);
        values.push_back(r.fraction);
      }
    }
    report::write_text_file(out / "language_distribution.svg",
                            report::bar_chart_svg(names, values, {"Ad languages (top 10)", "language", "fraction of ads"}));
  }

  {
    const auto statuses = read_statuses(ctx.upstream(Stage::rehydrate, "pairs.csv"));
    std::set<std::string> violating;
    const auto t = read_csv(ctx.upstream(Stage::calibrate, "adult.csv"));
    const auto id = t.column("tweet_id"), v = t.column("violating");
    for (const auto& row : t.rows)
      if (row[v] == "1") violating.insert(row[id]);
    std::vector<moderation::SnapshotPair> pairs;
    for (auto& r : ads) {
      moderation::SnapshotPair p;
      p.tweet_id = r.tweet_id;
      p.status = statuses.at(r.tweet_id) == "retained" ? moderation::RehydrationStatus::retained
                                                       : moderation::RehydrationStatus::removed;
      p.initial = std::move(r);
      pairs.push_back(std::move(p));
    }
    const auto rows = report::daily_violating_series(pairs, violating);
    CsvWriter csv(out / "daily_violating.csv");
    csv.row({"date", "ads_total", "violating", "violating_removed", "violating_fraction"});
    std::vector<std::string> dates;
    report::LineSeries s{"violating", {}, {}};
    for (const auto& r : rows) {
      csv.row({format_date(r.date), std::to_string(r.ads_total), std::to_string(r.violating),
               std::to_string(r.violating_removed), fmt_real(r.violating_fraction)});
      dates.push_back(format_date(r.date));
      s.y.push_back(r.violating_fraction);
    }
    s.x = day_offsets(dates);
    report::write_text_file(out / "daily_violating.svg",
                            report::line_chart_svg({s}, {"Daily violating share", "day", "fraction of ads"}));
  }

  {
    const auto t = read_csv(ctx.upstream(Stage::rehydrate, "daily_removal.csv"));
    std::vector<std::string> dates;
    report::LineSeries s{"removed", {}, {}};
    for (const auto& row : t.rows) {
      dates.push_back(row[0]);
      s.y.push_back(std::stod(row[3]));
    }
    s.x = day_offsets(dates);
    report::write_text_file(out / "daily_removal.svg",
                            report::line_chart_svg({s}, {"Daily removal fraction", "day", "fraction removed"}));
  }
  {
    const auto t = read_csv(ctx.upstream(Stage::urls, "url_daily.csv"));
    std::vector<std::string> dates;
    report::LineSeries s{"problematic", {}, {}};
    for (const auto& row : t.rows) {
      dates.push_back(row[0]);
      s.y.push_back(std::stod(row[3]));
    }
    s.x = day_offsets(dates);
    report::write_text_file(out / "url_daily.svg",
                            report::line_chart_svg({s}, {"Daily problematic-URL share", "day", "fraction of ads"}));
  }
  {
    const auto t = read_csv(ctx.upstream(Stage::urls, "url_scatter.csv"));
    std::vector<double> x, y;
    std::vector<int> group;
    for (const auto& row : t.rows) {
      x.push_back(std::stod(row[1]));
      y.push_back(std::stod(row[2]));
      group.push_back(row[4] == "1" ? 1 : 0);
    }
    report::write_text_file(out / "url_scatter.svg",
                            report::scatter_svg(x, y, group, {"other", "adult"},
                                                {"URL reputation", "embedded engines", "landing engines"}));
  }

  copy_if_present(ctx.upstream(Stage::rehydrate, "daily_removal.csv"), out / "daily_removal.csv");
  copy_if_present(ctx.upstream(Stage::rehydrate, "creation_split.csv"), out / "creation_split.csv");
  copy_if_present(ctx.upstream(Stage::rehydrate, "creation_cdf.csv"), out / "creation_cdf.csv");
  copy_if_present(ctx.upstream(Stage::calibrate, "calibration.csv"), out / "calibration.csv");
  copy_if_present(ctx.upstream(Stage::calibrate, "language_disparity.csv"), out / "language_disparity.csv");
  copy_if_present(ctx.upstream(Stage::cluster, "runs.csv"), out / "cluster_runs.csv");
  copy_if_present(ctx.upstream(Stage::cluster, "projection.csv"), out / "cluster_projection.csv");
  copy_if_present(ctx.upstream(Stage::urls, "url_daily.csv"), out / "url_daily.csv");
  copy_if_present(ctx.upstream(Stage::urls, "url_scatter.csv"), out / "url_scatter.csv");
  copy_if_present(ctx.upstream(Stage::urls, "url_partitions.csv"), out / "url_partitions.csv");
  copy_if_present(ctx.upstream(Stage::urls, "url_sensitivity.csv"), out / "url_sensitivity.csv");
}

}  // namespace adaudit::pipeline::detail
