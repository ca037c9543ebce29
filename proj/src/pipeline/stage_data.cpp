// ingest, rehydrate, score and calibrate.

#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>

#include "adaudit/common/csv.hpp"
#include "adaudit/common/error.hpp"
#include "adaudit/corpus/parse.hpp"
#include "adaudit/corpus/store.hpp"
#include "adaudit/explicitness/calibration.hpp"
#include "adaudit/explicitness/clients.hpp"
#include "adaudit/explicitness/disparity.hpp"
#include "adaudit/explicitness/scoring.hpp"
#include "adaudit/moderation/advertisers.hpp"
#include "adaudit/moderation/snapshots.hpp"
#include "stage_io.hpp"

namespace adaudit::pipeline::detail {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

corpus::ParseResult parse_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot read " + path.string());
  return corpus::parse_tweet_stream(in, corpus::Strictness::lenient);
}

json stats_json(const corpus::ParseStats& s) {
  return json{{"lines", s.total}, {"parsed", s.parsed}, {"dropped", s.dropped}, {"dropped_urls", s.dropped_urls}};
}

void write_group(CsvWriter& csv, std::string_view name, const moderation::CreationGroup& g) {
  csv.row({name, std::to_string(g.before), std::to_string(g.after), std::to_string(g.unknown),
           fmt_real(g.before_fraction()), fmt_real(g.after_fraction())});
}

void write_cdf(CsvWriter& csv, std::string_view name, const moderation::CreationGroup& g) {
  for (const auto& [date, frac] : g.creation_cdf) csv.row({name, format_date(date), fmt_real(frac)});
}

}  // namespace

void run_ingest(const StageContext& ctx) {
  const auto parsed = parse_file(ctx.config.stream);
  const auto ads = corpus::filter_ads(parsed.records, ctx.config.ad_sources);

  corpus::CorpusStore store(ctx.out / "store");
  const auto receipt = store.store_snapshot("initial", ads);
  store.finalize("initial");
  write_jsonl(ctx.out / "ads.jsonl", store.read_snapshot("initial"));

  json stats = stats_json(parsed.stats);
  stats["ads"] = receipt.written;
  stats["duplicate_ads"] = receipt.duplicates;
  write_json(ctx.out / "stats.json", stats);
}

void run_rehydrate(const StageContext& ctx) {
  const auto initial = read_jsonl(ctx.upstream(Stage::ingest, "ads.jsonl"));
  std::set<std::string> initial_ids;
  for (const auto& r : initial) initial_ids.insert(r.tweet_id);

  const auto parsed = parse_file(ctx.config.rehydrated);
  std::vector<corpus::TweetRecord> matched;
  std::size_t unmatched = 0;
  for (const auto& r : parsed.records) {
    if (initial_ids.count(r.tweet_id))
      matched.push_back(r);
    else
      ++unmatched;
  }

  corpus::CorpusStore store(ctx.out / "store");
  const auto receipt = store.store_snapshot("rehydrated", matched);
  store.finalize("rehydrated");
  const auto rehydrated = store.read_snapshot("rehydrated");

  const auto pairs = moderation::diff_snapshots(
      initial, rehydrated, ctx.config.rehydration_window,
      ctx.config.strict_window ? moderation::WindowCheck::strict : moderation::WindowCheck::lenient);

  {
    CsvWriter csv(ctx.out / "pairs.csv");
    csv.row({"tweet_id", "author_id", "created_at", "lang", "status"});
    for (const auto& p : pairs)
      csv.row({p.tweet_id, p.initial.author_id, format_timestamp(p.initial.created_at), p.initial.lang,
               moderation::to_string(p.status)});
  }

  const auto daily = moderation::daily_removal_series(pairs);
  {
    CsvWriter csv(ctx.out / "daily_removal.csv");
    csv.row({"date", "ads_total", "ads_removed", "removal_fraction"});
    for (const auto& d : daily)
      csv.row({format_date(d.date), std::to_string(d.ads_total), std::to_string(d.ads_removed),
               fmt_real(d.removal_fraction)});
  }

  const auto profiles = moderation::build_advertiser_profiles(pairs);
  {
    CsvWriter csv(ctx.out / "advertisers.csv");
    csv.row({"author_id", "usernames", "account_created_at", "follower_count", "following_count", "ads_total",
             "ads_removed"});
    for (const auto& p : profiles) {
      std::string names;
      for (const auto& u : p.usernames_seen) names += (names.empty() ? "" : "|") + u;
      csv.row({p.author_id, names, p.account_created_at ? format_timestamp(*p.account_created_at) : "",
               std::to_string(p.follower_count), std::to_string(p.following_count), std::to_string(p.ads_total),
               std::to_string(p.ads_removed)});
    }
  }

  const auto split = moderation::creation_date_split(profiles, ctx.config.collection_start);
  {
    CsvWriter csv(ctx.out / "creation_split.csv");
    csv.row({"group", "before", "after", "unknown", "before_fraction", "after_fraction"});
    write_group(csv, "any_removed", split.any_removed);
    write_group(csv, "none_removed", split.none_removed);
    write_group(csv, "all", split.all);
  }
  {
    CsvWriter csv(ctx.out / "creation_cdf.csv");
    csv.row({"group", "date", "cumulative_fraction"});
    write_cdf(csv, "any_removed", split.any_removed);
    write_cdf(csv, "none_removed", split.none_removed);
  }

  const auto counts = moderation::count_outcomes(pairs);
  json stats = stats_json(parsed.stats);
  stats["matched"] = receipt.written;
  stats["duplicates"] = receipt.duplicates;
  stats["unmatched"] = unmatched;
  stats["initial_ads"] = pairs.size();
  stats["retained"] = counts.retained;
  stats["removed"] = counts.removed;
  stats["late_removed_ads"] = ctx.config.late_removed_ads;
  stats["mean_daily_removal_fraction"] = moderation::mean_daily_fraction(daily);
  stats["advertisers"] = profiles.size();
  write_json(ctx.out / "stats.json", stats);
}

void run_score(const StageContext& ctx) {
  const auto ads = read_jsonl(ctx.upstream(Stage::ingest, "ads.jsonl"));
  explicitness::GoogleTranslateClient translator(make_service(ctx.config, ctx.config.translate_service, "translate"));
  explicitness::PerspectiveClient scorer(make_service(ctx.config, ctx.config.explicit_service, "explicit"),
                                         ctx.config.explicit_attribute);
  const auto result =
      explicitness::score_texts(ads, translator, scorer, explicitness::NoTranslateSet(ctx.config.no_translate));

  std::map<std::string, const corpus::TweetRecord*> by_id;
  for (const auto& r : ads) by_id[r.tweet_id] = &r;
  {
    CsvWriter csv(ctx.out / "scores.csv");
    csv.row({"tweet_id", "lang", "translated", "score"});
    for (const auto& s : result.scores)
      csv.row({s.tweet_id, by_id.at(s.tweet_id)->lang, yes_no(s.translated), fmt_real(s.score)});
  }
  {
    CsvWriter csv(ctx.out / "failures.csv");
    csv.row({"tweet_id", "reason"});
    for (const auto& f : result.failures) csv.row({f.tweet_id, f.reason});
  }
}

void run_calibrate(const StageContext& ctx) {
  const auto& cfg = ctx.config;
  const auto scores = read_scores(ctx.upstream(Stage::score, "scores.csv"));

  const auto sample =
      explicitness::stratified_sample(scores, cfg.calibration_per_bin, cfg.calibration_bin_width, cfg.calibration_seed);
  {
    std::map<std::string, double> score_of;
    for (const auto& s : scores) score_of[s.tweet_id] = s.score;
    CsvWriter csv(ctx.out / "calibration_sample.csv");
    csv.row({"tweet_id", "score"});
    for (const auto& id : sample) csv.row({id, fmt_real(score_of.at(id))});
  }

  double threshold = cfg.explicit_threshold;
  json calibration{{"configured_threshold", cfg.explicit_threshold}, {"labels", nullptr}};
  if (cfg.calibration_labels) {
    const auto labels = read_binary_labels(*cfg.calibration_labels);
    const auto report = explicitness::calibrate_threshold(scores, labels);
    {
      CsvWriter csv(ctx.out / "calibration_bins.csv");
      csv.row({"lo", "hi", "sample_size", "positives"});
      for (const auto& b : report.bins)
        csv.row({fmt_real(b.lo), fmt_real(b.hi), std::to_string(b.sample_size), std::to_string(b.positives)});
    }
    {
      CsvWriter csv(ctx.out / "calibration.csv");
      csv.row({"threshold", "precision", "recall", "f1", "tp", "fp", "fn", "tn"});
      for (const auto& c : report.threshold_candidates)
        csv.row({fmt_real(c.threshold), fmt_real(c.precision), fmt_real(c.recall), fmt_real(c.f1),
                 std::to_string(c.counts.tp), std::to_string(c.counts.fp), std::to_string(c.counts.fn),
                 std::to_string(c.counts.tn)});
    }
    calibration["labels"] = labels.size();
    calibration["chosen_threshold"] = report.chosen_threshold;
    if (cfg.apply_calibrated_threshold) threshold = report.chosen_threshold;
  }
  calibration["applied_threshold"] = threshold;
  write_json(ctx.out / "calibration.json", calibration);

  const auto partition = explicitness::classify_adult(scores, threshold);
  const std::set<std::string> fps = cfg.false_positives ? read_id_list(*cfg.false_positives) : std::set<std::string>{};
  const auto violating = explicitness::apply_fp_removal(partition.adult, fps);
  const auto statuses = read_statuses(ctx.upstream(Stage::rehydrate, "pairs.csv"));
  const auto status_of = [&](const std::string& id) -> const std::string& {
    const auto it = statuses.find(id);
    if (it == statuses.end()) fail(Errc::precondition, "scored ad " + id + " has no rehydration outcome");
    return it->second;
  };

  {
    CsvWriter csv(ctx.out / "adult.csv");
    csv.row({"tweet_id", "score", "flagged", "false_positive", "violating", "status"});
    for (const auto& s : scores) {
      const bool flagged = partition.adult.count(s.tweet_id) > 0;
      csv.row({s.tweet_id, fmt_real(s.score), yes_no(flagged), yes_no(fps.count(s.tweet_id) > 0),
               yes_no(violating.count(s.tweet_id) > 0), status_of(s.tweet_id)});
    }
  }

  const auto ads = read_jsonl(ctx.upstream(Stage::ingest, "ads.jsonl"));
  std::vector<corpus::TweetRecord> moderated, unmoderated;
  for (const auto& r : ads) {
    if (!violating.count(r.tweet_id)) continue;
    (status_of(r.tweet_id) == "removed" ? moderated : unmoderated).push_back(r);
  }
  {
    CsvWriter csv(ctx.out / "language_disparity.csv");
    csv.row({"lang", "violating_moderated", "violating_unmoderated", "moderation_rate"});
    for (const auto& row : explicitness::language_disparity(moderated, unmoderated))
      csv.row({row.lang, std::to_string(row.violating_moderated), std::to_string(row.violating_unmoderated),
               fmt_real(row.moderation_rate)});
  }

  std::size_t retained = 0, removed = 0, flagged_retained = 0, fp_retained = 0, violating_moderated = 0;
  for (const auto& [id, status] : statuses) {
    const bool kept = status == "retained";
    (kept ? retained : removed)++;
    if (kept && partition.adult.count(id)) ++flagged_retained;
    if (kept && fps.count(id)) ++fp_retained;
    if (!kept && violating.count(id)) ++violating_moderated;
  }
  write_json(ctx.out / "counts.json",
             json{{"total_ads", statuses.size()},
                  {"rehydrated_ads", retained},
                  {"removed_diff", removed},
                  {"late_removed", cfg.late_removed_ads},
                  {"flagged_total", partition.adult.size()},
                  {"fp_total", fps.size()},
                  {"flagged_retained", flagged_retained},
                  {"fp_retained", fp_retained},
                  {"violating_moderated", violating_moderated},
                  {"unscored", statuses.size() - scores.size()},
                  {"threshold", threshold}});
}

}  // namespace adaudit::pipeline::detail
