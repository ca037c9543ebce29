#include <memory>

#include "adaudit/common/cassette.hpp"
#include "adaudit/common/csv.hpp"
#include "adaudit/common/error.hpp"
#include "adaudit/urlaudit/fetchers.hpp"
#include "adaudit/urlaudit/reputation.hpp"
#include "adaudit/urlaudit/scoring.hpp"
#include "stage_io.hpp"

namespace adaudit::pipeline::detail {

namespace fs = std::filesystem;
using nlohmann::json;
namespace ua = urlaudit;

namespace {

/// Owns the fetcher stack for the configured service mode.
struct FetcherStack {
  std::unique_ptr<ua::IsolatedFetcher> base;
  std::unique_ptr<ua::IsolatedFetcher> polite;
  std::unique_ptr<ua::IsolatedFetcher> top;

  explicit FetcherStack(const AuditConfig& cfg) {
    const auto cassette = [&] {
      if (!cfg.cassette_dir) fail(Errc::config_invalid, "services.cassette_dir is required outside live mode");
      return Cassette(*cfg.cassette_dir / "fetch");
    };
    if (cfg.service_mode == ServiceMode::replay) {
      top = std::make_unique<ua::CassetteFetcher>(cassette());
      return;
    }
    base = std::make_unique<ua::HttpFetcher>();
    polite = std::make_unique<ua::PoliteFetcher>(*base, cfg.politeness_delay);
    if (cfg.service_mode == ServiceMode::record)
      top = std::make_unique<ua::RecordingFetcher>(*polite, cassette());
  }
  ua::IsolatedFetcher& get() { return top ? *top : *polite; }
};

std::string count_cell(int value, bool scanned) { return scanned ? std::to_string(value) : ""; }

void write_partition(CsvWriter& csv, std::string_view name, const ua::PartitionCounts& p) {
  csv.row({name, std::to_string(p.ads), std::to_string(p.with_urls), std::to_string(p.problematic),
           std::to_string(p.problematic_embedded), std::to_string(p.benign_embedded_unsafe_landing)});
}

}  // namespace

void run_urls(const StageContext& ctx) {
  const auto& cfg = ctx.config;
  const auto statuses = read_statuses(ctx.upstream(Stage::rehydrate, "pairs.csv"));
  std::vector<corpus::TweetRecord> retained;
  for (auto& r : read_jsonl(ctx.upstream(Stage::ingest, "ads.jsonl")))
    if (statuses.at(r.tweet_id) == "retained") retained.push_back(std::move(r));

  FetcherStack fetchers(cfg);
  ua::VirusTotalClient reputation(make_service(cfg, cfg.reputation_service, "reputation"));
  ua::UrlAuditOptions options;
  options.max_hops = cfg.max_hops;
  options.timeout = cfg.url_timeout;
  options.workers = cfg.url_workers;
  options.threshold = cfg.url_threshold;
  const auto audit = ua::audit_urls(retained, fetchers.get(), reputation, options);

  std::map<ua::Termination, std::size_t> terminations;
  {
    CsvWriter chains(ctx.out / "url_chains.csv");
    chains.row({"embedded_url", "landing_url", "hop_count", "terminated_by", "final_status", "error", "mal_e", "sus_e",
                "mal_l", "sus_l"});
    CsvWriter hops(ctx.out / "url_hops.csv");
    hops.row({"embedded_url", "hop", "url", "status", "via"});
    for (const auto& [url, e] : audit.by_url) {
      const auto& c = e.chain;
      ++terminations[c.terminated_by];
      chains.row({url, c.landing_url, std::to_string(c.hop_count()), std::string(ua::to_string(c.terminated_by)),
                  c.final_status ? std::to_string(*c.final_status) : "", c.error,
                  count_cell(e.embedded.malicious, e.embedded.scanned), count_cell(e.embedded.suspicious, e.embedded.scanned),
                  count_cell(e.landing.malicious, e.landing.scanned), count_cell(e.landing.suspicious, e.landing.scanned)});
      for (std::size_t i = 0; i < c.hops.size(); ++i)
        hops.row({url, std::to_string(i + 1), c.hops[i].url, std::to_string(c.hops[i].status),
                  std::string(ua::to_string(c.hops[i].via))});
    }
  }
  {
    CsvWriter csv(ctx.out / "verdicts.csv");
    csv.row({"tweet_id", "n_urls", "mal_e", "sus_e", "mal_l", "sus_l", "score", "problematic", "any_unscanned"});
    for (const auto& v : audit.verdicts)
      csv.row({v.tweet_id, std::to_string(v.per_url.size()), std::to_string(v.mal_e), std::to_string(v.sus_e),
               std::to_string(v.mal_l), std::to_string(v.sus_l), std::to_string(v.score), yes_no(v.problematic),
               yes_no(v.any_unscanned)});
  }

  const auto counts = read_json(ctx.upstream(Stage::calibrate, "counts.json"));
  const double explicit_threshold = counts.at("threshold").get<double>();
  const auto scores = read_scores(ctx.upstream(Stage::score, "scores.csv"));
  const auto datasets = ua::url_risk_datasets(retained, audit.verdicts, scores, explicit_threshold, cfg.url_threshold);
  {
    CsvWriter csv(ctx.out / "url_daily.csv");
    csv.row({"date", "ads_total", "problematic", "fraction"});
    for (const auto& d : datasets.daily)
      csv.row({format_date(d.date), std::to_string(d.ads_total), std::to_string(d.problematic), fmt_real(d.fraction)});
  }
  {
    CsvWriter csv(ctx.out / "url_scatter.csv");
    csv.row({"tweet_id", "embedded_sum", "landing_sum", "explicit_score", "adult"});
    for (const auto& s : datasets.scatter)
      csv.row({s.tweet_id, std::to_string(s.embedded_sum), std::to_string(s.landing_sum), fmt_real(s.explicit_score),
               yes_no(s.adult)});
  }
  {
    CsvWriter csv(ctx.out / "url_partitions.csv");
    csv.row({"partition", "ads", "with_urls", "problematic", "problematic_embedded", "benign_embedded_unsafe_landing"});
    write_partition(csv, "adult", datasets.adult);
    write_partition(csv, "other", datasets.other);
  }
  {
    CsvWriter csv(ctx.out / "url_sensitivity.csv");
    csv.row({"threshold", "problematic"});
    for (int t = 1; t <= 10; ++t) {
      const auto n = ua::count_problematic(audit.verdicts, t);
      csv.row({std::to_string(t), std::to_string(n)});
    }
  }

  std::size_t problematic = 0, with_urls = 0;
  for (const auto& v : audit.verdicts) {
    problematic += v.problematic ? 1 : 0;
    with_urls += v.per_url.empty() ? 0 : 1;
  }
  json term;
  for (const auto& [t, n] : terminations) term[std::string(ua::to_string(t))] = n;
  write_json(ctx.out / "urls.json", json{{"ads", retained.size()},
                                         {"ads_with_urls", with_urls},
                                         {"distinct_urls", audit.by_url.size()},
                                         {"problematic", problematic},
                                         {"threshold", cfg.url_threshold},
                                         {"mean_daily_fraction", ua::mean_daily_fraction(datasets.daily)},
                                         {"unscored", datasets.unscored},
                                         {"terminations", term}});
}

}  // namespace adaudit::pipeline::detail
