#include "adaudit/urlaudit/scoring.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "adaudit/common/url.hpp"

namespace adaudit::urlaudit {

int problematic_score(const UrlCounts& c) { return std::max(c.embedded(), c.landing()); }

UrlVerdict score_tweet_urls(std::string tweet_id, const std::vector<UrlCounts>& urls, int threshold) {
  require(threshold >= 1, "problematic threshold must be >= 1");
  UrlVerdict v;
  v.tweet_id = std::move(tweet_id);
  v.per_url = urls;
  bool first = true;
  for (const auto& c : urls) {
    v.any_unscanned = v.any_unscanned || c.unscanned;
    const int s = problematic_score(c);
    if (first || s > v.score) {
      v.score = s;
      v.mal_e = c.mal_e;
      v.sus_e = c.sus_e;
      v.mal_l = c.mal_l;
      v.sus_l = c.sus_l;
      first = false;
    }
  }
  v.problematic = v.score >= threshold;
  return v;
}

std::size_t count_problematic(const std::vector<UrlVerdict>& verdicts, int threshold) {
  return static_cast<std::size_t>(
      std::count_if(verdicts.begin(), verdicts.end(), [&](const UrlVerdict& v) { return v.score >= threshold; }));
}

namespace {

/// Runs fn(i) for i in [0, n) on up to `workers` threads; the first exception wins.
template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex mu;
  const auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first_error) first_error = std::current_exception();
        next = n;
      }
    }
  };
  workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

UrlAuditResult audit_urls(const std::vector<corpus::TweetRecord>& records, IsolatedFetcher& fetcher,
                          ReputationClient& reputation, const UrlAuditOptions& options) {
  // Distinct canonical URLs, fetched in the first raw spelling seen.
  std::vector<std::string> canonical;
  std::vector<std::string> raw;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& r : records) {
    for (const auto& u : extract_embedded_urls(r)) {
      auto c = canonicalize_url(u);
      if (slot.emplace(c, canonical.size()).second) {
        canonical.push_back(std::move(c));
        raw.push_back(u);
      }
    }
  }

  std::vector<RedirectChain> chains(canonical.size());
  parallel_for(canonical.size(), options.workers, [&](std::size_t i) {
    chains[i] = resolve_redirects(raw[i], fetcher, options.max_hops, options.timeout);
  });

  std::vector<std::string> lookups = canonical;
  for (const auto& ch : chains) lookups.push_back(canonicalize_url(ch.landing_url));
  std::sort(lookups.begin(), lookups.end());
  lookups.erase(std::unique(lookups.begin(), lookups.end()), lookups.end());
  std::vector<ReputationCounts> counts(lookups.size());
  parallel_for(lookups.size(), options.workers, [&](std::size_t i) { counts[i] = reputation.lookup(lookups[i]); });
  const auto rep = [&](const std::string& c) {
    return counts[static_cast<std::size_t>(std::lower_bound(lookups.begin(), lookups.end(), c) - lookups.begin())];
  };

  UrlAuditResult result;
  for (std::size_t i = 0; i < canonical.size(); ++i)
    result.by_url[canonical[i]] = UrlAuditEntry{canonical[i], chains[i], rep(canonical[i]),
                                                rep(canonicalize_url(chains[i].landing_url))};

  result.verdicts.reserve(records.size());
  for (const auto& r : records) {
    std::vector<UrlCounts> per_url;
    for (const auto& u : extract_embedded_urls(r)) {
      const auto& e = result.by_url.at(canonicalize_url(u));
      per_url.push_back({e.embedded.malicious, e.embedded.suspicious, e.landing.malicious, e.landing.suspicious,
                         !e.embedded.scanned || !e.landing.scanned});
    }
    result.verdicts.push_back(score_tweet_urls(r.tweet_id, per_url, options.threshold));
  }
  return result;
}

UrlRiskDatasets url_risk_datasets(const std::vector<corpus::TweetRecord>& records,
                                  const std::vector<UrlVerdict>& verdicts,
                                  const std::vector<explicitness::ExplicitScore>& scores, double threshold_explicit,
                                  int url_threshold) {
  std::unordered_map<std::string, const corpus::TweetRecord*> by_id;
  for (const auto& r : records) by_id.emplace(r.tweet_id, &r);
  std::unordered_map<std::string, double> score_of;
  for (const auto& s : scores) score_of.emplace(s.tweet_id, s.score);

  UrlRiskDatasets out;
  std::map<Date, DailyProblematic> days;
  for (const auto& v : verdicts) {
    const auto rec = by_id.find(v.tweet_id);
    require(rec != by_id.end(), "url verdict for unknown tweet " + v.tweet_id);
    auto& day = days[utc_day(rec->second->created_at)];
    ++day.ads_total;
    if (v.score >= url_threshold) ++day.problematic;

    const auto sc = score_of.find(v.tweet_id);
    if (sc == score_of.end()) {
      ++out.unscored;
      continue;
    }
    const bool adult = sc->second >= threshold_explicit;
    auto& part = adult ? out.adult : out.other;
    ++part.ads;
    if (!v.per_url.empty()) {
      ++part.with_urls;
      out.scatter.push_back({v.tweet_id, v.mal_e + v.sus_e, v.mal_l + v.sus_l, sc->second, adult});
    }
    if (v.score >= url_threshold) {
      ++part.problematic;
      const bool bad_embedded =
          std::any_of(v.per_url.begin(), v.per_url.end(), [&](const UrlCounts& c) { return c.embedded() >= url_threshold; });
      if (bad_embedded)
        ++part.problematic_embedded;
      else
        ++part.benign_embedded_unsafe_landing;
    }
  }
  for (auto& [date, row] : days) {
    row.date = date;
    row.fraction = static_cast<double>(row.problematic) / static_cast<double>(row.ads_total);
    out.daily.push_back(row);
  }
  return out;
}

double mean_daily_fraction(const std::vector<DailyProblematic>& daily) {
  if (daily.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& d : daily) sum += d.fraction;
  return sum / static_cast<double>(daily.size());
}

}  // namespace adaudit::urlaudit
