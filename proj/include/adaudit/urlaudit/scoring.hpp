#pragma once

#include <map>
#include <string>
#include <vector>

#include "adaudit/common/time.hpp"
#include "adaudit/corpus/tweet.hpp"
#include "adaudit/explicitness/scoring.hpp"
#include "adaudit/urlaudit/redirects.hpp"
#include "adaudit/urlaudit/reputation.hpp"

namespace adaudit::urlaudit {

inline constexpr int kDefaultProblematicThreshold = 3;

/// Reputation tallies for one embedded URL and its landing page.
struct UrlCounts {
  int mal_e = 0;
  int sus_e = 0;
  int mal_l = 0;
  int sus_l = 0;
  bool unscanned = false;  // either side lacked a report

  int embedded() const { return mal_e + sus_e; }
  int landing() const { return mal_l + sus_l; }
  bool operator==(const UrlCounts&) const = default;
};

/// max(mal_e + sus_e, mal_l + sus_l)
int problematic_score(const UrlCounts& c);

struct UrlVerdict {
  std::string tweet_id;
  int mal_e = 0;  // components of the first URL reaching the maximum score
  int sus_e = 0;
  int mal_l = 0;
  int sus_l = 0;
  int score = 0;
  bool problematic = false;
  bool any_unscanned = false;
  std::vector<UrlCounts> per_url;
};

/// A tweet without URLs scores 0 and is never problematic.
UrlVerdict score_tweet_urls(std::string tweet_id, const std::vector<UrlCounts>& urls,
                            int threshold = kDefaultProblematicThreshold);

std::size_t count_problematic(const std::vector<UrlVerdict>& verdicts, int threshold);

struct UrlAuditOptions {
  int max_hops = kDefaultMaxHops;
  std::chrono::milliseconds timeout = kDefaultTimeout;
  unsigned workers = 4;
  int threshold = kDefaultProblematicThreshold;
};

struct UrlAuditEntry {
  std::string canonical_url;
  RedirectChain chain;
  ReputationCounts embedded;
  ReputationCounts landing;
};

struct UrlAuditResult {
  std::map<std::string, UrlAuditEntry> by_url;  // keyed by canonical embedded URL
  std::vector<UrlVerdict> verdicts;             // one per record, input order
};

/// Resolves and scores every distinct canonical URL once, then joins the
/// results back onto the tweets. The fetcher and client must be safe to call
/// from several threads. Service errors abort the audit.
UrlAuditResult audit_urls(const std::vector<corpus::TweetRecord>& records, IsolatedFetcher& fetcher,
                          ReputationClient& reputation, const UrlAuditOptions& options = {});

struct DailyProblematic {
  Date date{};
  std::size_t ads_total = 0;
  std::size_t problematic = 0;
  double fraction = 0.0;
};

struct ScatterRow {
  std::string tweet_id;
  int embedded_sum = 0;
  int landing_sum = 0;
  double explicit_score = 0.0;
  bool adult = false;
};

struct PartitionCounts {
  std::size_t ads = 0;
  std::size_t with_urls = 0;
  std::size_t problematic = 0;
  std::size_t problematic_embedded = 0;            // some embedded URL alone reaches the threshold
  std::size_t benign_embedded_unsafe_landing = 0;  // problematic only through a landing page
};

struct UrlRiskDatasets {
  std::vector<DailyProblematic> daily;
  std::vector<ScatterRow> scatter;  // tweets with URLs and an explicitness score
  PartitionCounts adult;
  PartitionCounts other;
  std::size_t unscored = 0;  // verdicts without an explicitness score
};

/// Joins verdicts to records (for dates) and scores (for the adult partition).
UrlRiskDatasets url_risk_datasets(const std::vector<corpus::TweetRecord>& records,
                                  const std::vector<UrlVerdict>& verdicts,
                                  const std::vector<explicitness::ExplicitScore>& scores, double threshold_explicit,
                                  int url_threshold = kDefaultProblematicThreshold);

double mean_daily_fraction(const std::vector<DailyProblematic>& daily);

}  // namespace adaudit::urlaudit
