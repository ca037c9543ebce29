#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adaudit/common/time.hpp"
#include "adaudit/corpus/tweet.hpp"
#include "adaudit/explicitness/scoring.hpp"
#include "adaudit/moderation/snapshots.hpp"

namespace adaudit::report {

struct CdfPoint {
  double score = 0.0;
  std::size_t at_or_below = 0;
  std::size_t total = 0;
  double cumulative_fraction = 0.0;
};

/// Evaluated at 0, step, 2*step, ... and finally 1.0. Empty input gives an empty CDF.
std::vector<CdfPoint> score_cdf(const std::vector<explicitness::ExplicitScore>& scores, double grid_step);

struct WeekdayRow {
  std::string weekday;  // "Monday" ... "Sunday"
  std::size_t days = 0;  // occurrences of this weekday in the window
  std::size_t ads = 0;
  std::size_t advertisers = 0;  // distinct authors summed over those days
  double mean_ads = 0.0;
  double mean_distinct_advertisers = 0.0;
};

/// Seven rows, Monday first. The window runs from the first to the last UTC
/// created_at day unless given; days without ads count as zero.
std::array<WeekdayRow, 7> weekday_trend(const std::vector<corpus::TweetRecord>& records,
                                        std::optional<Date> from = std::nullopt,
                                        std::optional<Date> to = std::nullopt);

struct LanguageRow {
  std::string lang;
  std::size_t count = 0;
  std::size_t total = 0;
  double fraction = 0.0;
};

/// Sorted by count descending, then lang.
std::vector<LanguageRow> language_distribution(const std::vector<corpus::TweetRecord>& records);

struct DailyViolating {
  Date date{};
  std::size_t ads_total = 0;
  std::size_t violating = 0;
  std::size_t violating_removed = 0;
  double violating_fraction = 0.0;
};

/// Per UTC created_at day of the initial capture; `violating` holds tweet ids.
std::vector<DailyViolating> daily_violating_series(const std::vector<moderation::SnapshotPair>& pairs,
                                                   const std::set<std::string>& violating);

}  // namespace adaudit::report
