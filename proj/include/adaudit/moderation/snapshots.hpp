#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "adaudit/common/time.hpp"
#include "adaudit/corpus/tweet.hpp"

namespace adaudit::moderation {

enum class RehydrationStatus { retained, removed };

std::string_view to_string(RehydrationStatus status) noexcept;

inline constexpr std::chrono::milliseconds kDefaultRehydrationWindow = std::chrono::days{14};

/// Initial capture plus its rehydration outcome. "removed" covers both
/// platform moderation and self-deletion; the data cannot tell them apart.
struct SnapshotPair {
  std::string tweet_id;
  corpus::TweetRecord initial;
  RehydrationStatus status = RehydrationStatus::removed;
  std::optional<corpus::TweetRecord> rehydrated;  // present iff retained
  std::chrono::milliseconds window = kDefaultRehydrationWindow;
};

enum class WindowCheck { strict, lenient };

/// One pair per initial record; removed iff the tweet_id is absent from the
/// rehydrated set. In strict mode a rehydrated capture earlier than
/// initial.captured_at + window raises window_violation.
std::vector<SnapshotPair> diff_snapshots(const std::vector<corpus::TweetRecord>& initial,
                                         const std::vector<corpus::TweetRecord>& rehydrated,
                                         std::chrono::milliseconds window = kDefaultRehydrationWindow,
                                         WindowCheck check = WindowCheck::strict);

struct RemovalCounts {
  std::size_t retained = 0;
  std::size_t removed = 0;
};

RemovalCounts count_outcomes(const std::vector<SnapshotPair>& pairs);

struct DailyRemoval {
  Date date;
  std::size_t ads_total = 0;
  std::size_t ads_removed = 0;
  double removal_fraction = 0.0;
};

/// Rows per UTC calendar day of initial.created_at, ascending; empty days omitted.
std::vector<DailyRemoval> daily_removal_series(const std::vector<SnapshotPair>& pairs);

/// Unweighted mean of daily fractions over days in [from, to] (inclusive, either bound optional).
double mean_daily_fraction(const std::vector<DailyRemoval>& series, std::optional<Date> from = std::nullopt,
                           std::optional<Date> to = std::nullopt);

}  // namespace adaudit::moderation
