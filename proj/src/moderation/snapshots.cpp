#include "adaudit/moderation/snapshots.hpp"

#include <map>
#include <unordered_map>

#include "adaudit/common/error.hpp"

namespace adaudit::moderation {

std::string_view to_string(RehydrationStatus status) noexcept {
  return status == RehydrationStatus::retained ? "retained" : "removed";
}

std::vector<SnapshotPair> diff_snapshots(const std::vector<corpus::TweetRecord>& initial,
                                         const std::vector<corpus::TweetRecord>& rehydrated,
                                         std::chrono::milliseconds window, WindowCheck check) {
  std::unordered_map<std::string, const corpus::TweetRecord*> found;
  found.reserve(rehydrated.size());
  for (const auto& r : rehydrated) found.emplace(r.tweet_id, &r);

  std::vector<SnapshotPair> pairs;
  pairs.reserve(initial.size());
  for (const auto& rec : initial) {
    SnapshotPair pair{rec.tweet_id, rec, RehydrationStatus::removed, std::nullopt, window};
    if (auto it = found.find(rec.tweet_id); it != found.end()) {
      const auto& again = *it->second;
      if (check == WindowCheck::strict && again.captured_at - rec.captured_at < window) {
        fail(Errc::window_violation, "tweet " + rec.tweet_id + " rehydrated at " + format_timestamp(again.captured_at) +
                                         ", before the window closed");
      }
      pair.status = RehydrationStatus::retained;
      pair.rehydrated = again;
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

RemovalCounts count_outcomes(const std::vector<SnapshotPair>& pairs) {
  RemovalCounts c;
  for (const auto& p : pairs) (p.status == RehydrationStatus::retained ? c.retained : c.removed)++;
  return c;
}

std::vector<DailyRemoval> daily_removal_series(const std::vector<SnapshotPair>& pairs) {
  std::map<Date, DailyRemoval> days;
  for (const auto& p : pairs) {
    const Date d = utc_day(p.initial.created_at);
    auto& row = days.try_emplace(d, DailyRemoval{d}).first->second;
    ++row.ads_total;
    if (p.status == RehydrationStatus::removed) ++row.ads_removed;
  }
  std::vector<DailyRemoval> out;
  out.reserve(days.size());
  for (auto& [d, row] : days) {
    row.removal_fraction = static_cast<double>(row.ads_removed) / static_cast<double>(row.ads_total);
    out.push_back(row);
  }
  return out;
}

double mean_daily_fraction(const std::vector<DailyRemoval>& series, std::optional<Date> from, std::optional<Date> to) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& row : series) {
    if ((from && row.date < *from) || (to && row.date > *to)) continue;
    sum += row.removal_fraction;
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace adaudit::moderation
