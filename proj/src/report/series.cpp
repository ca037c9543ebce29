#include "adaudit/report/series.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "adaudit/common/error.hpp"

namespace adaudit::report {

std::vector<CdfPoint> score_cdf(const std::vector<explicitness::ExplicitScore>& scores, double grid_step) {
  require(grid_step > 0.0 && grid_step < 1.0, "score_cdf: grid_step must lie in (0,1)");
  std::vector<CdfPoint> out;
  if (scores.empty()) return out;
  std::vector<double> sorted;
  sorted.reserve(scores.size());
  for (const auto& s : scores) sorted.push_back(s.score);
  std::sort(sorted.begin(), sorted.end());

  const auto point = [&](double x) {
    const auto n = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
    return CdfPoint{x, n, sorted.size(), static_cast<double>(n) / static_cast<double>(sorted.size())};
  };
  for (int k = 0;; ++k) {
    // Round to 1e-9 so 3 * 0.1 lands on 0.3 rather than 0.30000000000000004.
    const double x = std::round(k * grid_step * 1e9) / 1e9;
    if (x >= 1.0) break;
    out.push_back(point(x));
  }
  out.push_back(point(1.0));
  return out;
}

std::array<WeekdayRow, 7> weekday_trend(const std::vector<corpus::TweetRecord>& records, std::optional<Date> from,
                                        std::optional<Date> to) {
  static constexpr const char* kNames[7] = {"Monday", "Tuesday", "Wednesday", "Thursday",
                                            "Friday", "Saturday", "Sunday"};
  std::array<WeekdayRow, 7> rows;
  for (std::size_t i = 0; i < 7; ++i) rows[i].weekday = kNames[i];

  std::map<Date, std::pair<std::size_t, std::set<std::string>>> per_day;
  for (const auto& r : records) {
    const Date d = utc_day(r.created_at);
    if ((from && d < *from) || (to && d > *to)) continue;
    auto& slot = per_day[d];
    ++slot.first;
    slot.second.insert(r.author_id);
  }
  if (!from && per_day.empty()) return rows;
  const Date lo = from ? *from : per_day.begin()->first;
  const Date hi = to ? *to : per_day.rbegin()->first;

  for (Date d = lo; d <= hi; d += std::chrono::days{1}) {
    const unsigned iso = std::chrono::weekday(d).iso_encoding();  // Monday = 1
    auto& row = rows[iso - 1];
    ++row.days;
    if (auto it = per_day.find(d); it != per_day.end()) {
      row.ads += it->second.first;
      row.advertisers += it->second.second.size();
    }
  }
  for (auto& row : rows) {
    if (row.days == 0) continue;
    row.mean_ads = static_cast<double>(row.ads) / static_cast<double>(row.days);
    row.mean_distinct_advertisers = static_cast<double>(row.advertisers) / static_cast<double>(row.days);
  }
  return rows;
}

std::vector<LanguageRow> language_distribution(const std::vector<corpus::TweetRecord>& records) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records) ++counts[r.lang];
  std::vector<LanguageRow> rows;
  for (const auto& [lang, n] : counts)
    rows.push_back({lang, n, records.size(), static_cast<double>(n) / static_cast<double>(records.size())});
  std::stable_sort(rows.begin(), rows.end(), [](const LanguageRow& a, const LanguageRow& b) { return a.count > b.count; });
  return rows;
}

std::vector<DailyViolating> daily_violating_series(const std::vector<moderation::SnapshotPair>& pairs,
                                                   const std::set<std::string>& violating) {
  std::map<Date, DailyViolating> days;
  for (const auto& p : pairs) {
    const Date d = utc_day(p.initial.created_at);
    auto& row = days[d];
    row.date = d;
    ++row.ads_total;
    if (violating.contains(p.tweet_id)) {
      ++row.violating;
      if (p.status == moderation::RehydrationStatus::removed) ++row.violating_removed;
    }
  }
  std::vector<DailyViolating> out;
  for (auto& [d, row] : days) {
    row.violating_fraction = static_cast<double>(row.violating) / static_cast<double>(row.ads_total);
    out.push_back(row);
  }
  return out;
}

}  // namespace adaudit::report
