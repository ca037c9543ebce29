#include "adaudit/moderation/advertisers.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace adaudit::moderation {

std::vector<AdvertiserProfile> build_advertiser_profiles(const std::vector<SnapshotPair>& pairs) {
  std::vector<AdvertiserProfile> profiles;
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<Timestamp> latest;

  auto observe = [&](AdvertiserProfile& p, std::size_t idx, const corpus::TweetRecord& r) {
    if (std::find(p.usernames_seen.begin(), p.usernames_seen.end(), r.username) == p.usernames_seen.end())
      p.usernames_seen.push_back(r.username);
    if (!p.account_created_at && r.account_created_at) p.account_created_at = r.account_created_at;
    if (r.captured_at >= latest[idx]) {
      latest[idx] = r.captured_at;
      p.follower_count = r.follower_count;
      p.following_count = r.following_count;
    }
  };

  for (const auto& pair : pairs) {
    const auto& author = pair.initial.author_id;
    auto [it, inserted] = slot.try_emplace(author, profiles.size());
    if (inserted) {
      profiles.emplace_back().author_id = author;
      latest.push_back(Timestamp::min());
    }
    auto& profile = profiles[it->second];
    observe(profile, it->second, pair.initial);
    if (pair.rehydrated) observe(profile, it->second, *pair.rehydrated);
    ++profile.ads_total;
    if (pair.status == RehydrationStatus::removed) ++profile.ads_removed;
  }
  return profiles;
}

double CreationGroup::after_fraction() const {
  const auto known = before + after;
  return known == 0 ? 0.0 : static_cast<double>(after) / static_cast<double>(known);
}

double CreationGroup::before_fraction() const {
  const auto known = before + after;
  return known == 0 ? 0.0 : static_cast<double>(before) / static_cast<double>(known);
}

namespace {

void finish_cdf(CreationGroup& g, std::map<Date, std::size_t>& per_day) {
  const auto known = g.before + g.after;
  std::size_t running = 0;
  for (const auto& [day, n] : per_day) {
    running += n;
    g.creation_cdf.emplace_back(day, static_cast<double>(running) / static_cast<double>(known));
  }
}

}  // namespace

CreationSplitReport creation_date_split(const std::vector<AdvertiserProfile>& profiles, Timestamp collection_start) {
  CreationSplitReport report;
  std::map<Date, std::size_t> days_removed, days_kept, days_all;
  for (const auto& p : profiles) {
    auto& group = p.ads_removed > 0 ? report.any_removed : report.none_removed;
    auto& days = p.ads_removed > 0 ? days_removed : days_kept;
    if (!p.account_created_at) {
      ++group.unknown;
      ++report.all.unknown;
      continue;
    }
    const bool after = *p.account_created_at >= collection_start;
    (after ? group.after : group.before)++;
    (after ? report.all.after : report.all.before)++;
    ++days[utc_day(*p.account_created_at)];
    ++days_all[utc_day(*p.account_created_at)];
  }
  finish_cdf(report.any_removed, days_removed);
  finish_cdf(report.none_removed, days_kept);
  finish_cdf(report.all, days_all);
  return report;
}

}  // namespace adaudit::moderation
