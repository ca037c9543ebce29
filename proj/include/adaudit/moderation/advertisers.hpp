#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adaudit/common/time.hpp"
#include "adaudit/moderation/snapshots.hpp"

namespace adaudit::moderation {

struct AdvertiserProfile {
  std::string author_id;
  std::vector<std::string> usernames_seen;  // first-seen order, no repeats
  std::optional<Timestamp> account_created_at;
  std::uint64_t follower_count = 0;   // from the latest capture
  std::uint64_t following_count = 0;
  std::size_t ads_total = 0;
  std::size_t ads_removed = 0;
};

/// One profile per author_id, in order of first appearance in `pairs`.
std::vector<AdvertiserProfile> build_advertiser_profiles(const std::vector<SnapshotPair>& pairs);

struct CreationGroup {
  std::size_t before = 0;  // account created strictly before collection start
  std::size_t after = 0;   // created at or after collection start
  std::size_t unknown = 0; // creation date not captured
  double after_fraction() const;
  double before_fraction() const;
  /// Cumulative share of accounts (with known dates) created on or before each date.
  std::vector<std::pair<Date, double>> creation_cdf;
};

struct CreationSplitReport {
  CreationGroup any_removed;
  CreationGroup none_removed;
  CreationGroup all;
};

CreationSplitReport creation_date_split(const std::vector<AdvertiserProfile>& profiles, Timestamp collection_start);

}  // namespace adaudit::moderation
