#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "adaudit/common/time.hpp"

namespace adaudit::corpus {

enum class MediaKind { image, video, none };

std::string_view to_string(MediaKind kind) noexcept;
std::optional<MediaKind> parse_media_kind(std::string_view text);

/// One tweet observation as captured from the stream (or from a rehydration lookup).
struct TweetRecord {
  std::string tweet_id;
  std::string author_id;
  std::string username;
  Timestamp created_at{};
  Timestamp captured_at{};
  std::string lang = "und";
  std::string text;
  std::string source;
  std::vector<std::string> embedded_urls;
  std::vector<MediaKind> media_kinds;
  std::uint64_t follower_count = 0;
  std::uint64_t following_count = 0;
  std::optional<Timestamp> account_created_at;

  bool operator==(const TweetRecord&) const = default;
};

/// Posting-application labels that identify tweets created through the ads tooling.
/// Membership is an exact, case-sensitive match on the raw source string.
class AdSourceSet {
 public:
  AdSourceSet();  // the five ads-tooling labels
  explicit AdSourceSet(std::set<std::string> sources);

  bool contains(std::string_view source) const { return sources_.find(source) != sources_.end(); }
  const std::set<std::string, std::less<>>& sources() const { return sources_; }

 private:
  std::set<std::string, std::less<>> sources_;
};

bool is_ad(const TweetRecord& record, const AdSourceSet& ad_sources);

/// Order-preserving; idempotent.
std::vector<TweetRecord> filter_ads(const std::vector<TweetRecord>& records, const AdSourceSet& ad_sources);

nlohmann::json to_json(const TweetRecord& record);
std::string serialize_tweet(const TweetRecord& record);

}  // namespace adaudit::corpus
