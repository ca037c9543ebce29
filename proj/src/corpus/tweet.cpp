#include "adaudit/corpus/tweet.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace adaudit::corpus {

std::string_view to_string(MediaKind kind) noexcept {
  switch (kind) {
    case MediaKind::image: return "image";
    case MediaKind::video: return "video";
    case MediaKind::none: return "none";
  }
  return "none";
}

std::optional<MediaKind> parse_media_kind(std::string_view text) {
  if (text == "image" || text == "photo") return MediaKind::image;
  if (text == "video" || text == "animated_gif") return MediaKind::video;
  if (text == "none") return MediaKind::none;
  return std::nullopt;
}

AdSourceSet::AdSourceSet()
    : sources_{"Twitter Ads", "Twitter for Advertisers", "Twitter for Advertisers (legacy)", "simpleads-ui",
               "advertiser-interface"} {}

AdSourceSet::AdSourceSet(std::set<std::string> sources) : sources_(sources.begin(), sources.end()) {}

bool is_ad(const TweetRecord& record, const AdSourceSet& ad_sources) { return ad_sources.contains(record.source); }

std::vector<TweetRecord> filter_ads(const std::vector<TweetRecord>& records, const AdSourceSet& ad_sources) {
  std::vector<TweetRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [&](const TweetRecord& r) { return is_ad(r, ad_sources); });
  return out;
}

nlohmann::json to_json(const TweetRecord& r) {
  nlohmann::json media = nlohmann::json::array();
  for (auto m : r.media_kinds) media.push_back(std::string(to_string(m)));
  nlohmann::json j = {
      {"tweet_id", r.tweet_id},
      {"author_id", r.author_id},
      {"username", r.username},
      {"created_at", format_timestamp(r.created_at)},
      {"captured_at", format_timestamp(r.captured_at)},
      {"lang", r.lang},
      {"text", r.text},
      {"source", r.source},
      {"embedded_urls", r.embedded_urls},
      {"media_kinds", media},
      {"follower_count", r.follower_count},
      {"following_count", r.following_count},
  };
  if (r.account_created_at) j["account_created_at"] = format_timestamp(*r.account_created_at);
  return j;
}

std::string serialize_tweet(const TweetRecord& record) { return to_json(record).dump(); }

}  // namespace adaudit::corpus
