#include "adaudit/corpus/parse.hpp"

#include <string>

#include <nlohmann/json.hpp>

#include "adaudit/common/error.hpp"
#include "adaudit/common/url.hpp"

namespace adaudit::corpus {
namespace {

using nlohmann::json;

const std::string& required_string(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) fail(Errc::malformed_record, std::string("missing string field '") + field + "'");
  return it->get_ref<const std::string&>();
}

std::string optional_string(const json& obj, const char* field, std::string fallback) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_string()) fail(Errc::malformed_record, std::string("field '") + field + "' is not a string");
  return it->get<std::string>();
}

Timestamp timestamp_field(const json& obj, const char* field) {
  const auto& text = required_string(obj, field);
  auto ts = parse_timestamp(text);
  if (!ts) fail(Errc::malformed_record, std::string("bad timestamp in '") + field + "': " + text);
  return *ts;
}

std::uint64_t count_field(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return 0;
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0))
    fail(Errc::malformed_record, std::string("field '") + field + "' must be a non-negative integer");
  return it->get<std::uint64_t>();
}

}  // namespace

TweetRecord parse_tweet(std::string_view line, std::size_t* dropped_urls) {
  const json obj = json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) fail(Errc::malformed_record, "not a JSON object");

  TweetRecord r;
  r.tweet_id = required_string(obj, "tweet_id");
  r.author_id = required_string(obj, "author_id");
  if (r.tweet_id.empty() || r.author_id.empty()) fail(Errc::malformed_record, "empty tweet_id or author_id");
  r.created_at = timestamp_field(obj, "created_at");
  r.source = required_string(obj, "source");
  r.text = required_string(obj, "text");
  r.username = optional_string(obj, "username", "");
  r.lang = optional_string(obj, "lang", "und");
  r.captured_at = obj.contains("captured_at") && !obj["captured_at"].is_null() ? timestamp_field(obj, "captured_at")
                                                                                : r.created_at;
  if (r.captured_at < r.created_at) fail(Errc::malformed_record, "captured_at precedes created_at");
  if (obj.contains("account_created_at") && !obj["account_created_at"].is_null())
    r.account_created_at = timestamp_field(obj, "account_created_at");
  r.follower_count = count_field(obj, "follower_count");
  r.following_count = count_field(obj, "following_count");

  if (auto it = obj.find("embedded_urls"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) fail(Errc::malformed_record, "embedded_urls must be an array");
    for (const auto& u : *it) {
      if (u.is_string() && is_valid_http_url(u.get_ref<const std::string&>())) {
        r.embedded_urls.push_back(u.get<std::string>());
      } else if (dropped_urls) {
        ++*dropped_urls;
      }
    }
  }
  if (auto it = obj.find("media_kinds"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) fail(Errc::malformed_record, "media_kinds must be an array");
    for (const auto& m : *it) {
      auto kind = m.is_string() ? parse_media_kind(m.get_ref<const std::string&>()) : std::nullopt;
      if (!kind) fail(Errc::malformed_record, "unknown media kind");
      r.media_kinds.push_back(*kind);
    }
  }
  return r;
}

ParseResult parse_tweet_stream(std::istream& stream, Strictness strictness) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++result.stats.total;
    std::size_t dropped_urls = 0;
    try {
      result.records.push_back(parse_tweet(line, &dropped_urls));
      ++result.stats.parsed;
      result.stats.dropped_urls += dropped_urls;
    } catch (const Error& e) {
      if (strictness == Strictness::strict) fail(Errc::malformed_record, "line " + std::to_string(line_no) + ": " + e.what());
      ++result.stats.dropped;
    }
  }
  return result;
}

}  // namespace adaudit::corpus
