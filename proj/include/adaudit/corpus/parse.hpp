#pragma once

#include <cstddef>
#include <istream>
#include <string_view>
#include <vector>

#include "adaudit/corpus/tweet.hpp"

namespace adaudit::corpus {

enum class Strictness { strict, lenient };

struct ParseStats {
  std::size_t total = 0;    // non-blank lines seen
  std::size_t parsed = 0;
  std::size_t dropped = 0;  // malformed lines skipped (lenient only)
  std::size_t dropped_urls = 0;

  bool operator==(const ParseStats&) const = default;
};

struct ParseResult {
  std::vector<TweetRecord> records;
  ParseStats stats;
};

/// Parses a single JSON object. Throws Errc::malformed_record. Invalid or
/// non-http(s) URLs are removed from embedded_urls and counted in `dropped_urls`.
TweetRecord parse_tweet(std::string_view line, std::size_t* dropped_urls = nullptr);

/// Newline-delimited records. Blank lines are ignored entirely. In strict mode
/// the first malformed line throws malformed_record naming its 1-based line number.
ParseResult parse_tweet_stream(std::istream& stream, Strictness strictness);

}  // namespace adaudit::corpus
