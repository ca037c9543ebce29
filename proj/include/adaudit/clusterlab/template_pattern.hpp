#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "adaudit/corpus/tweet.hpp"

namespace adaudit::clusterlab {

/// Lower-cased word list. File format: one word per line, blank lines and
/// lines starting with '#' ignored.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::set<std::string> words);
  static Lexicon load(const std::filesystem::path& path);

  bool contains(std::string_view token) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::set<std::string, std::less<>> words_;
};

struct TemplateMatches {
  std::set<std::string> text_matches;         // tweet ids
  std::set<std::string> camelcase_usernames;  // tweet ids whose username is FirstLast
};

/// Text rule: after leading whitespace the text starts with '.', and the rest
/// splits on whitespace into >= 2 tokens of which >= 80% are lexicon words
/// (compared case-insensitively with surrounding punctuation stripped).
bool matches_template(std::string_view text, const Lexicon& lexicon);

/// "JaneDoe": an upper-case letter, lower-case letters, then the same again.
bool is_camelcase_name(std::string_view username);

TemplateMatches detect_template_pattern(const std::vector<corpus::TweetRecord>& records, const Lexicon& lexicon);

}  // namespace adaudit::clusterlab
