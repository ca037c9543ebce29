#include "adaudit/clusterlab/template_pattern.hpp"

#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include "adaudit/common/error.hpp"

namespace adaudit::clusterlab {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view strip_punct(std::string_view s) {
  const auto punct = [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && punct(s.front())) s.remove_prefix(1);
  while (!s.empty() && punct(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

Lexicon::Lexicon(std::set<std::string> words) {
  for (const auto& w : words) words_.insert(lower(w));
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot open lexicon " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word) || word.front() == '#') continue;
    words.insert(word);
  }
  return Lexicon(std::move(words));
}

bool Lexicon::contains(std::string_view token) const { return words_.contains(lower(token)); }

bool matches_template(std::string_view text, const Lexicon& lexicon) {
  std::size_t start = 0;
  while (start < text.size() && std::isspace(static_cast<unsigned char>(text[start]))) ++start;
  if (start >= text.size() || text[start] != '.') return false;

  std::istringstream rest{std::string(text.substr(start + 1))};
  std::size_t tokens = 0;
  std::size_t hits = 0;
  for (std::string tok; rest >> tok;) {
    ++tokens;
    const auto core = strip_punct(tok);
    if (!core.empty() && lexicon.contains(core)) ++hits;
  }
  return tokens >= 2 && hits * 5 >= tokens * 4;
}

bool is_camelcase_name(std::string_view username) {
  static const std::regex pattern("^[A-Z][a-z]+[A-Z][a-z]+$");
  return std::regex_match(username.begin(), username.end(), pattern);
}

TemplateMatches detect_template_pattern(const std::vector<corpus::TweetRecord>& records, const Lexicon& lexicon) {
  TemplateMatches out;
  for (const auto& r : records) {
    if (matches_template(r.text, lexicon)) out.text_matches.insert(r.tweet_id);
    if (is_camelcase_name(r.username)) out.camelcase_usernames.insert(r.tweet_id);
  }
  return out;
}

}  // namespace adaudit::clusterlab
