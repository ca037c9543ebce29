#include "adaudit/explicitness/scoring.hpp"

#include <cmath>

#include "adaudit/common/error.hpp"

namespace adaudit::explicitness {

bool NoTranslateSet::contains(std::string_view lang) const {
  for (const auto& l : langs_) {
    if (lang == l) return true;
    if (lang.size() > l.size() && lang.substr(0, l.size()) == l && lang[l.size()] == '-') return true;
  }
  return false;
}

ScoringResult score_texts(const std::vector<corpus::TweetRecord>& records, TranslationClient& translator,
                          ExplicitnessClient& scorer, const NoTranslateSet& no_translate) {
  ScoringResult result;
  for (const auto& r : records) {
    try {
      ExplicitScore s{r.tweet_id, 0.0, false, r.text};
      if (!no_translate.contains(r.lang)) {
        s.scored_text = translator.translate(r.text, r.lang);
        s.translated = true;
      }
      s.score = scorer.score(s.scored_text);
      if (!std::isfinite(s.score) || s.score < 0.0 || s.score > 1.0)
        fail(Errc::precondition, "score out of [0,1]: " + std::to_string(s.score));
      result.scores.push_back(std::move(s));
    } catch (const Error& e) {
      if (e.code() == Errc::quota_exceeded) throw;
      result.failures.push_back({r.tweet_id, e.what()});
    }
  }
  return result;
}

}  // namespace adaudit::explicitness
