#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "adaudit/corpus/tweet.hpp"

namespace adaudit::explicitness {

struct ExplicitScore {
  std::string tweet_id;
  double score = 0.0;  // in [0,1]
  bool translated = false;
  std::string scored_text;  // exactly what was sent to the scorer
};

class TranslationClient {
 public:
  virtual ~TranslationClient() = default;
  /// Translate `text` (detected language `source_lang`) into English.
  virtual std::string translate(std::string_view text, std::string_view source_lang) = 0;
};

class ExplicitnessClient {
 public:
  virtual ~ExplicitnessClient() = default;
  /// Probability-like score in [0,1] for the configured attribute.
  virtual double score(std::string_view text) = 0;
};

struct ScoreFailure {
  std::string tweet_id;
  std::string reason;
};

struct ScoringResult {
  std::vector<ExplicitScore> scores;
  std::vector<ScoreFailure> failures;  // missing scores; never defaulted to 0
};

/// Languages sent to the scorer untranslated. A code matches when it equals an
/// entry or starts with "<entry>-" (so "en" covers "en-GB").
class NoTranslateSet {
 public:
  NoTranslateSet() : langs_{"en"} {}
  explicit NoTranslateSet(std::set<std::string> langs) : langs_(std::move(langs)) {}
  bool contains(std::string_view lang) const;

 private:
  std::set<std::string> langs_;
};

/// Per-record failures (service_unavailable after retries, cassette_miss, out-of-range
/// scores) are recorded and scoring continues; quota_exceeded aborts the batch.
ScoringResult score_texts(const std::vector<corpus::TweetRecord>& records, TranslationClient& translator,
                          ExplicitnessClient& scorer, const NoTranslateSet& no_translate = {});

}  // namespace adaudit::explicitness
