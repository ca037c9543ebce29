#pragma once

#include <string>

#include "adaudit/common/service.hpp"
#include "adaudit/explicitness/scoring.hpp"

namespace adaudit::explicitness {

/// Perspective-style comment analyzer:
/// POST /v1alpha1/comments:analyze?key=KEY
///   {"comment": {"text": ...}, "languages": ["en"], "requestedAttributes": {ATTR: {}}}
/// -> attributeScores.ATTR.summaryScore.value
///
/// Cassette key: "explicit:<ATTR>:<text>".
class PerspectiveClient final : public ExplicitnessClient {
 public:
  PerspectiveClient(JsonService service, std::string attribute = "SEXUALLY_EXPLICIT");
  double score(std::string_view text) override;

 private:
  JsonService service_;
  std::string attribute_;
};

/// Google Translate v2-style endpoint:
/// POST /language/translate/v2?key=KEY {"q": text, "source": lang, "target": "en", "format": "text"}
/// -> data.translations[0].translatedText
///
/// Cassette key: "translate:<lang>:en:<text>".
class GoogleTranslateClient final : public TranslationClient {
 public:
  explicit GoogleTranslateClient(JsonService service);
  std::string translate(std::string_view text, std::string_view source_lang) override;

 private:
  JsonService service_;
};

}  // namespace adaudit::explicitness
