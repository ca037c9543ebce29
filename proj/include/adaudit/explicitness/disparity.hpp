#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "adaudit/corpus/tweet.hpp"

namespace adaudit::explicitness {

struct LanguageDisparityRow {
  std::string lang;
  std::size_t violating_moderated = 0;
  std::size_t violating_unmoderated = 0;
  double moderation_rate = 0.0;  // moderated / (moderated + unmoderated)
};

/// Sorted by moderation_rate descending, then lang ascending.
std::vector<LanguageDisparityRow> language_disparity(const std::vector<corpus::TweetRecord>& adult_moderated,
                                                     const std::vector<corpus::TweetRecord>& adult_unmoderated);

}  // namespace adaudit::explicitness
