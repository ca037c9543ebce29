#include "adaudit/explicitness/disparity.hpp"

#include <algorithm>
#include <map>

namespace adaudit::explicitness {

std::vector<LanguageDisparityRow> language_disparity(const std::vector<corpus::TweetRecord>& adult_moderated,
                                                     const std::vector<corpus::TweetRecord>& adult_unmoderated) {
  std::map<std::string, LanguageDisparityRow> rows;
  for (const auto& r : adult_moderated) {
    auto& row = rows[r.lang];
    row.lang = r.lang;
    ++row.violating_moderated;
  }
  for (const auto& r : adult_unmoderated) {
    auto& row = rows[r.lang];
    row.lang = r.lang;
    ++row.violating_unmoderated;
  }
  std::vector<LanguageDisparityRow> out;
  out.reserve(rows.size());
  for (auto& [lang, row] : rows) {
    row.moderation_rate = static_cast<double>(row.violating_moderated) /
                          static_cast<double>(row.violating_moderated + row.violating_unmoderated);
    out.push_back(row);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.moderation_rate != b.moderation_rate ? a.moderation_rate > b.moderation_rate : a.lang < b.lang;
  });
  return out;
}

}  // namespace adaudit::explicitness
