#include "adaudit/report/summary.hpp"

#include <fmt/format.h>

#include "adaudit/common/error.hpp"

namespace adaudit::report {

Ratio Ratio::of(std::size_t num, std::size_t den) {
  return Ratio{num, den, den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den)};
}

namespace {

void check_subset(std::size_t part, std::size_t whole, const char* part_name, const char* whole_name) {
  if (part > whole)
    fail(Errc::inconsistent_counts, fmt::format("{} ({}) exceeds {} ({})", part_name, part, whole_name, whole));
}

}  // namespace

ComplianceSummary compliance_summary(const ComplianceCounts& c) {
  if (c.rehydrated_ads + c.removed_diff != c.total_ads)
    fail(Errc::inconsistent_counts, fmt::format("rehydrated ({}) + removed ({}) != total ({})", c.rehydrated_ads,
                                                c.removed_diff, c.total_ads));
  check_subset(c.late_removed, c.rehydrated_ads, "late_removed", "rehydrated_ads");
  check_subset(c.flagged_total, c.total_ads, "flagged_total", "total_ads");
  check_subset(c.fp_total, c.flagged_total, "fp_total", "flagged_total");
  check_subset(c.flagged_retained, c.rehydrated_ads, "flagged_retained", "rehydrated_ads");
  check_subset(c.fp_retained, c.flagged_retained, "fp_retained", "flagged_retained");

  ComplianceSummary s;
  s.counts = c;
  s.removed_total = c.removed_diff + c.late_removed;
  check_subset(c.violating_moderated, s.removed_total, "violating_moderated", "removed_total");
  s.flagged_after_fp = c.flagged_total - c.fp_total;
  s.violating_unmoderated = c.flagged_retained - c.fp_retained;
  s.violating_total = c.violating_moderated + s.violating_unmoderated;

  s.removal_fraction = Ratio::of(s.removed_total, c.total_ads);
  s.violating_fraction = Ratio::of(c.flagged_total, c.total_ads);
  s.moderated_fraction = Ratio::of(c.violating_moderated, s.violating_total);
  s.removed_adult_fraction = Ratio::of(c.violating_moderated, s.removed_total);
  s.retained_adult_fraction = Ratio::of(c.flagged_retained, c.rehydrated_ads);
  s.false_positive_rate = Ratio::of(c.fp_total, c.flagged_total);
  return s;
}

nlohmann::json to_json(const Ratio& r) {
  return {{"numerator", r.numerator}, {"denominator", r.denominator}, {"value", r.value}};
}

nlohmann::json to_json(const ComplianceSummary& s) {
  const auto& c = s.counts;
  return {{"counts",
           {{"total_ads", c.total_ads},
            {"rehydrated_ads", c.rehydrated_ads},
            {"removed_diff", c.removed_diff},
            {"late_removed", c.late_removed},
            {"removed_total", s.removed_total},
            {"flagged_total", c.flagged_total},
            {"fp_total", c.fp_total},
            {"flagged_after_fp", s.flagged_after_fp},
            {"flagged_retained", c.flagged_retained},
            {"fp_retained", c.fp_retained},
            {"violating_moderated", c.violating_moderated},
            {"violating_unmoderated", s.violating_unmoderated},
            {"violating_total", s.violating_total}}},
          {"ratios",
           {{"removal_fraction", to_json(s.removal_fraction)},
            {"violating_fraction", to_json(s.violating_fraction)},
            {"moderated_fraction", to_json(s.moderated_fraction)},
            {"removed_adult_fraction", to_json(s.removed_adult_fraction)},
            {"retained_adult_fraction", to_json(s.retained_adult_fraction)},
            {"false_positive_rate", to_json(s.false_positive_rate)}}}};
}

}  // namespace adaudit::report
