#pragma once

#include <cstddef>

#include <nlohmann/json.hpp>

namespace adaudit::report {

/// A fraction that always travels with its numerator and denominator.
/// value is 0 when the denominator is 0.
struct Ratio {
  std::size_t numerator = 0;
  std::size_t denominator = 0;
  double value = 0.0;

  static Ratio of(std::size_t num, std::size_t den);
};

/// Raw counts feeding the headline arithmetic.
struct ComplianceCounts {
  std::size_t total_ads = 0;
  std::size_t rehydrated_ads = 0;
  std::size_t removed_diff = 0;         // total - rehydrated
  std::size_t late_removed = 0;         // configured late-removal adjustment, reported separately
  std::size_t flagged_total = 0;        // explicit at threshold, all ads
  std::size_t fp_total = 0;             // false positives among those
  std::size_t flagged_retained = 0;     // explicit at threshold, rehydrated ads
  std::size_t fp_retained = 0;
  std::size_t violating_moderated = 0;  // violating ads among the removed
};

struct ComplianceSummary {
  ComplianceCounts counts;
  std::size_t removed_total = 0;          // removed_diff + late_removed
  std::size_t flagged_after_fp = 0;       // flagged_total - fp_total
  std::size_t violating_unmoderated = 0;  // flagged_retained - fp_retained
  std::size_t violating_total = 0;        // violating_moderated + violating_unmoderated

  Ratio removal_fraction;         // removed_total / total_ads
  Ratio violating_fraction;       // flagged_total / total_ads
  Ratio moderated_fraction;       // violating_moderated / violating_total
  Ratio removed_adult_fraction;   // violating_moderated / removed_total
  Ratio retained_adult_fraction;  // flagged_retained / rehydrated_ads
  Ratio false_positive_rate;      // fp_total / flagged_total
};

/// Throws inconsistent_counts when rehydrated + removed_diff != total or a
/// subset count exceeds its superset.
ComplianceSummary compliance_summary(const ComplianceCounts& counts);

nlohmann::json to_json(const Ratio& r);
nlohmann::json to_json(const ComplianceSummary& s);

}  // namespace adaudit::report
