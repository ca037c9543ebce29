#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "adaudit/explicitness/scoring.hpp"

namespace adaudit::explicitness {

/// Up to `per_bin` ids drawn without replacement from each [k*w, (k+1)*w) score
/// bin (the last bin is closed at 1). Deterministic for a fixed seed and
/// independent of input order.
std::vector<std::string> stratified_sample(const std::vector<ExplicitScore>& scores, int per_bin, double bin_width,
                                           std::uint64_t seed);

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision() const;
  double recall() const;
  double f1() const;  // 0 when nothing is predicted positive
};

struct CalibrationBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t sample_size = 0;
  std::size_t positives = 0;
};

struct ThresholdCandidate {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionCounts counts;
};

struct CalibrationReport {
  std::vector<CalibrationBin> bins;                    // [0,1) in 0.1 steps
  std::vector<ThresholdCandidate> threshold_candidates;  // 0.1 .. 0.9
  double chosen_threshold = 0.0;
};

/// Predict positive iff score >= t. Confusion counts for one threshold.
ConfusionCounts confusion_at(const std::vector<ExplicitScore>& scores, const std::map<std::string, bool>& labels,
                             double threshold);

/// F1 sweep over t in {0.1,...,0.9}; argmax f1, ties to the lowest t.
/// Throws no_labels for an empty label map and precondition when a labeled id has no score.
CalibrationReport calibrate_threshold(const std::vector<ExplicitScore>& scores, const std::map<std::string, bool>& labels);

struct AdultPartition {
  std::set<std::string> adult;
  std::set<std::string> other;
};

/// Inclusive boundary: score >= threshold is adult. threshold must lie in (0,1).
AdultPartition classify_adult(const std::vector<ExplicitScore>& scores, double threshold);

/// adult \ fp_ids; throws unknown_false_positive if an fp id is not in `adult`.
std::set<std::string> apply_fp_removal(const std::set<std::string>& adult, const std::set<std::string>& fp_ids);

}  // namespace adaudit::explicitness
