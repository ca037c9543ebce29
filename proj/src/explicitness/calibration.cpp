#include "adaudit/explicitness/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "adaudit/common/error.hpp"

namespace adaudit::explicitness {
namespace {

int bin_count_for(double bin_width) {
  require(bin_width > 0.0 && bin_width <= 1.0, "bin_width must lie in (0,1]");
  const double n = 1.0 / bin_width;
  const long rounded = std::lround(n);
  require(std::abs(static_cast<double>(rounded) * bin_width - 1.0) < 1e-9, "bin_width must divide 1 evenly");
  return static_cast<int>(rounded);
}

int bin_of(double score, int bins) {
  const int idx = static_cast<int>(std::floor(score * bins + 1e-9));
  return std::clamp(idx, 0, bins - 1);
}

double safe_div(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::vector<std::string> stratified_sample(const std::vector<ExplicitScore>& scores, int per_bin, double bin_width,
                                           std::uint64_t seed) {
  require(per_bin >= 1, "per_bin must be >= 1");
  const int bins = bin_count_for(bin_width);
  std::vector<std::vector<std::string>> members(static_cast<std::size_t>(bins));
  for (const auto& s : scores) members[static_cast<std::size_t>(bin_of(s.score, bins))].push_back(s.tweet_id);

  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  for (auto& bin : members) {
    std::sort(bin.begin(), bin.end());
    bin.erase(std::unique(bin.begin(), bin.end()), bin.end());
    if (bin.size() > static_cast<std::size_t>(per_bin)) {
      std::shuffle(bin.begin(), bin.end(), rng);
      bin.resize(static_cast<std::size_t>(per_bin));
    }
    out.insert(out.end(), bin.begin(), bin.end());
  }
  return out;
}

double ConfusionCounts::precision() const { return safe_div(tp, tp + fp); }
double ConfusionCounts::recall() const { return safe_div(tp, tp + fn); }
double ConfusionCounts::f1() const {
  const double p = precision(), r = recall();
  return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

ConfusionCounts confusion_at(const std::vector<ExplicitScore>& scores, const std::map<std::string, bool>& labels,
                             double threshold) {
  ConfusionCounts c;
  for (const auto& s : scores) {
    auto it = labels.find(s.tweet_id);
    if (it == labels.end()) continue;
    const bool predicted = s.score >= threshold;
    if (predicted && it->second) ++c.tp;
    else if (predicted) ++c.fp;
    else if (it->second) ++c.fn;
    else ++c.tn;
  }
  return c;
}

CalibrationReport calibrate_threshold(const std::vector<ExplicitScore>& scores,
                                      const std::map<std::string, bool>& labels) {
  if (labels.empty()) fail(Errc::no_labels, "calibration requires at least one labeled item");
  std::map<std::string, const ExplicitScore*> by_id;
  for (const auto& s : scores) by_id.emplace(s.tweet_id, &s);
  std::vector<ExplicitScore> labeled;
  for (const auto& [id, label] : labels) {
    auto it = by_id.find(id);
    if (it == by_id.end()) fail(Errc::precondition, "labeled tweet has no score: " + id);
    labeled.push_back(*it->second);
  }

  CalibrationReport report;
  for (int k = 0; k < 10; ++k) report.bins.push_back({k / 10.0, (k + 1) / 10.0, 0, 0});
  for (const auto& s : labeled) {
    auto& bin = report.bins[static_cast<std::size_t>(bin_of(s.score, 10))];
    ++bin.sample_size;
    if (labels.at(s.tweet_id)) ++bin.positives;
  }

  double best_f1 = -1.0;
  for (int k = 1; k <= 9; ++k) {
    const double t = k / 10.0;
    const auto c = confusion_at(labeled, labels, t);
    report.threshold_candidates.push_back({t, c.precision(), c.recall(), c.f1(), c});
    if (c.f1() > best_f1) {
      best_f1 = c.f1();
      report.chosen_threshold = t;
    }
  }
  return report;
}

AdultPartition classify_adult(const std::vector<ExplicitScore>& scores, double threshold) {
  require(threshold > 0.0 && threshold < 1.0, "threshold must lie in (0,1)");
  AdultPartition p;
  for (const auto& s : scores) (s.score >= threshold ? p.adult : p.other).insert(s.tweet_id);
  return p;
}

std::set<std::string> apply_fp_removal(const std::set<std::string>& adult, const std::set<std::string>& fp_ids) {
  for (const auto& id : fp_ids) {
    if (!adult.count(id)) fail(Errc::unknown_false_positive, id);
  }
  std::set<std::string> out;
  std::set_difference(adult.begin(), adult.end(), fp_ids.begin(), fp_ids.end(), std::inserter(out, out.end()));
  return out;
}

}  // namespace adaudit::explicitness
