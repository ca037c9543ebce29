#include "adaudit/annotate/agreement.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "adaudit/common/error.hpp"

namespace adaudit::annotate {

namespace {

struct Components {
  double p_bar = 0.0;
  double p_e = 0.0;
  Eigen::VectorXd marginals;
};

Components fleiss_components(const Eigen::MatrixXd& counts) {
  require(counts.rows() > 0 && counts.cols() > 0, "fleiss: empty count matrix");
  const Eigen::VectorXd raters = counts.rowwise().sum();
  const double n = raters(0);
  if ((raters.array() - n).abs().maxCoeff() > 1e-9)
    fail(Errc::inconsistent_counts, "fleiss: items were rated by different numbers of raters");
  require(n >= 2.0, "fleiss: need at least two raters per item");
  require((counts.array() >= 0.0).all(), "fleiss: negative count");

  const double items = static_cast<double>(counts.rows());
  Components c;
  c.marginals = counts.colwise().sum().transpose() / (items * n);
  const Eigen::VectorXd p_i = (counts.array().square().rowwise().sum() - n) / (n * (n - 1.0));
  c.p_bar = p_i.mean();
  c.p_e = c.marginals.squaredNorm();
  return c;
}

}  // namespace

double fleiss_kappa(const Eigen::MatrixXd& counts) {
  const auto c = fleiss_components(counts);
  if (c.p_e >= 1.0 - 1e-12) fail(Errc::kappa_undefined, "fleiss: chance agreement is 1");
  return (c.p_bar - c.p_e) / (1.0 - c.p_e);
}

AgreementReport agreement_report(const std::vector<std::vector<std::string>>& labels) {
  AgreementReport report;
  report.n_items = labels.size();
  if (labels.empty()) fail(Errc::incomplete, "agreement over zero items");
  report.n_annotators = labels.front().size();

  std::set<std::string> categories;
  for (const auto& item : labels) {
    if (item.size() != report.n_annotators)
      fail(Errc::inconsistent_counts, fmt::format("item has {} labels, expected {}", item.size(), report.n_annotators));
    categories.insert(item.begin(), item.end());
  }
  const std::vector<std::string> cats(categories.begin(), categories.end());
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(cats.size()));
  std::size_t unanimous = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (const auto& l : labels[i]) {
      const auto j = std::lower_bound(cats.begin(), cats.end(), l) - cats.begin();
      counts(static_cast<Eigen::Index>(i), j) += 1.0;
    }
    if (std::all_of(labels[i].begin(), labels[i].end(), [&](const std::string& l) { return l == labels[i].front(); }))
      ++unanimous;
  }
  report.percent_agreement = static_cast<double>(unanimous) / static_cast<double>(labels.size());

  const auto c = fleiss_components(counts);
  report.pairwise_agreement = c.p_bar;
  for (std::size_t j = 0; j < cats.size(); ++j) report.per_category_marginals[cats[j]] = c.marginals(static_cast<Eigen::Index>(j));
  report.fleiss_kappa = fleiss_kappa(counts);
  return report;
}

}  // namespace adaudit::annotate
