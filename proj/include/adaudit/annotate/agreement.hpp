#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace adaudit::annotate {

struct AgreementReport {
  std::size_t n_items = 0;
  std::size_t n_annotators = 0;
  double percent_agreement = 0.0;   // fraction of items labeled unanimously
  double pairwise_agreement = 0.0;  // mean over items of agreeing rater pairs
  double fleiss_kappa = 0.0;
  std::map<std::string, double> per_category_marginals;
};

/// Fleiss' kappa from an items x categories count matrix where every row sums
/// to the same number of raters n >= 2. Throws kappa_undefined when chance
/// agreement is 1 (all ratings in one category).
double fleiss_kappa(const Eigen::MatrixXd& counts);

/// labels[i][r] is rater r's label for item i; every item must have the same
/// number of raters.
AgreementReport agreement_report(const std::vector<std::vector<std::string>>& labels);

}  // namespace adaudit::annotate
