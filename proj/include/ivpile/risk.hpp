#pragma once

#include <Eigen/Core>
#include <vector>

#include "ivpile/rule.hpp"
#include "ivpile/simlab.hpp"

namespace ivpile {

struct RiskReport {
  double r_upper = 0.0;    // r_label + r_unlabel
  double r_label = 0.0;    // contribution of strictly signed intervals
  double r_unlabel = 0.0;  // contribution of intervals covering zero
  double se_upper = 0.0;
  Eigen::Index n_eval = 0;
};

/// Mean over rows of sup_loss(interval_i, decision_i), split into labeled and
/// unlabeled contributions.
RiskReport empirical_risk_upper(const TreatmentRule& rule,
                                const Eigen::MatrixXd& xs,
                                const std::vector<Interval>& intervals);

/// Mean of |cate_i| over rows where the rule's sign disagrees with
/// sgn(cate_i).
double weighted_misclassification(const TreatmentRule& rule,
                                  const Eigen::MatrixXd& xs,
                                  const Eigen::VectorXd& cate_values);

/// As above with precomputed decisions (avoids re-evaluating the rule).
double weighted_misclassification(const Eigen::VectorXd& decisions,
                                  const Eigen::VectorXd& cate_values);

/// Monte Carlo estimate of the gap between the omniscient rule sgn(CATE(X,U))
/// and the best X-measurable rule sgn(CATE(X)):
/// E[|CATE(X,U)| 1{sgn CATE(X,U) != sgn CATE(X)}].
double c_dgp(const SimScenario& scn, Eigen::Index n_mc, std::uint64_t seed);

}  // namespace ivpile
