#include "ivpile/risk.hpp"

#include <cmath>
#include <stdexcept>

#include "ivpile/rng.hpp"
#include "ivpile/transform.hpp"

namespace ivpile {

RiskReport empirical_risk_upper(const TreatmentRule& rule,
                                const Eigen::MatrixXd& xs,
                                const std::vector<Interval>& intervals) {
  const Eigen::Index n = xs.rows();
  if (static_cast<Eigen::Index>(intervals.size()) != n)
    throw std::invalid_argument("empirical_risk_upper: size mismatch");
  if (n == 0) throw std::invalid_argument("empirical_risk_upper: empty input");

  RiskReport report;
  report.n_eval = n;
  double sq_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Interval& iv = intervals[static_cast<std::size_t>(i)];
    const double loss = sup_loss(iv, rule.decide(xs.row(i), i));
    const bool unlabeled = iv.l <= 0.0 && iv.u >= 0.0;
    (unlabeled ? report.r_unlabel : report.r_label) += loss;
    sq_sum += loss * loss;
  }
  const double dn = static_cast<double>(n);
  report.r_label /= dn;
  report.r_unlabel /= dn;
  report.r_upper = report.r_label + report.r_unlabel;
  if (n > 1) {
    const double var = (sq_sum / dn - report.r_upper * report.r_upper) /
                       (dn - 1.0);
    report.se_upper = std::sqrt(std::max(0.0, var));
  }
  return report;
}

double weighted_misclassification(const Eigen::VectorXd& decisions,
                                  const Eigen::VectorXd& cate_values) {
  if (decisions.size() != cate_values.size())
    throw std::invalid_argument("weighted_misclassification: size mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < decisions.size(); ++i)
    if (sgn(cate_values[i]) != sgn(decisions[i]))
      total += std::abs(cate_values[i]);
  return total / static_cast<double>(decisions.size());
}

double weighted_misclassification(const TreatmentRule& rule,
                                  const Eigen::MatrixXd& xs,
                                  const Eigen::VectorXd& cate_values) {
  return weighted_misclassification(rule.decide_all(xs), cate_values);
}

double c_dgp(const SimScenario& scn, Eigen::Index n_mc, std::uint64_t seed) {
  if (n_mc < 1) throw std::invalid_argument("c_dgp: n_mc < 1");
  const SimDraw draw = generate(scn, n_mc, seed);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n_mc; ++i) {
    const Eigen::VectorXd x = draw.table.x.row(i);
    const double cate_xu = oracle_cate_xu(scn, x, draw.u[i]);
    const double cate_x = true_cate_x(scn, x);
    // both benchmark rules assign +1 on ties, so compare the >= 0 indicators
    const bool omni = cate_xu >= 0.0;
    const bool opt = cate_x >= 0.0;
    if (omni != opt) total += std::abs(cate_xu);
  }
  return total / static_cast<double>(n_mc);
}

}  // namespace ivpile
