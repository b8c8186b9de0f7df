#include "ivpile/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ivpile {

void EightProbs::validate() const {
  for (int z = 0; z < 2; ++z) {
    double sum = 0.0;
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a) {
        double v = p[y][a][z];
        if (!(v >= 0.0 && v <= 1.0))
          throw std::invalid_argument("EightProbs entry outside [0, 1]");
        sum += v;
      }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("EightProbs arm does not sum to 1");
  }
}

BoundMethod BoundMethod::manski_pepper(double k0, double k1) {
  if (!(k0 < k1))
    throw std::invalid_argument("manski_pepper requires k0 < k1");
  return {ManskiPepper, k0, k1};
}

Interval balke_pearl(const EightProbs& pr) {
  pr.validate();
  auto p = [&](int y, int a, int z) { return pr.at(y, a, z); };

  const double lower[8] = {
      p(-1, -1, -1) + p(1, 1, 1) - 1,
      p(-1, -1, 1) + p(1, 1, 1) - 1,
      p(1, 1, -1) + p(-1, -1, 1) - 1,
      p(-1, -1, -1) + p(1, 1, -1) - 1,
      2 * p(-1, -1, -1) + p(1, 1, -1) + p(1, -1, 1) + p(1, 1, 1) - 2,
      p(-1, -1, -1) + 2 * p(1, 1, -1) + p(-1, -1, 1) + p(-1, 1, 1) - 2,
      p(1, -1, -1) + p(1, 1, -1) + 2 * p(-1, -1, 1) + p(1, 1, 1) - 2,
      p(-1, -1, -1) + p(-1, 1, -1) + p(-1, -1, 1) + 2 * p(1, 1, 1) - 2,
  };
  const double upper[8] = {
      1 - p(1, -1, -1) - p(-1, 1, 1),
      1 - p(-1, 1, -1) - p(1, -1, 1),
      1 - p(-1, 1, -1) - p(1, -1, -1),
      1 - p(-1, 1, 1) - p(1, -1, 1),
      2 - 2 * p(-1, 1, -1) - p(1, -1, -1) - p(1, -1, 1) - p(1, 1, 1),
      2 - p(-1, 1, -1) - 2 * p(1, -1, -1) - p(-1, -1, 1) - p(-1, 1, 1),
      2 - p(1, -1, -1) - p(1, 1, -1) - 2 * p(-1, 1, 1) - p(1, -1, 1),
      2 - p(-1, -1, -1) - p(-1, 1, -1) - p(-1, 1, 1) - 2 * p(1, -1, 1),
  };

  Interval iv;
  iv.l = *std::max_element(lower, lower + 8);
  iv.u = *std::min_element(upper, upper + 8);
  return iv;
}

Interval siddique(const EightProbs& pr) {
  pr.validate();
  auto p = [&](int y, int a, int z) { return pr.at(y, a, z); };
  auto pa = [&](int a, int z) { return p(1, a, z) + p(-1, a, z); };

  Interval iv;
  iv.l = std::max(p(1, 1, 1) + p(1, -1, 1), p(1, 1, -1)) -
         std::min(p(1, -1, -1) + pa(1, -1), p(1, -1, 1) + pa(1, 1));
  iv.u = std::min(p(1, 1, 1) + pa(-1, 1), p(1, 1, -1) + pa(-1, -1)) -
         std::max(p(1, -1, -1) + p(1, 1, -1), p(1, -1, 1));
  return iv;
}

namespace {

// psi_{z,a}(K) = E[Y | Z=z, A=a, X] P(A=a | Z=z, X) + K P(A!=a | Z=z, X)
double psi(const ContinuousNuisanceModel& m, double z, double a,
           const Eigen::VectorXd& x, double k) {
  const double pa1 = m.pa(z, x);
  const double p_a = a > 0 ? pa1 : 1.0 - pa1;
  return m.mu_at(z, a, x) * p_a + k * (1.0 - p_a);
}

}  // namespace

Interval manski_pepper(const ContinuousNuisanceModel& m,
                       const Eigen::VectorXd& x) {
  if (!m.fitted())
    throw std::logic_error("manski_pepper: nuisance model not fitted");
  if (!(m.k0 < m.k1))
    throw std::invalid_argument("manski_pepper requires k0 < k1");
  const double pz1 = m.pz(x);
  const double pz0 = 1.0 - pz1;
  const double k0 = m.k0, k1 = m.k1;

  // low instrument arm is z = -1, high is z = +1
  const double lo_t_k0 = psi(m, -1, +1, x, k0);
  const double hi_t_k0 = psi(m, +1, +1, x, k0);
  const double lo_t_k1 = psi(m, -1, +1, x, k1);
  const double hi_t_k1 = psi(m, +1, +1, x, k1);
  const double lo_c_k0 = psi(m, -1, -1, x, k0);
  const double hi_c_k0 = psi(m, +1, -1, x, k0);
  const double lo_c_k1 = psi(m, -1, -1, x, k1);
  const double hi_c_k1 = psi(m, +1, -1, x, k1);

  Interval iv;
  iv.l = pz0 * lo_t_k0 + pz1 * std::max(lo_t_k0, hi_t_k0) -
         pz0 * std::min(lo_c_k1, hi_c_k1) - pz1 * hi_c_k1;
  iv.u = pz0 * std::min(lo_t_k1, hi_t_k1) + pz1 * hi_t_k1 -
         pz0 * lo_c_k0 - pz1 * std::max(lo_c_k0, hi_c_k0);
  return iv;
}

namespace {

Interval finalize(Interval iv, double delta) {
  iv.l -= delta;
  iv.u -= delta;
  if (iv.l > iv.u) {
    const double mid = 0.5 * (iv.l + iv.u);
    iv.l = iv.u = mid;
    iv.reconciled = true;
  }
  return iv;
}

}  // namespace

std::vector<Interval> estimate_intervals(const JointProbModel& model,
                                         const Eigen::MatrixXd& xs,
                                         const BoundMethod& method,
                                         double delta) {
  if (method.kind == BoundMethod::ManskiPepper)
    throw std::invalid_argument(
        "estimate_intervals: ManskiPepper needs a continuous nuisance model");
  if (!model.fitted())
    throw std::logic_error("estimate_intervals: model not fitted");
  std::vector<Interval> out(static_cast<std::size_t>(xs.rows()));
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const Eigen::VectorXd x = xs.row(i);
    EightProbs pr;
    for (int zi = 0; zi < 2; ++zi) {
      const Eigen::Vector4d v = model.predict4(zi == 0 ? -1.0 : 1.0, x);
      for (int cls = 0; cls < 4; ++cls)
        pr.p[cls / 2][cls % 2][zi] = v[cls];
    }
    Interval raw = method.kind == BoundMethod::BalkePearl ? balke_pearl(pr)
                                                          : siddique(pr);
    out[static_cast<std::size_t>(i)] = finalize(raw, delta);
  }
  return out;
}

std::vector<Interval> estimate_intervals(const ContinuousNuisanceModel& model,
                                         const Eigen::MatrixXd& xs,
                                         const BoundMethod& method,
                                         double delta) {
  if (method.kind != BoundMethod::ManskiPepper)
    throw std::invalid_argument(
        "estimate_intervals: binary bound methods need a joint probability model");
  std::vector<Interval> out(static_cast<std::size_t>(xs.rows()));
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const Eigen::VectorXd x = xs.row(i);
    out[static_cast<std::size_t>(i)] = finalize(manski_pepper(model, x), delta);
  }
  return out;
}

}  // namespace ivpile
