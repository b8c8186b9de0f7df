#include "ivpile/wsvm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ivpile {

KernelSpec KernelSpec::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian kernel: sigma <= 0");
  return {Gaussian, sigma};
}

double kernel_value(const KernelSpec& kernel, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y) {
  if (kernel.kind == KernelSpec::Linear) return x.dot(y);
  return std::exp(-(x - y).squaredNorm() / (kernel.sigma * kernel.sigma));
}

Eigen::MatrixXd gram(const KernelSpec& kernel, const Eigen::MatrixXd& xs,
                     const Eigen::MatrixXd& ys) {
  if (kernel.kind == KernelSpec::Linear) return xs * ys.transpose();
  const Eigen::VectorXd xn = xs.rowwise().squaredNorm();
  const Eigen::VectorXd yn = ys.rowwise().squaredNorm();
  Eigen::MatrixXd sq = -2.0 * xs * ys.transpose();
  sq.colwise() += xn;
  sq.rowwise() += yn.transpose();
  return (sq.cwiseMax(0.0) / -(kernel.sigma * kernel.sigma)).array().exp();
}

namespace {

constexpr double kTau = 1e-12;

// Exact minimizer of the piecewise-linear primal in beta0 for fixed h:
//   P(b) = sum_t w_t (1 + y_t (b - h_t))^+
// The subgradient crosses zero at a breakpoint h_t - y_t.
double optimal_beta0(const Eigen::VectorXd& w, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& h) {
  const Eigen::Index n = w.size();
  double w_minus = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (y[i] < 0) w_minus += w[i];
  if (w_minus == 0.0) {
    // derivative is >= 0 everywhere; push beta0 below every breakpoint
    double b = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) b = std::min(b, h[i] - y[i]);
    return std::isfinite(b) ? b : 0.0;
  }
  std::vector<std::pair<double, double>> breaks;  // (breakpoint, weight)
  breaks.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    if (w[i] > 0) breaks.emplace_back(h[i] - y[i], w[i]);
  std::sort(breaks.begin(), breaks.end());
  double cum = 0.0;
  for (const auto& [b, wt] : breaks) {
    cum += wt;
    if (cum >= w_minus) return b;
  }
  return breaks.empty() ? 0.0 : breaks.back().first;
}

struct Primal {
  double value;
  double beta0;
};

Primal primal_value(const Eigen::VectorXd& w, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& h, double quad) {
  const double beta0 = optimal_beta0(w, y, h);
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    hinge += w[i] * std::max(0.0, 1.0 + y[i] * (beta0 - h[i]));
  return {hinge + 0.5 * quad, beta0};
}

}  // namespace

DualSolution solve_dual(const Eigen::VectorXd& w, const Eigen::VectorXd& e,
                        const Eigen::MatrixXd& K, double lambda, double tol,
                        long max_iter) {
  const Eigen::Index n_total = w.size();
  if (e.size() != n_total || K.rows() != n_total || K.cols() != n_total)
    throw std::invalid_argument("solve_dual: size mismatch");
  if (!(lambda > 0.0)) throw std::invalid_argument("solve_dual: lambda <= 0");
  if ((w.array() < 0.0).any())
    throw std::invalid_argument("solve_dual: negative weight");

  DualSolution sol;
  sol.q = Eigen::VectorXd::Zero(n_total);

  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < n_total; ++i)
    if (w[i] > 0.0) active.push_back(i);
  const Eigen::Index n = static_cast<Eigen::Index>(active.size());
  if (n == 0) {
    sol.degenerate = true;
    return sol;
  }

  Eigen::VectorXd wa(n), ya(n);
  Eigen::MatrixXd Ka(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    wa[i] = w[active[static_cast<std::size_t>(i)]];
    ya[i] = e[active[static_cast<std::size_t>(i)]];
    for (Eigen::Index j = 0; j < n; ++j)
      Ka(i, j) = K(active[static_cast<std::size_t>(i)],
                   active[static_cast<std::size_t>(j)]);
  }

  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ka,
                                                      Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = std::max(1.0, es.eigenvalues().maxCoeff());
    if (lmin < -1e-8 * lmax)
      throw std::runtime_error("solve_dual: Gram matrix is not PSD");
  }

  const double scale = 1.0 / (static_cast<double>(n_total) * lambda);
  const Eigen::MatrixXd Kb = Ka * scale;

  // Variables alpha_i = q_i w_i in [0, w_i]; minimize
  //   1/2 alpha' Q alpha - 1'alpha,  Q_ij = y_i y_j Kb_ij,
  // subject to sum_i y_i alpha_i = 0 (exactly maintained by pair updates).
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);

  if (max_iter <= 0)
    max_iter = std::max<long>(100000, 10L * static_cast<long>(n) *
                                          static_cast<long>(n));

  auto dual_objective = [&]() {
    // grad = Q alpha - 1, so alpha'Q alpha = alpha'(grad + 1)
    const double quad = alpha.dot(grad) + alpha.sum();
    return alpha.sum() - 0.5 * quad;
  };

  auto check_gap = [&]() {
    const double quad = alpha.dot(grad) + alpha.sum();
    Eigen::VectorXd h(n);
    for (Eigen::Index t = 0; t < n; ++t) h[t] = ya[t] * (grad[t] + 1.0);
    const Primal primal = primal_value(wa, ya, h, quad);
    const double dual = alpha.sum() - 0.5 * quad;
    const double gap = primal.value - dual;
    return std::make_pair(gap / (1.0 + std::abs(primal.value)), primal);
  };

  double eps = std::max(tol, 1e-3);
  long iter = 0;
  Primal last_primal{0.0, 0.0};
  double rel_gap = std::numeric_limits<double>::infinity();

  while (iter < max_iter) {
    // maximal-violating pair
    Eigen::Index i = -1, j = -1;
    double up_best = -std::numeric_limits<double>::infinity();
    double low_best = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -ya[t] * grad[t];
      const bool can_up = (ya[t] > 0 && alpha[t] < wa[t]) ||
                          (ya[t] < 0 && alpha[t] > 0);
      const bool can_low = (ya[t] > 0 && alpha[t] > 0) ||
                           (ya[t] < 0 && alpha[t] < wa[t]);
      if (can_up && v > up_best) {
        up_best = v;
        i = t;
      }
      if (can_low && v < low_best) {
        low_best = v;
        j = t;
      }
    }

    const bool converged_pairs = i < 0 || j < 0 || up_best - low_best < eps;
    if (converged_pairs) {
      std::tie(rel_gap, last_primal) = check_gap();
      if (rel_gap <= tol || eps <= 1e-14) break;
      eps = std::max(eps * 0.1, 1e-14);
      continue;
    }

    double delta;
    if (ya[i] != ya[j]) {
      // curvature along (delta, delta): Q_ii + Q_jj + 2 Q_ij with
      // Q_ij = y_i y_j Kb_ij = -Kb_ij here
      const double quad =
          std::max(Kb(i, i) + Kb(j, j) - 2.0 * Kb(i, j), kTau);
      delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      const double lo = std::max(0.0, diff);
      const double hi = std::min(wa[i], wa[j] + diff);
      const double ai = std::clamp(alpha[i] + delta, lo, hi);
      delta = ai - alpha[i];
      alpha[i] = ai;
      alpha[j] = ai - diff;
      for (Eigen::Index t = 0; t < n; ++t)
        grad[t] += delta * ya[t] * (ya[i] * Kb(t, i) + ya[j] * Kb(t, j));
    } else {
      const double quad =
          std::max(Kb(i, i) + Kb(j, j) - 2.0 * Kb(i, j), kTau);
      delta = (grad[j] - grad[i]) / quad;
      const double sum = alpha[i] + alpha[j];
      const double lo = std::max(0.0, sum - wa[j]);
      const double hi = std::min(wa[i], sum);
      const double ai = std::clamp(alpha[i] + delta, lo, hi);
      delta = ai - alpha[i];
      alpha[i] = ai;
      alpha[j] = sum - ai;
      for (Eigen::Index t = 0; t < n; ++t)
        grad[t] += delta * ya[t] * ya[i] * (Kb(t, i) - Kb(t, j));
    }
    ++iter;
  }

  if (!std::isfinite(rel_gap) || iter >= max_iter)
    std::tie(rel_gap, last_primal) = check_gap();

  for (Eigen::Index t = 0; t < n; ++t)
    sol.q[active[static_cast<std::size_t>(t)]] = alpha[t] / wa[t];
  sol.objective_dual = dual_objective();
  sol.objective_primal = last_primal.value;
  sol.gap = rel_gap;
  sol.iterations = iter;
  sol.beta0 = recover_intercept(sol.q, w, e, K, lambda);
  return sol;
}

double recover_intercept(const Eigen::VectorXd& q, const Eigen::VectorXd& w,
                         const Eigen::VectorXd& e, const Eigen::MatrixXd& K,
                         double lambda) {
  const Eigen::Index n = w.size();
  const double scale = 1.0 / (static_cast<double>(n) * lambda);
  // h(x_t) = sum_j q_j w_j e_j K_jt / (n lambda); f = -h + beta0
  Eigen::VectorXd h = K * (q.array() * w.array() * e.array()).matrix() * scale;

  double sum = 0.0;
  int count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (w[t] > 0 && q[t] > 1e-8 && q[t] < 1.0 - 1e-8) {
      sum += h[t] - e[t];
      ++count;
    }
  }
  if (count > 0) return sum / count;
  return optimal_beta0(w, e, h);
}

}  // namespace ivpile
