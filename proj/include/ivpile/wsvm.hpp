#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace ivpile {

struct KernelSpec {
  enum Kind { Gaussian, Linear };
  Kind kind = Gaussian;
  double sigma = 1.0;  // k(x,x') = exp(-|x-x'|^2 / sigma^2)

  static KernelSpec gaussian(double sigma);
  static KernelSpec linear() { return {Linear, 1.0}; }
};

double kernel_value(const KernelSpec& kernel, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y);

/// K[i][j] = k(xs_i, ys_j).
Eigen::MatrixXd gram(const KernelSpec& kernel, const Eigen::MatrixXd& xs,
                     const Eigen::MatrixXd& ys);

struct DualSolution {
  Eigen::VectorXd q;  // n entries in [0, 1]
  double beta0 = 0.0;
  double objective_dual = 0.0;
  double objective_primal = 0.0;
  double gap = 0.0;  // relative duality gap at termination
  long iterations = 0;
  bool degenerate = false;  // all weights zero; the zero rule was returned
};

/// Maximizes the weighted-SVM dual
///   max_q  sum_i w_i q_i - 1/2 q' D q,  D_ij = w_i w_j e_i e_j K_ij / (n lambda)
/// subject to 0 <= q_i <= 1 and sum_i q_i w_i e_i = 0,
/// by SMO pairwise updates on the substituted variables alpha_i = q_i w_i.
/// Certifies a relative duality gap <= tol against the primal
///   sum_i w_i (1 + e_i f(x_i))^+ + (n lambda / 2) |f|^2.
/// K must be positive semidefinite (eigenvalues >= -1e-8 after scaling).
DualSolution solve_dual(const Eigen::VectorXd& w, const Eigen::VectorXd& e,
                        const Eigen::MatrixXd& K, double lambda,
                        double tol = 1e-6, long max_iter = 0);

/// beta0 from the KKT conditions: the mean of -e_i - g(x_i) over free support
/// vectors when any exist, otherwise the exact minimizer of the
/// piecewise-linear primal in beta0. g(x) = -(1/(n lambda)) sum_j q_j w_j e_j K_ji.
double recover_intercept(const Eigen::VectorXd& q, const Eigen::VectorXd& w,
                         const Eigen::VectorXd& e, const Eigen::MatrixXd& K,
                         double lambda);

}  // namespace ivpile
