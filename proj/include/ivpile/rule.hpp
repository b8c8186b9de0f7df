#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

#include "ivpile/bounds.hpp"
#include "ivpile/nuisance.hpp"
#include "ivpile/transform.hpp"
#include "ivpile/wsvm.hpp"

namespace ivpile {

namespace rule_impl {
struct KernelExpansion {
  Eigen::MatrixXd support;  // m x d
  Eigen::VectorXd alpha;    // m coefficients
  double beta0 = 0.0;
  KernelSpec kernel;
};
struct PlugIn {
  JointProbModel joint;
  ContinuousNuisanceModel continuous;
  BoundMethod method;
  double delta = 0.0;
};
struct Constant {
  double sign = 1.0;
};
struct CoinFlip {
  std::uint64_t seed = 0;
};
}  // namespace rule_impl

/// An individualized treatment rule. Kernel expansions, constants, and
/// plug-in rules are deterministic in x; the coin flip is deterministic per
/// (seed, row index).
struct TreatmentRule {
  using KernelExpansion = rule_impl::KernelExpansion;
  using PlugIn = rule_impl::PlugIn;
  using Constant = rule_impl::Constant;
  using CoinFlip = rule_impl::CoinFlip;

  std::variant<KernelExpansion, PlugIn, Constant, CoinFlip> impl;

  /// Real-valued score. Kernel: f(x) = sum alpha_j k(x_j, x) + beta0, sign
  /// convention > 0 -> +1. Plug-in: u^+ - (-l)^+, sign convention >= 0 -> +1.
  double decision_value(const Eigen::VectorXd& x) const;

  /// The +/-1 decision. `row` matters only for the coin flip.
  double decide(const Eigen::VectorXd& x, Eigen::Index row = 0) const;

  Eigen::VectorXd decide_all(const Eigen::MatrixXd& xs) const;

  void save(std::ostream& out) const;
  static TreatmentRule load(std::istream& in);

  void save_file(const std::string& path) const;
  static TreatmentRule load_file(const std::string& path);
};

/// Fits the weighted kernel SVM on (xs, labels): gram -> solve_dual ->
/// recover_intercept, expansion coefficients alpha_i = -q_i w_i e_i / (n lambda).
TreatmentRule train_wsvm(const Eigen::MatrixXd& xs,
                         const std::vector<WeightedLabel>& labels,
                         const KernelSpec& kernel, double lambda,
                         double tol = 1e-6);

}  // namespace ivpile
