#pragma once

#include <Eigen/Core>
#include <vector>

#include "ivpile/nuisance.hpp"

namespace ivpile {

/// The eight conditional probabilities p(y, a | z) for y, a, z in {-1,+1}.
/// Index 0 codes -1 and index 1 codes +1 throughout.
struct EightProbs {
  double p[2][2][2] = {};  // [y][a][z]

  double& at(int y, int a, int z) {
    return p[y > 0 ? 1 : 0][a > 0 ? 1 : 0][z > 0 ? 1 : 0];
  }
  double at(int y, int a, int z) const {
    return p[y > 0 ? 1 : 0][a > 0 ? 1 : 0][z > 0 ? 1 : 0];
  }

  /// Throws std::invalid_argument unless every entry is in [0,1] and each
  /// instrument arm sums to 1 within 1e-9.
  void validate() const;
};

struct Interval {
  double l = 0.0;
  double u = 0.0;
  bool reconciled = false;  // set when an estimated crossing was collapsed
};

struct BoundMethod {
  enum Kind { BalkePearl, Siddique, ManskiPepper };
  Kind kind = BalkePearl;
  double k0 = -1.0;  // outcome bounds, ManskiPepper only
  double k1 = 1.0;

  static BoundMethod balke_pearl() { return {BalkePearl, -1.0, 1.0}; }
  static BoundMethod siddique() { return {Siddique, -1.0, 1.0}; }
  static BoundMethod manski_pepper(double k0, double k1);
};

/// Sharp CATE interval for a binary outcome under the core IV assumptions:
/// the max of eight lower candidates and min of eight upper candidates.
Interval balke_pearl(const EightProbs& p);

/// Tighter interval under the additional assumption that non-compliers choose
/// the correct arm for themselves.
Interval siddique(const EightProbs& p);

/// Interval for a bounded outcome in [k0, k1] under monotone-IV assumptions.
Interval manski_pepper(const ContinuousNuisanceModel& model,
                       const Eigen::VectorXd& x);

/// Per-row intervals: query the model, apply the bound formula, shift both
/// endpoints down by delta, and collapse any estimated crossing l > u to the
/// midpoint with reconciled = true.
std::vector<Interval> estimate_intervals(const JointProbModel& model,
                                         const Eigen::MatrixXd& xs,
                                         const BoundMethod& method,
                                         double delta);

std::vector<Interval> estimate_intervals(const ContinuousNuisanceModel& model,
                                         const Eigen::MatrixXd& xs,
                                         const BoundMethod& method,
                                         double delta);

}  // namespace ivpile
