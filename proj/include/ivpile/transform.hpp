#pragma once

#include "ivpile/bounds.hpp"

namespace ivpile {

/// Generic sign convention: +1 for t > 0, -1 otherwise (including 0).
inline double sgn(double t) { return t > 0.0 ? 1.0 : -1.0; }

enum class Latent { Plus, Minus, Unlabeled };

struct WeightedLabel {
  double w = 0.0;   // >= 0
  double e = 1.0;   // -1 or +1
  Latent latent = Latent::Unlabeled;
};

/// SVM label and weight for one interval:
///   e = 1{u < 0} - 1{l > 0} - sgn(|u| - |l|) 1{[l,u] covers 0}
///   w = |u| 1{l > 0} + |l| 1{u < 0} + ||u| - |l|| 1{[l,u] covers 0}
/// An interval covering 0 with |l| = |u| gets w = 0, e = +1.
WeightedLabel weight_label(const Interval& iv);

/// eta = |u| 1{l > 0} - |l| 1{u < 0} + (|u| - |l|) 1{[l,u] covers 0}.
/// Satisfies eta = -w e for every interval.
double eta(const Interval& iv);

/// The pointwise-optimal decision: +1 iff eta >= 0. Note the boundary goes to
/// +1 here while the generic sgn maps 0 to -1.
double bayes_sign(const Interval& iv);

/// Worst case over CATE functions compatible with the interval of the
/// weighted misclassification cost of deciding `sign`.
double sup_loss(const Interval& iv, double sign);

/// Lifted and scaled hinge that convexly dominates sup_loss:
/// w (1 + e f)^+ plus the constant min(|l|, |u|) when the interval covers 0.
double surrogate_loss(const Interval& iv, double f_value);

}  // namespace ivpile
