#include "ivpile/transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ivpile {

namespace {

void check(const Interval& iv) {
  if (!(iv.l <= iv.u))
    throw std::invalid_argument("interval has l > u");
}

}  // namespace

WeightedLabel weight_label(const Interval& iv) {
  check(iv);
  WeightedLabel wl;
  if (iv.l > 0.0) {
    wl.latent = Latent::Plus;
    wl.e = -1.0;
    wl.w = std::abs(iv.u);
  } else if (iv.u < 0.0) {
    wl.latent = Latent::Minus;
    wl.e = 1.0;
    wl.w = std::abs(iv.l);
  } else {
    wl.latent = Latent::Unlabeled;
    wl.e = -sgn(std::abs(iv.u) - std::abs(iv.l));
    wl.w = std::abs(std::abs(iv.u) - std::abs(iv.l));
  }
  return wl;
}

double eta(const Interval& iv) {
  check(iv);
  if (iv.l > 0.0) return std::abs(iv.u);
  if (iv.u < 0.0) return -std::abs(iv.l);
  return std::abs(iv.u) - std::abs(iv.l);
}

double bayes_sign(const Interval& iv) { return eta(iv) >= 0.0 ? 1.0 : -1.0; }

double sup_loss(const Interval& iv, double sign) {
  check(iv);
  const bool not_plus = sign != 1.0;
  const bool not_minus = sign != -1.0;
  if (iv.l > 0.0) return not_plus ? std::abs(iv.u) : 0.0;
  if (iv.u < 0.0) return not_minus ? std::abs(iv.l) : 0.0;
  return std::max(not_plus ? std::abs(iv.u) : 0.0,
                  not_minus ? std::abs(iv.l) : 0.0);
}

double surrogate_loss(const Interval& iv, double f_value) {
  const WeightedLabel wl = weight_label(iv);
  const double hinge = std::max(0.0, 1.0 + wl.e * f_value);
  const double constant =
      wl.latent == Latent::Unlabeled ? std::min(std::abs(iv.l), std::abs(iv.u))
                                     : 0.0;
  return wl.w * hinge + constant;
}

}  // namespace ivpile
