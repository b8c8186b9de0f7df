#pragma once

namespace ivpile {

/// Standard normal CDF, computed from erfc. Accurate to ~1e-15.
double normal_cdf(double x);

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal quantile. Acklam's rational approximation refined with
/// one Halley step against normal_cdf; |error| < 1e-12 on (1e-300, 1-1e-16).
double normal_quantile(double p);

/// Mean of a Normal(mu, sigma) truncated to [a, b].
double truncated_normal_mean(double mu, double sigma, double a, double b);

}  // namespace ivpile
