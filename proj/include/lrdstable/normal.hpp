#pragma once

// Standard normal helpers shared by the samplers and the coefficient integrals.

namespace lrdstable::normal {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double pdf(double z);

/// Lower tail P(Z <= z).
double cdf(double z);

/// Upper tail P(Z > z), accurate far into the right tail.
double sf(double z);

/// log P(Z > z); finite for every finite z (asymptotic series past erfc underflow).
double log_sf(double z);

/// Inverse of cdf. Wichura's AS 241 rational approximation, relative error
/// around 1e-16. Returns -inf / +inf at p = 0 / 1.
double quantile(double p);

/// phi(Phi^{-1}(p)) where p is given through both tails (p_lower + p_upper = 1)
/// so the smaller one is used and no precision is lost near 0 or 1.
double density_at_quantile(double p_lower, double p_upper);

}  // namespace lrdstable::normal
