#pragma once

#include <cmath>
#include <numbers>

namespace oracle {

/// K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt by the trapezoid rule in
/// long double. The integrand is analytic and decays double-exponentially, so
/// the rule converges geometrically in the step.
inline long double bessel_k_quadrature(long double nu, long double z) {
  const long double h = 1.0L / 128;
  long double sum = 0.5L * std::exp(-z);
  for (long double t = h;; t += h) {
    const long double log_term = -z * std::cosh(t) + std::abs(nu) * t;
    const long double term = std::exp(-z * std::cosh(t)) * std::cosh(nu * t);
    sum += term;
    if (log_term < -80 && t > 1) break;
  }
  return sum * h;
}

/// Explicit closed forms for the first half-integer orders.
inline double bessel_k_half(int twice_nu, double z) {
  const double base = std::sqrt(std::numbers::pi / (2 * z)) * std::exp(-z);
  switch (twice_nu) {
    case 1: return base;
    case 3: return base * (1 + 1 / z);
    case 5: return base * (1 + 3 / z + 3 / (z * z));
    case 7: return base * (1 + 6 / z + 15 / (z * z) + 15 / (z * z * z));
    default: return std::nan("");
  }
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace oracle
