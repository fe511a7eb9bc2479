#pragma once

// Special functions for the Matern family: log-Gamma and the modified Bessel
// function of the second kind K_nu for real order nu >= 0.
//
// Half-integer orders use the finite exponential-polynomial form
//   K_{n+1/2}(z) = sqrt(pi/(2z)) e^{-z} sum_{k=0}^{n} (n+k)!/(k!(n-k)!) (2z)^{-k}.
// Other orders go through Temme's series (z < 2) or Steed's continued
// fraction (z >= 2) for |mu| <= 1/2 followed by forward recurrence, which is
// stable for K.
//
// Everything here is a pure function and safe to call concurrently.

namespace gpmisspec {

enum class BesselEvalMode { half_integer, numeric };

/// z below which scaled_matern_radial switches to its small-argument expansion.
inline constexpr double kSmallArgumentThreshold = 1e-8;

/// half_integer iff nu is one of 1/2, 3/2, 5/2, ... (up to 201/2).
[[nodiscard]] BesselEvalMode select_bessel_mode(double nu) noexcept;

/// ln Gamma(x) for x > 0.
[[nodiscard]] double log_gamma(double x);

struct BesselResult {
  double value = 0.0;
  bool underflow = false;
  BesselEvalMode mode = BesselEvalMode::numeric;
};

/// K_nu(z) with mode and underflow reporting. Results below the smallest
/// normal double are returned as 0 with `underflow` set.
[[nodiscard]] BesselResult bessel_k_eval(double nu, double z);

/// K_nu(z), nu >= 0, z > 0.
[[nodiscard]] double bessel_k(double nu, double z);

/// General-order path regardless of nu. Accepts negative nu (K_{-nu} = K_nu).
[[nodiscard]] double bessel_k_numeric(double nu, double z);

/// Closed form; nu must be a half-integer.
[[nodiscard]] double bessel_k_half_integer(double nu, double z);

/// z^nu K_nu(z) for z > 0, with the limit 2^{nu-1} Gamma(nu) at z = 0.
/// Below kSmallArgumentThreshold the limit plus its leading corrections is used.
[[nodiscard]] double scaled_matern_radial(double nu, double z);

/// Same as scaled_matern_radial, evaluated in long double throughout. Used for
/// Gram assembly where double-rounded entries would swamp the smallest
/// eigenvalues of smooth kernels.
[[nodiscard]] long double scaled_matern_radial_wide(long double nu, long double z);

/// 2^{nu-1} Gamma(nu), the z -> 0 limit of z^nu K_nu(z).
[[nodiscard]] double scaled_matern_radial_limit(double nu);

}  // namespace gpmisspec
