#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gpmisspec/designs.hpp"
#include "gpmisspec/fit.hpp"
#include "gpmisspec/gram.hpp"
#include "gpmisspec/kernels.hpp"

namespace gpmisspec {

/// Data-generating Matern K (truth: nu0, theta0, sigma0) against model
/// Matern R (model, sigma fixed to 1) on [0,1]^d.
struct MisspecScenario {
  MaternParams truth;
  MaternParams model;
  std::size_t dim = 1;

  /// Throws Error(domain) on invalid parameters or model.sigma != 1.
  void validate() const;

  [[nodiscard]] KernelHandle truth_kernel() const;
  [[nodiscard]] KernelHandle model_kernel() const;
  [[nodiscard]] double alpha0() const { return sobolev_order(truth, dim); }
  [[nodiscard]] double alpha() const { return sobolev_order(model, dim); }
  /// 2 (alpha - alpha0) / d
  [[nodiscard]] double theoretical_slope() const { return rate_exponent(truth, model, dim); }
  /// The growth rate is only known when the model is at least as smooth as the truth.
  [[nodiscard]] bool has_rate_theory() const { return alpha() >= alpha0(); }
};

/// X^T R_N^{-1} X / N.
[[nodiscard]] double scale_mle(const KernelHandle& model, const Design& design, std::span<const double> data,
                               const JitterPolicy& policy = JitterPolicy::standard());
/// Same, reusing a factor of R_N.
[[nodiscard]] double scale_mle(const CholeskyFactor& model_factor, std::span<const double> data);

struct ExpectedMle {
  double value = 0;  ///< tr(K_N R_N^{-1}) / N
  double trace = 0;
  std::size_t n = 0;
  double jitter_model = 0;
};

/// E[sigma_hat^2] = tr(K_N R_N^{-1}) / N for X ~ N(0, K_N).
[[nodiscard]] ExpectedMle expected_mle_report(const KernelHandle& truth, const KernelHandle& model,
                                              const Design& design,
                                              const JitterPolicy& policy = JitterPolicy::standard());
[[nodiscard]] ExpectedMle expected_mle_report(const MisspecScenario& s, const Design& design,
                                              const JitterPolicy& policy = JitterPolicy::standard());
[[nodiscard]] double expected_mle(const MisspecScenario& s, const Design& design);

struct DecompositionTerm {
  std::size_t n = 0;
  double numerator = 0;    ///< worst-case error^2 over the K unit ball, R-interpolant on points < n
  double denominator = 0;  ///< R conditional variance at x_n given points < n
  double ratio_sq = 0;
  double running_mean = 0;
};

struct DecompositionReport {
  std::vector<DecompositionTerm> terms;
  double mean = 0;          ///< mean of ratio_sq over all n
  double trace_over_n = 0;  ///< tr(K_N R_N^{-1}) / N, computed column by column
  double jitter_model = 0;

  /// |mean - trace_over_n| / |trace_over_n|
  [[nodiscard]] double relative_gap() const;
};

/// Sequential form of the expected MLE: term n is the ratio of the squared
/// worst-case errors of predicting x_n from x_1..x_{n-1} over the K and R unit
/// balls. Built on a chain of bordered Cholesky extensions, O(N^3) total.
/// Throws NotPositiveDefinite naming n if an extension degenerates.
[[nodiscard]] DecompositionReport mle_decomposition(const KernelHandle& truth, const KernelHandle& model,
                                                    const Design& design,
                                                    const JitterPolicy& policy = JitterPolicy::standard());
[[nodiscard]] DecompositionReport mle_decomposition(const MisspecScenario& s, const Design& design,
                                                    const JitterPolicy& policy = JitterPolicy::standard());

struct RangeBounds {
  double lower = 0;
  double upper = 0;
};

/// Explicit bounds on E[sigma_hat^2] when nu = nu0 and only the ranges differ:
///   theta0 >= theta: [sigma0^2 (theta/theta0)^d, sigma0^2 (theta0/theta)^{2 nu0}]
///   theta >= theta0: [sigma0^2 (theta0/theta)^{2 nu0}, sigma0^2 (theta/theta0)^d]
/// Valid for any distinct points; no design is needed.
[[nodiscard]] RangeBounds matern_range_bounds(const MisspecScenario& s);

enum class TraceTrend { apparently_bounded, apparently_divergent, inconclusive };

[[nodiscard]] std::string to_string(TraceTrend trend);

inline constexpr double kBoundedSlope = 0.1;
inline constexpr double kDivergentSlope = 0.5;

struct DriscollReport {
  std::vector<std::size_t> sizes;
  std::vector<double> traces;
  LogLogFit fit;
  TraceTrend classification = TraceTrend::inconclusive;
  /// Growth of a finite trace sequence says nothing definite about N -> infinity.
  std::string label = "finite-N heuristic";
};

/// tr(K_N R_N^{-1}) along a nested family (each design a prefix of the next),
/// classified by its log-log growth slope: <= 0.1 bounded, >= 0.5 divergent.
[[nodiscard]] DriscollReport driscoll_trace(const KernelHandle& truth, const KernelHandle& model,
                                            std::span<const Design> nested);
[[nodiscard]] DriscollReport driscoll_trace(const MisspecScenario& s, std::span<const Design> nested);

/// Prefixes of `design` with the given strictly increasing sizes.
[[nodiscard]] std::vector<Design> prefix_family(const Design& design, std::span<const std::size_t> sizes);

}  // namespace gpmisspec
