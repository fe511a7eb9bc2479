#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gpmisspec/designs.hpp"
#include "gpmisspec/gram.hpp"
#include "gpmisspec/kernels.hpp"

namespace gpmisspec {

/// Raw negative variances down to -kVarianceClampTolerance * R(x,x) are
/// treated as roundoff and clamped to zero; anything lower is an error.
inline constexpr double kVarianceClampTolerance = 1e-8;

struct Moments {
  double mean = 0;
  double variance = 0;
  bool clamped = false;  ///< raw variance was slightly negative and set to 0
};

/// Zero-mean GP with kernel R conditioned on a design, optionally with data.
/// Immutable; queries are thread-safe.
class ConditionedModel {
 public:
  ConditionedModel(KernelHandle kernel, Design design, std::optional<std::vector<double>> data = std::nullopt,
                   const JitterPolicy& policy = JitterPolicy::standard());

  [[nodiscard]] const KernelHandle& kernel() const noexcept { return kernel_; }
  [[nodiscard]] const Design& design() const noexcept { return design_; }
  [[nodiscard]] const CholeskyFactor& factor() const noexcept { return factor_; }
  [[nodiscard]] bool has_data() const noexcept { return data_.has_value(); }
  [[nodiscard]] const std::optional<std::vector<double>>& data() const noexcept { return data_; }

  /// R(x,x) - r_N(x)^T R_N^{-1} r_N(x); needs no data.
  [[nodiscard]] Moments variance(Point x) const;

  /// Squared RKHS norm of the interpolant, f_N^T R_N^{-1} f_N.
  [[nodiscard]] double interpolant_norm_sq() const;

  /// R_N^{-1} f_N.
  [[nodiscard]] const std::vector<real_t>& weights() const;

 private:
  KernelHandle kernel_;
  Design design_;
  CholeskyFactor factor_;
  std::optional<std::vector<double>> data_;
  std::vector<real_t> weights_;
};

/// Conditional mean r_N(x)^T R_N^{-1} f_N and variance at x. Requires data.
[[nodiscard]] Moments conditional_moments(const ConditionedModel& model, Point x);

/// Kernel interpolant at each query point; `queries` is point-major with the
/// model's dimension.
[[nodiscard]] std::vector<double> interpolate(const ConditionedModel& model, std::span<const double> queries);

/// Squared worst-case error at x, over the unit ball of K1's RKHS, of the
/// interpolation operator built from K2:
///   K1(x,x) - 2 k1(x)^T K2^{-1} k2(x) + k2(x)^T K2^{-1} K1 K2^{-1} k2(x).
/// Factorizes K2 once; reuse for many query points.
class CrossWorstCaseError {
 public:
  CrossWorstCaseError(const KernelHandle& k1, const KernelHandle& k2, const Design& design,
                      const JitterPolicy& policy = JitterPolicy::standard());

  [[nodiscard]] Moments at(Point x) const;

 private:
  KernelHandle k1_;
  KernelHandle k2_;
  Design design_;
  GramMatrix k1_gram_;
  CholeskyFactor k2_factor_;
};

/// One-shot form of CrossWorstCaseError. An empty design gives K1(x,x).
[[nodiscard]] double cross_wce_sq(const KernelHandle& k1, const KernelHandle& k2, const Design& design, Point x);

}  // namespace gpmisspec
