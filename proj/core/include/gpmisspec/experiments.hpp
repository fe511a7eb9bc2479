#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpmisspec/designs.hpp"
#include "gpmisspec/fit.hpp"
#include "gpmisspec/gram.hpp"
#include "gpmisspec/kernels.hpp"
#include "gpmisspec/mle.hpp"

namespace gpmisspec {

inline constexpr double kMinRSquared = 0.98;
inline constexpr std::size_t kTestGridPoints = 4096;
inline constexpr char kNoTheoryBanner[] = "no theoretical rate available";

/// Design of `size` points of the given family. Grids need size = m^d.
[[nodiscard]] Design make_design(DesignKind kind, std::size_t dim, std::size_t size);

/// Throws Error(domain) unless sizes are strictly increasing with >= 3 entries.
void validate_sizes(std::span<const std::size_t> sizes);

/// Row-major replicate x N matrix of sampled path values.
struct SampleMatrix {
  std::size_t replicates = 0;
  std::size_t n = 0;
  std::vector<double> values;
  double jitter = 0;

  [[nodiscard]] std::span<const double> row(std::size_t r) const { return {values.data() + r * n, n}; }
};

/// Rows L z with L the Cholesky factor of K_N and z standard normal drawn from
/// Philox keyed by (seed, replicate, coordinate). Bit-identical for identical inputs.
[[nodiscard]] SampleMatrix sample_paths(const KernelHandle& k, const Design& design, std::size_t replicates,
                                        std::uint64_t seed);

struct MonteCarloEstimate {
  double mean = 0;
  double stderr_ = 0;
  std::size_t replicates = 0;
  double jitter_true = 0;
};

/// Mean and standard error of the scale MLE over sampled paths.
[[nodiscard]] MonteCarloEstimate mc_expected_mle(const KernelHandle& truth, const KernelHandle& model,
                                                 const Design& design, std::size_t replicates, std::uint64_t seed);
[[nodiscard]] MonteCarloEstimate mc_expected_mle(const MisspecScenario& s, const Design& design,
                                                 std::size_t replicates, std::uint64_t seed);

/// 0.05 at exponent 0, 0.3 up to |exponent| 2, 0.5 beyond.
[[nodiscard]] double default_rate_tolerance(double theoretical_slope);
/// 0.2 up to |exponent| 1, 0.5 beyond.
[[nodiscard]] double default_variance_tolerance(double theoretical_slope);

struct SweepConfig {
  MisspecScenario scenario;
  DesignKind family = DesignKind::grid;
  std::vector<std::size_t> sizes;
  std::size_t fill_resolution = 65;
  std::uint64_t seed = 0;
  std::size_t replicates = 0;  ///< 0 disables Monte-Carlo
  std::optional<double> slope_tolerance;
  JitterPolicy jitter = JitterPolicy::standard();  ///< for the model Gram

  void validate() const;
};

struct SweepRow {
  std::size_t n = 0;
  double expected_mle = 0;
  std::optional<double> mc_mean;
  std::optional<double> mc_stderr;
  std::optional<double> jitter_true;
  double jitter_model = 0;
  double fill = 0;
  double separation = 0;
};

struct RateFitReport {
  MisspecScenario scenario;
  DesignKind family = DesignKind::grid;
  std::vector<SweepRow> rows;
  LogLogFit fit;
  double theoretical_slope = 0;
  double tolerance = 0;
  bool pass = false;
  bool has_theory = true;
  std::string banner;
  /// Slope over the last three sizes; differs from fit.slope when pre-asymptotic.
  std::optional<double> tail_slope;
  bool incomplete = false;
  std::vector<std::string> failures;

  [[nodiscard]] std::vector<std::size_t> sizes() const;
  [[nodiscard]] std::vector<double> values() const;
};

/// expected_mle per size, OLS of log value on log N, compared with 2 (nu - nu0) / d.
/// A size failing factorization is dropped and the report flagged incomplete.
[[nodiscard]] RateFitReport rate_sweep(const SweepConfig& cfg);

/// Points {0, 1/(m-1), ..., 1}^d with m^d close to `total` (4096 -> 4096 in d=1, 64x64 in d=2).
struct TestGrid {
  std::size_t dim = 1;
  std::size_t per_axis = 0;
  std::vector<double> coords;

  [[nodiscard]] std::size_t size() const noexcept { return coords.size() / dim; }
  [[nodiscard]] Point point(std::size_t i) const { return {coords.data() + i * dim, dim}; }
  [[nodiscard]] std::string description() const;
};

[[nodiscard]] TestGrid make_test_grid(std::size_t dim, std::size_t total = kTestGridPoints);

struct VarianceRow {
  std::size_t n = 0;
  double sup_variance = 0;
  std::vector<double> argmax;
  double jitter = 0;
  std::size_t clamped = 0;
};

struct VarianceDecayReport {
  std::string kernel_tag;
  std::string test_grid;
  std::vector<VarianceRow> rows;
  LogLogFit fit;
  double theoretical_slope = 0;  ///< -2 nu / d
  double tolerance = 0;
  bool pass = false;
};

/// Max over the test grid of the conditional variance per design, slope against -2 nu / d.
[[nodiscard]] VarianceDecayReport variance_decay_sweep(const KernelHandle& r, std::span<const Design> family,
                                                       const TestGrid& grid,
                                                       std::optional<double> slope_tolerance = std::nullopt);

/// (sum_{n<=N} n^p) / (N^{p+1} / (p+1))
[[nodiscard]] double faulhaber_ratio(unsigned p, std::size_t n);

/// True iff values are strictly increasing.
[[nodiscard]] bool strictly_increasing(std::span<const double> values);

}  // namespace gpmisspec
