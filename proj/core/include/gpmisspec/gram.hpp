#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gpmisspec/designs.hpp"
#include "gpmisspec/kernels.hpp"

namespace gpmisspec {

/// Working precision of Gram matrices, factors and solves.
using real_t = long double;

/// Largest Gram matrix the dense routines accept.
inline constexpr std::size_t kMaxGramSize = 4096;

/// Dense symmetric matrix with provenance (kernel tag, design fingerprint).
class GramMatrix {
 public:
  GramMatrix(std::size_t n, std::vector<real_t> entries, std::string kernel_tag = {},
             std::uint64_t design_fingerprint = 0);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] real_t operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * n_ + j]; }
  [[nodiscard]] std::span<const real_t> row(std::size_t i) const noexcept { return {entries_.data() + i * n_, n_}; }
  [[nodiscard]] const std::vector<real_t>& entries() const noexcept { return entries_; }
  [[nodiscard]] const std::string& kernel_tag() const noexcept { return kernel_tag_; }
  [[nodiscard]] std::uint64_t design_fingerprint() const noexcept { return design_fingerprint_; }
  [[nodiscard]] real_t mean_diagonal() const noexcept;

 private:
  std::size_t n_;
  std::vector<real_t> entries_;
  std::string kernel_tag_;
  std::uint64_t design_fingerprint_;
};

/// entries(i, j) = kernel(x_i, x_j); the upper triangle is computed and mirrored.
[[nodiscard]] GramMatrix assemble_gram(const KernelHandle& kernel, const Design& design);

/// Vector (kernel(x, x_1), ..., kernel(x, x_N)).
[[nodiscard]] std::vector<real_t> cross_vector(const KernelHandle& kernel, const Design& design, Point x);

/// a*g1 + b*g2 for matrices of equal size.
[[nodiscard]] GramMatrix linear_combination(real_t a, const GramMatrix& g1, real_t b, const GramMatrix& g2);

/// Diagonal jitter ladder, as multiples of the mean diagonal. Factorization
/// tries each rung in order and keeps the first that succeeds.
struct JitterPolicy {
  std::vector<double> ladder;

  /// {0, 1e-12, 1e-11, ..., 1e-6}
  static JitterPolicy standard();
  /// {0}: fail instead of regularising.
  static JitterPolicy none();
};

/// Lower-triangular Cholesky factor L with L L^T = G + jitter I, stored
/// row-packed so that bordering with one more point appends a row.
class CholeskyFactor {
 public:
  CholeskyFactor() = default;

  /// Size-0 factor that will add `jitter` to every diagonal it is extended with.
  static CholeskyFactor empty(double jitter) {
    CholeskyFactor f;
    f.jitter_ = jitter;
    return f;
  }

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  /// Absolute value added to the diagonal before factorization.
  [[nodiscard]] double jitter() const noexcept { return jitter_; }
  [[nodiscard]] real_t operator()(std::size_t i, std::size_t j) const noexcept {
    return j > i ? real_t(0) : packed_[i * (i + 1) / 2 + j];
  }
  [[nodiscard]] std::span<const real_t> row(std::size_t i) const noexcept {
    return {packed_.data() + i * (i + 1) / 2, i + 1};
  }

  /// L^{-1} b
  [[nodiscard]] std::vector<real_t> solve_lower(std::span<const real_t> b) const;
  /// L^{-T} y
  [[nodiscard]] std::vector<real_t> solve_upper(std::span<const real_t> y) const;
  /// (L L^T)^{-1} b
  [[nodiscard]] std::vector<real_t> solve(std::span<const real_t> b) const;

  /// ||L L^T - (G + jitter I)||_F / ||G||_F
  [[nodiscard]] double reconstruction_error(const GramMatrix& g) const;

 private:
  friend CholeskyFactor cholesky(const GramMatrix& g, const JitterPolicy& policy);
  friend CholeskyFactor extend_factor(CholeskyFactor f, std::span<const real_t> new_cross, real_t new_diag);

  // Appends the row for a bordered matrix with off-diagonal `cross` and
  // diagonal `diag` (jitter already included). Returns the Schur complement;
  // leaves the factor untouched when it is not positive.
  real_t append_row(std::span<const real_t> cross, real_t diag);

  std::size_t n_ = 0;
  std::vector<real_t> packed_;
  double jitter_ = 0;
};

/// Factorizes g + jitter I, escalating along the policy ladder. Throws
/// NotPositiveDefinite with the failing pivot at the largest rung.
[[nodiscard]] CholeskyFactor cholesky(const GramMatrix& g, const JitterPolicy& policy = JitterPolicy::standard());

/// tr(K R^{-1}) via a forward and a (truncated) back substitution per column of K.
[[nodiscard]] double trace_product(const GramMatrix& k, const CholeskyFactor& r_factor);

/// v^T R^{-1} v = ||L^{-1} v||^2.
[[nodiscard]] double quadratic_form(std::span<const double> v, const CholeskyFactor& r_factor);
[[nodiscard]] real_t quadratic_form(std::span<const real_t> v, const CholeskyFactor& r_factor);

/// Factor of [[G, c], [c^T, diag]] given the factor of G. The parent's jitter
/// is added to `new_diag`. Throws NotPositiveDefinite (pivot = old size) when
/// the Schur complement diag - ||L^{-1} c||^2 is not positive.
[[nodiscard]] CholeskyFactor extend_factor(CholeskyFactor f, std::span<const real_t> new_cross, real_t new_diag);

/// Schur complement new_diag - ||L^{-1} c||^2 without extending.
[[nodiscard]] real_t schur_complement(const CholeskyFactor& f, std::span<const real_t> new_cross, real_t new_diag);

/// Plain-text dump: one row per line, space-separated, 17 significant digits.
[[nodiscard]] std::string format_gram(const GramMatrix& g);
void dump_gram(const GramMatrix& g, const std::string& path);

}  // namespace gpmisspec
