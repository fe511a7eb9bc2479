#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace gpmisspec {

/// Matern parameters in the unnormalised form
///   R(x, y) = sigma^2 (theta |x - y|)^nu K_nu(theta |x - y|),
/// so the diagonal is sigma^2 2^{nu-1} Gamma(nu), not sigma^2.
struct MaternParams {
  double nu = 0.5;     ///< smoothness
  double theta = 1.0;  ///< range (inverse length)
  double sigma = 1.0;  ///< scale

  /// Throws Error(domain) unless all fields are finite and positive.
  void validate() const;

  friend bool operator==(const MaternParams&, const MaternParams&) = default;
};

using Point = std::span<const double>;

/// A symmetric positive-definite kernel on [0,1]^d. Immutable and cheap to
/// copy (shared implementation). Matern kernels are evaluated in long double
/// for Gram assembly; user kernels are called in double and widened.
class KernelHandle {
 public:
  using Callback = std::function<double(Point, Point)>;

  static KernelHandle matern(const MaternParams& params, std::size_t dim);
  static KernelHandle custom(Callback fn, std::size_t dim, std::string tag = "custom");

  /// The same kernel multiplied by `factor` (> 0).
  [[nodiscard]] KernelHandle scaled(double factor) const;

  [[nodiscard]] double operator()(Point x, Point y) const;
  [[nodiscard]] long double eval_wide(Point x, Point y) const;

  [[nodiscard]] std::size_t dim() const noexcept;
  [[nodiscard]] const std::optional<MaternParams>& matern_params() const noexcept;
  /// Human-readable provenance tag, e.g. the kernel-spec string.
  [[nodiscard]] const std::string& tag() const noexcept;

 private:
  struct Impl;
  explicit KernelHandle(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// sigma^2 (theta r)^nu K_nu(theta r) for r = |x - y|.
[[nodiscard]] double matern_eval(const MaternParams& params, Point x, Point y);

/// Radial profile sigma^2 (theta r)^nu K_nu(theta r) as a function of r >= 0.
[[nodiscard]] double matern_radial(const MaternParams& params, double r);

/// Spectral density 2^{nu-1} Gamma(nu + d/2) pi^{-d/2} theta^{2 nu}
/// (theta^2 + |xi|^2)^{-(nu + d/2)}. No sigma^2 factor. Note that this
/// constant is not the one obtained by transforming the kernel with
/// f^(xi) = int f(x) e^{-i xi.x} dx; only its decay matters downstream.
[[nodiscard]] double matern_spectral_density(const MaternParams& params, std::size_t d,
                                             std::span<const double> xi);

/// Sobolev order alpha = nu + d/2 of the Matern RKHS.
[[nodiscard]] double sobolev_order(const MaternParams& params, std::size_t d);

/// 2 (alpha - alpha0) / d = 2 (nu - nu0) / d.
[[nodiscard]] double rate_exponent(const MaternParams& truth, const MaternParams& model, std::size_t d);

/// Parses `matern:nu=<f>,theta=<f>,sigma=<f>`. Keys may appear in any order;
/// omitted theta/sigma default to 1. Throws Error(parse).
[[nodiscard]] MaternParams parse_kernel_spec(std::string_view spec);
[[nodiscard]] std::string format_kernel_spec(const MaternParams& params);

}  // namespace gpmisspec
