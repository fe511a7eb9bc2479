#pragma once

#include <cstddef>
#include <span>

namespace gpmisspec {

struct LogLogFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
};

/// Ordinary least squares of ln(value) on ln(size). Needs >= 3 points and
/// positive values. r_squared is 1 when the values are exactly constant.
[[nodiscard]] LogLogFit fit_loglog(std::span<const double> sizes, std::span<const double> values);
[[nodiscard]] LogLogFit fit_loglog(std::span<const std::size_t> sizes, std::span<const double> values);

}  // namespace gpmisspec
