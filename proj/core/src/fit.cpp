#include "gpmisspec/fit.hpp"

#include <cmath>
#include <vector>

#include "gpmisspec/error.hpp"

namespace gpmisspec {

LogLogFit fit_loglog(std::span<const double> sizes, std::span<const double> values) {
  if (sizes.size() != values.size()) throw Error(ErrorCode::dimension_mismatch, "sizes and values differ in length");
  if (sizes.size() < 3) throw Error(ErrorCode::domain, "log-log fit needs at least 3 points");
  const std::size_t m = sizes.size();
  std::vector<double> lx(m);
  std::vector<double> ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(sizes[i] > 0) || !(values[i] > 0) || !std::isfinite(values[i])) {
      throw Error(ErrorCode::domain, "log-log fit needs positive finite sizes and values (point " +
                                         std::to_string(i) + ")");
    }
    lx[i] = std::log(sizes[i]);
    ly[i] = std::log(values[i]);
  }
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0;
  double sxy = 0;
  double syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0) throw Error(ErrorCode::domain, "log-log fit needs at least two distinct sizes");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  // Constant data: the fit is exact even though there is no variance to explain.
  fit.r_squared = syy <= 1e-30 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

LogLogFit fit_loglog(std::span<const std::size_t> sizes, std::span<const double> values) {
  std::vector<double> s(sizes.begin(), sizes.end());
  return fit_loglog(std::span<const double>(s), values);
}

}  // namespace gpmisspec
