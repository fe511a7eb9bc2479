#include "selftest.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "gpmisspec/experiments.hpp"
#include "gpmisspec/gp_core.hpp"
#include "gpmisspec/mle.hpp"
#include "gpmisspec/report.hpp"
#include "gpmisspec/specfun.hpp"

namespace gpmisspec::cli {
namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

SelftestCheck run(const std::string& name, const std::function<SelftestCheck()>& body) {
  try {
    SelftestCheck c = body();
    c.name = name;
    return c;
  } catch (const std::exception& e) {
    return {name, false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

std::vector<SelftestCheck> run_selftest() {
  std::vector<SelftestCheck> checks;

  checks.push_back(run("bessel-half-integer", [] {
    double worst = 0;
    for (double z : {0.01, 0.5, 1.0, 3.0, 10.0, 25.0}) {
      // K_{3/2}(z) = sqrt(pi/(2z)) e^{-z} (1 + 1/z)
      const double exact = std::sqrt(M_PI / (2 * z)) * std::exp(-z) * (1 + 1 / z);
      worst = std::max(worst, rel(bessel_k_numeric(1.5, z), exact));
      worst = std::max(worst, rel(bessel_k(1.5, z), exact));
    }
    return SelftestCheck{"", worst <= 1e-10, "max rel err " + sci(worst)};
  }));

  checks.push_back(run("unbiased-scale", [] {
    const MisspecScenario s{{0.5, 1, 2}, {0.5, 1, 1}, 1};
    const double v = expected_mle(s, gen_grid(1, 64));
    return SelftestCheck{"", rel(v, 4.0) <= 1e-8, "E = " + format_double(v)};
  }));

  checks.push_back(run("decomposition-identity", [] {
    const MisspecScenario s{{0.5, 1, 1}, {1.5, 1, 1}, 1};
    const auto r = mle_decomposition(s, gen_halton(1, 64));
    return SelftestCheck{"", r.relative_gap() <= 1e-8, "rel gap " + sci(r.relative_gap())};
  }));

  checks.push_back(run("range-bounds", [] {
    const MisspecScenario s{{1.5, 2, 1}, {1.5, 1, 1}, 1};
    const auto b = matern_range_bounds(s);
    const double v = expected_mle(s, gen_grid(1, 64));
    return SelftestCheck{"", b.lower <= v && v <= b.upper,
                         format_double(b.lower) + " <= " + format_double(v) + " <= " + format_double(b.upper)};
  }));

  checks.push_back(run("driscoll-anchor", [] {
    const MisspecScenario s{{1.5, 1, 1}, {1.5, 1, 1}, 1};
    const std::vector<std::size_t> sizes{16, 32, 64};
    const auto family = prefix_family(gen_halton(1, 64), sizes);
    const auto r = driscoll_trace(s, family);
    double worst = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) worst = std::max(worst, rel(r.traces[i], double(sizes[i])));
    return SelftestCheck{"", worst <= 1e-8 && std::abs(r.fit.slope - 1) <= 0.02,
                         "max rel err " + sci(worst) + ", slope " + format_double(r.fit.slope)};
  }));

  checks.push_back(run("cross-wce-equals-variance", [] {
    const auto k = KernelHandle::matern({1.5, 2, 1}, 2);
    const Design d = gen_halton(2, 40);
    const ConditionedModel m(k, d);
    const CrossWorstCaseError w(k, k, d);
    double worst = 0;
    for (std::size_t i = 0; i < 5; ++i) {
      const std::vector<double> x{0.1 + 0.17 * double(i), 0.9 - 0.13 * double(i)};
      worst = std::max(worst, rel(w.at(x).variance, m.variance(x).variance));
    }
    return SelftestCheck{"", worst <= 1e-10, "max rel err " + sci(worst)};
  }));

  checks.push_back(run("sampling-determinism", [] {
    const auto k = KernelHandle::matern({0.5, 1, 1}, 1);
    const Design d = gen_grid(1, 16);
    const auto a = sample_paths(k, d, 8, 99);
    const auto b = sample_paths(k, d, 8, 99);
    return SelftestCheck{"", a.values == b.values, "8 x 16 draws"};
  }));

  checks.push_back(run("loglog-fit", [] {
    const std::vector<double> n{10, 20, 40, 80}, v{300, 1200, 4800, 19200};
    const auto f = fit_loglog(n, v);
    return SelftestCheck{"", std::abs(f.slope - 2) <= 1e-12 && std::abs(f.r_squared - 1) <= 1e-12,
                         "slope " + format_double(f.slope)};
  }));

  checks.push_back(run("decimal-round-trip", [] {
    bool ok = true;
    for (double v : {0.1, 1.0 / 3.0, 2.2250738585072014e-308, 1.7976931348623157e308, 142600.95534241566}) {
      ok = ok && std::strtod(format_double(v).c_str(), nullptr) == v;
    }
    return SelftestCheck{"", ok, "%.17g"};
  }));

  return checks;
}

}  // namespace gpmisspec::cli
