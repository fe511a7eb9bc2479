#include "gpmisspec/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gpmisspec/error.hpp"
#include "gpmisspec/gp_core.hpp"
#include "gpmisspec/parallel.hpp"
#include "gpmisspec/random.hpp"

namespace gpmisspec {

namespace {

std::size_t integer_root(std::size_t value, std::size_t dim) {
  auto root = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(value), 1.0 / static_cast<double>(dim))));
  for (std::size_t candidate : {root == 0 ? 0 : root - 1, root, root + 1}) {
    std::size_t p = 1;
    for (std::size_t i = 0; i < dim; ++i) p *= candidate;
    if (p == value) return candidate;
  }
  return 0;
}

}  // namespace

Design make_design(DesignKind kind, std::size_t dim, std::size_t size) {
  switch (kind) {
    case DesignKind::grid: {
      const std::size_t m = integer_root(size, dim);
      if (m == 0) {
        throw Error(ErrorCode::domain,
                    "grid size " + std::to_string(size) + " is not a perfect power for d=" + std::to_string(dim));
      }
      return gen_grid(dim, m);
    }
    case DesignKind::halton:
      return gen_halton(dim, size);
    default:
      throw Error(ErrorCode::unsupported, "sweeps support grid and halton families only");
  }
}

void validate_sizes(std::span<const std::size_t> sizes) {
  if (sizes.size() < 3) throw Error(ErrorCode::domain, "size list needs at least 3 entries");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0) throw Error(ErrorCode::domain, "sizes must be positive");
    if (i > 0 && sizes[i] <= sizes[i - 1]) {
      throw Error(ErrorCode::domain, "sizes must strictly increase (" + std::to_string(sizes[i - 1]) + " then " +
                                         std::to_string(sizes[i]) + ")");
    }
  }
}

SampleMatrix sample_paths(const KernelHandle& k, const Design& design, std::size_t replicates, std::uint64_t seed) {
  if (replicates == 0) throw Error(ErrorCode::domain, "sample_paths needs at least one replicate");
  const auto factor = cholesky(assemble_gram(k, design));
  const std::size_t n = design.size();
  SampleMatrix out;
  out.replicates = replicates;
  out.n = n;
  out.values.resize(replicates * n);
  out.jitter = factor.jitter();
  const CounterRng rng(seed);
  parallel_for(replicates, [&](std::size_t r) {
    std::vector<real_t> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = rng.normal(r, i);
    double* row = out.values.data() + r * n;
    for (std::size_t i = 0; i < n; ++i) {
      const auto l = factor.row(i);
      real_t s = 0;
      for (std::size_t j = 0; j <= i; ++j) s += l[j] * z[j];
      row[i] = static_cast<double>(s);
    }
  });
  return out;
}

MonteCarloEstimate mc_expected_mle(const KernelHandle& truth, const KernelHandle& model, const Design& design,
                                   std::size_t replicates, std::uint64_t seed) {
  if (replicates < 2) throw Error(ErrorCode::domain, "Monte-Carlo needs at least 2 replicates");
  const auto paths = sample_paths(truth, design, replicates, seed);
  const auto r_factor = cholesky(assemble_gram(model, design));
  std::vector<double> estimates(replicates);
  parallel_for(replicates, [&](std::size_t r) { estimates[r] = scale_mle(r_factor, paths.row(r)); });
  long double sum = 0;
  for (double e : estimates) sum += e;
  const long double mean = sum / static_cast<long double>(replicates);
  long double ss = 0;
  for (double e : estimates) ss += (e - mean) * (e - mean);
  const long double var = ss / static_cast<long double>(replicates - 1);
  MonteCarloEstimate out;
  out.mean = static_cast<double>(mean);
  out.stderr_ = static_cast<double>(std::sqrt(var / static_cast<long double>(replicates)));
  out.replicates = replicates;
  out.jitter_true = paths.jitter;
  return out;
}

MonteCarloEstimate mc_expected_mle(const MisspecScenario& s, const Design& design, std::size_t replicates,
                                   std::uint64_t seed) {
  return mc_expected_mle(s.truth_kernel(), s.model_kernel(), design, replicates, seed);
}

double default_rate_tolerance(double theoretical_slope) {
  const double t = std::abs(theoretical_slope);
  if (t == 0) return 0.05;
  return t <= 2 ? 0.3 : 0.5;
}

double default_variance_tolerance(double theoretical_slope) {
  return std::abs(theoretical_slope) <= 1 ? 0.2 : 0.5;
}

void SweepConfig::validate() const {
  scenario.validate();
  validate_sizes(sizes);
  if (family != DesignKind::grid && family != DesignKind::halton) {
    throw Error(ErrorCode::unsupported, "sweeps support grid and halton families only");
  }
  if (replicates == 1) throw Error(ErrorCode::domain, "Monte-Carlo needs at least 2 replicates");
  if (slope_tolerance && !(*slope_tolerance > 0)) throw Error(ErrorCode::domain, "slope tolerance must be positive");
}

std::vector<std::size_t> RateFitReport::sizes() const {
  std::vector<std::size_t> out;
  for (const auto& r : rows) out.push_back(r.n);
  return out;
}

std::vector<double> RateFitReport::values() const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.expected_mle);
  return out;
}

RateFitReport rate_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const auto truth = cfg.scenario.truth_kernel();
  const auto model = cfg.scenario.model_kernel();
  const std::size_t count = cfg.sizes.size();

  std::vector<std::optional<SweepRow>> slots(count);
  std::vector<std::string> errors(count);
  parallel_for(count, [&](std::size_t i) {
    const std::size_t n = cfg.sizes[i];
    try {
      const Design design = make_design(cfg.family, cfg.scenario.dim, n);
      SweepRow row;
      row.n = n;
      const auto e = expected_mle_report(truth, model, design, cfg.jitter);
      row.expected_mle = e.value;
      row.jitter_model = e.jitter_model;
      if (cfg.replicates >= 2) {
        const auto mc = mc_expected_mle(truth, model, design, cfg.replicates, cfg.seed);
        row.mc_mean = mc.mean;
        row.mc_stderr = mc.stderr_;
        row.jitter_true = mc.jitter_true;
      }
      const auto g = geometry(design, cfg.fill_resolution);
      row.fill = g.fill_distance;
      row.separation = g.separation_radius;
      slots[i] = row;
    } catch (const NotPositiveDefinite& e) {
      errors[i] = "N=" + std::to_string(n) + ": " + e.what();
    }
  });

  RateFitReport report;
  report.scenario = cfg.scenario;
  report.family = cfg.family;
  for (std::size_t i = 0; i < count; ++i) {
    if (slots[i]) {
      report.rows.push_back(*slots[i]);
    } else {
      report.incomplete = true;
      report.failures.push_back(errors[i]);
    }
  }
  report.theoretical_slope = cfg.scenario.theoretical_slope();
  report.tolerance = cfg.slope_tolerance.value_or(default_rate_tolerance(report.theoretical_slope));
  report.has_theory = cfg.scenario.has_rate_theory();
  if (!report.has_theory) report.banner = kNoTheoryBanner;

  if (report.rows.size() >= 3) {
    const auto sizes = report.sizes();
    const auto values = report.values();
    report.fit = fit_loglog(std::span<const std::size_t>(sizes), values);
    report.tail_slope = fit_loglog(std::span<const std::size_t>(sizes).last(3), std::span<const double>(values).last(3)).slope;
    report.pass = report.has_theory && !report.incomplete &&
                  std::abs(report.fit.slope - report.theoretical_slope) <= report.tolerance &&
                  report.fit.r_squared >= kMinRSquared;
  } else {
    report.incomplete = true;
  }
  return report;
}

std::string TestGrid::description() const {
  std::ostringstream os;
  os << per_axis;
  for (std::size_t i = 1; i < dim; ++i) os << "x" << per_axis;
  os << " points {0, 1/" << per_axis - 1 << ", ..., 1}^" << dim;
  return os.str();
}

TestGrid make_test_grid(std::size_t dim, std::size_t total) {
  if (dim == 0) throw Error(ErrorCode::domain, "test grid dimension must be >= 1");
  auto m = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(total), 1.0 / static_cast<double>(dim))));
  if (m < 2) throw Error(ErrorCode::domain, "test grid needs at least 2 points per axis");
  TestGrid grid;
  grid.dim = dim;
  grid.per_axis = m;
  std::size_t count = 1;
  for (std::size_t i = 0; i < dim; ++i) count *= m;
  grid.coords.resize(count * dim);
  for (std::size_t p = 0; p < count; ++p) {
    std::size_t rem = p;
    for (std::size_t a = dim; a-- > 0;) {
      grid.coords[p * dim + a] = static_cast<double>(rem % m) / static_cast<double>(m - 1);
      rem /= m;
    }
  }
  return grid;
}

VarianceDecayReport variance_decay_sweep(const KernelHandle& r, std::span<const Design> family, const TestGrid& grid,
                                         std::optional<double> slope_tolerance) {
  const auto& params = r.matern_params();
  if (!params) throw Error(ErrorCode::unsupported, "variance decay needs a Matern kernel for the reference slope");
  std::vector<std::size_t> sizes;
  for (const auto& d : family) {
    if (d.dim() != r.dim() || grid.dim != r.dim()) {
      throw Error(ErrorCode::dimension_mismatch, "kernel, designs and test grid must share a dimension");
    }
    sizes.push_back(d.size());
  }
  validate_sizes(sizes);

  VarianceDecayReport report;
  report.kernel_tag = r.tag();
  report.test_grid = grid.description();
  report.theoretical_slope = -2.0 * params->nu / static_cast<double>(r.dim());
  report.tolerance = slope_tolerance.value_or(default_variance_tolerance(report.theoretical_slope));

  std::vector<double> sups;
  for (const auto& design : family) {
    const ConditionedModel model(r, design);
    std::vector<Moments> moments(grid.size());
    parallel_for(grid.size(), [&](std::size_t q) { moments[q] = model.variance(grid.point(q)); });
    VarianceRow row;
    row.n = design.size();
    row.jitter = model.factor().jitter();
    std::size_t best = 0;
    for (std::size_t q = 0; q < moments.size(); ++q) {
      if (moments[q].clamped) ++row.clamped;
      if (moments[q].variance > moments[best].variance) best = q;
    }
    row.sup_variance = moments[best].variance;
    const auto p = grid.point(best);
    row.argmax.assign(p.begin(), p.end());
    sups.push_back(row.sup_variance);
    report.rows.push_back(std::move(row));
  }
  report.fit = fit_loglog(std::span<const std::size_t>(sizes), sups);
  report.pass = std::abs(report.fit.slope - report.theoretical_slope) <= report.tolerance;
  return report;
}

double faulhaber_ratio(unsigned p, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::domain, "faulhaber_ratio needs N >= 1");
  long double sum = 0;
  for (std::size_t k = 1; k <= n; ++k) sum += std::pow(static_cast<long double>(k), static_cast<long double>(p));
  const long double lead = std::pow(static_cast<long double>(n), static_cast<long double>(p + 1)) / (p + 1);
  return static_cast<double>(sum / lead);
}

bool strictly_increasing(std::span<const double> values) {
  return std::adjacent_find(values.begin(), values.end(), [](double a, double b) { return b <= a; }) == values.end();
}

}  // namespace gpmisspec
