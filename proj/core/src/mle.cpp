#include "gpmisspec/mle.hpp"

#include <cmath>
#include <sstream>

#include "gpmisspec/error.hpp"
#include "gpmisspec/gp_core.hpp"
#include "gpmisspec/parallel.hpp"

namespace gpmisspec {
namespace {

void check_pair(const KernelHandle& truth, const KernelHandle& model, const Design& design) {
  if (truth.dim() != design.dim() || model.dim() != design.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "kernel and design dimensions differ");
  }
}

}  // namespace

void MisspecScenario::validate() const {
  truth.validate();
  model.validate();
  if (dim == 0) throw Error(ErrorCode::domain, "scenario dimension must be >= 1");
  if (model.sigma != 1.0) {
    throw Error(ErrorCode::domain, "model kernel must have sigma = 1; the scale is what the MLE estimates");
  }
}

KernelHandle MisspecScenario::truth_kernel() const { return KernelHandle::matern(truth, dim); }

KernelHandle MisspecScenario::model_kernel() const {
  validate();
  return KernelHandle::matern(model, dim);
}

double scale_mle(const CholeskyFactor& model_factor, std::span<const double> data) {
  if (data.empty()) throw Error(ErrorCode::domain, "scale MLE needs N >= 1 observations");
  return quadratic_form(data, model_factor) / static_cast<double>(data.size());
}

double scale_mle(const KernelHandle& model, const Design& design, std::span<const double> data,
                 const JitterPolicy& policy) {
  if (data.size() != design.size()) {
    throw Error(ErrorCode::dimension_mismatch, "data length " + std::to_string(data.size()) +
                                                   " does not match design size " + std::to_string(design.size()));
  }
  return scale_mle(cholesky(assemble_gram(model, design), policy), data);
}

ExpectedMle expected_mle_report(const KernelHandle& truth, const KernelHandle& model, const Design& design,
                                const JitterPolicy& policy) {
  check_pair(truth, model, design);
  if (design.empty()) throw Error(ErrorCode::invalid_design, "expected MLE needs N >= 1");
  const auto r_factor = cholesky(assemble_gram(model, design), policy);
  ExpectedMle out;
  out.n = design.size();
  out.trace = trace_product(assemble_gram(truth, design), r_factor);
  out.value = out.trace / static_cast<double>(out.n);
  out.jitter_model = r_factor.jitter();
  return out;
}

ExpectedMle expected_mle_report(const MisspecScenario& s, const Design& design, const JitterPolicy& policy) {
  return expected_mle_report(s.truth_kernel(), s.model_kernel(), design, policy);
}

double expected_mle(const MisspecScenario& s, const Design& design) { return expected_mle_report(s, design).value; }

double DecompositionReport::relative_gap() const { return std::abs(mean - trace_over_n) / std::abs(trace_over_n); }

namespace {

DecompositionReport decompose_with_jitter(const GramMatrix& k_gram, const GramMatrix& r_gram, double jitter) {
  const std::size_t n_total = r_gram.size();
  DecompositionReport report;
  report.terms.reserve(n_total);
  report.jitter_model = jitter;

  CholeskyFactor factor = CholeskyFactor::empty(jitter);
  real_t sum = 0;
  for (std::size_t n = 0; n < n_total; ++n) {
    const auto r_cross = r_gram.row(n).first(n);
    const auto k_cross = k_gram.row(n).first(n);
    const auto c = factor.solve_lower(r_cross);
    const auto a = factor.solve_upper(c);

    // K(x,x) - 2 k^T a + a^T K_{n-1} a
    const real_t k_diag = k_gram(n, n);
    real_t cross = 0;
    real_t quad = 0;
    for (std::size_t i = 0; i < n; ++i) {
      cross += k_cross[i] * a[i];
      const auto row = k_gram.row(i);
      real_t s = 0;
      for (std::size_t j = 0; j < n; ++j) s += row[j] * a[j];
      quad += a[i] * s;
    }
    real_t numerator = k_diag - 2 * cross + quad;
    if (numerator < 0 && numerator >= -static_cast<real_t>(kVarianceClampTolerance) * k_diag) numerator = 0;
    if (numerator < 0) {
      std::ostringstream os;
      os << "decomposition numerator " << static_cast<double>(numerator) << " is negative at n=" << n + 1;
      throw Error(ErrorCode::negative_variance, os.str());
    }

    factor = extend_factor(std::move(factor), r_cross, r_gram(n, n));
    const real_t lnn = factor.row(n)[n];
    const real_t denominator = lnn * lnn;

    const real_t ratio = numerator / denominator;
    sum += ratio;
    DecompositionTerm term;
    term.n = n + 1;
    term.numerator = static_cast<double>(numerator);
    term.denominator = static_cast<double>(denominator);
    term.ratio_sq = static_cast<double>(ratio);
    term.running_mean = static_cast<double>(sum / static_cast<real_t>(n + 1));
    report.terms.push_back(term);
  }
  report.mean = static_cast<double>(sum / static_cast<real_t>(n_total));
  report.trace_over_n = trace_product(k_gram, factor) / static_cast<double>(n_total);
  return report;
}

}  // namespace

DecompositionReport mle_decomposition(const KernelHandle& truth, const KernelHandle& model, const Design& design,
                                      const JitterPolicy& policy) {
  check_pair(truth, model, design);
  if (design.empty()) throw Error(ErrorCode::invalid_design, "decomposition needs N >= 1");
  const GramMatrix k_gram = assemble_gram(truth, design);
  const GramMatrix r_gram = assemble_gram(model, design);
  const real_t scale = r_gram.mean_diagonal();
  for (std::size_t rung = 0;; ++rung) {
    const double jitter = static_cast<double>(policy.ladder.at(rung) * scale);
    try {
      return decompose_with_jitter(k_gram, r_gram, jitter);
    } catch (const NotPositiveDefinite&) {
      if (rung + 1 >= policy.ladder.size()) throw;
    }
  }
}

DecompositionReport mle_decomposition(const MisspecScenario& s, const Design& design, const JitterPolicy& policy) {
  return mle_decomposition(s.truth_kernel(), s.model_kernel(), design, policy);
}

RangeBounds matern_range_bounds(const MisspecScenario& s) {
  s.validate();
  if (s.truth.nu != s.model.nu) {
    throw Error(ErrorCode::domain, "range bounds need equal smoothness (nu0 = nu)");
  }
  const double sigma0_sq = s.truth.sigma * s.truth.sigma;
  const double theta0 = s.truth.theta;
  const double theta = s.model.theta;
  const double d = static_cast<double>(s.dim);
  const double nu0 = s.truth.nu;
  RangeBounds b;
  if (theta0 >= theta) {
    b.lower = sigma0_sq * std::pow(theta / theta0, d);
    b.upper = sigma0_sq * std::pow(theta0 / theta, 2 * nu0);
  } else {
    b.lower = sigma0_sq * std::pow(theta0 / theta, 2 * nu0);
    b.upper = sigma0_sq * std::pow(theta / theta0, d);
  }
  return b;
}

std::string to_string(TraceTrend trend) {
  switch (trend) {
    case TraceTrend::apparently_bounded: return "apparently-bounded";
    case TraceTrend::apparently_divergent: return "apparently-divergent";
    case TraceTrend::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::vector<Design> prefix_family(const Design& design, std::span<const std::size_t> sizes) {
  std::vector<Design> family;
  family.reserve(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw Error(ErrorCode::domain, "sizes must be strictly increasing");
    family.push_back(design.prefix(sizes[i]));
  }
  return family;
}

DriscollReport driscoll_trace(const KernelHandle& truth, const KernelHandle& model, std::span<const Design> nested) {
  if (nested.size() < 3) throw Error(ErrorCode::domain, "trace growth fit needs at least 3 sizes");
  for (std::size_t i = 0; i + 1 < nested.size(); ++i) {
    if (nested[i].size() >= nested[i + 1].size() || !nested[i].is_prefix_of(nested[i + 1])) {
      throw Error(ErrorCode::non_nested, "design " + std::to_string(i) + " (N=" + std::to_string(nested[i].size()) +
                                             ") is not a proper prefix of design " + std::to_string(i + 1));
    }
  }
  DriscollReport report;
  report.sizes.resize(nested.size());
  report.traces.resize(nested.size());
  parallel_for(nested.size(), [&](std::size_t i) {
    report.sizes[i] = nested[i].size();
    report.traces[i] = expected_mle_report(truth, model, nested[i]).trace;
  });
  report.fit = fit_loglog(std::span<const std::size_t>(report.sizes), report.traces);
  if (report.fit.slope <= kBoundedSlope) {
    report.classification = TraceTrend::apparently_bounded;
  } else if (report.fit.slope >= kDivergentSlope) {
    report.classification = TraceTrend::apparently_divergent;
  } else {
    report.classification = TraceTrend::inconclusive;
  }
  return report;
}

DriscollReport driscoll_trace(const MisspecScenario& s, std::span<const Design> nested) {
  return driscoll_trace(s.truth_kernel(), s.model_kernel(), nested);
}

}  // namespace gpmisspec
