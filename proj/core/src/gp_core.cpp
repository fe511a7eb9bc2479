#include "gpmisspec/gp_core.hpp"

#include <cmath>
#include <sstream>

#include "gpmisspec/error.hpp"
#include "gpmisspec/parallel.hpp"

namespace gpmisspec {
namespace {

Moments clamp_variance(real_t raw, real_t prior, const char* what) {
  Moments m;
  if (raw >= 0) {
    m.variance = static_cast<double>(raw);
    return m;
  }
  if (raw >= -static_cast<real_t>(kVarianceClampTolerance) * prior) {
    m.variance = 0;
    m.clamped = true;
    return m;
  }
  std::ostringstream os;
  os.precision(6);
  os << what << " is " << static_cast<double>(raw) << ", below -" << kVarianceClampTolerance
     << " x prior variance " << static_cast<double>(prior);
  throw Error(ErrorCode::negative_variance, os.str());
}

void check_point(const Design& design, Point x) {
  if (x.size() != design.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "query point has dimension " + std::to_string(x.size()) +
                                                   ", model has " + std::to_string(design.dim()));
  }
}

}  // namespace

ConditionedModel::ConditionedModel(KernelHandle kernel, Design design, std::optional<std::vector<double>> data,
                                   const JitterPolicy& policy)
    : kernel_(std::move(kernel)), design_(std::move(design)), data_(std::move(data)) {
  if (kernel_.dim() != design_.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "kernel dimension " + std::to_string(kernel_.dim()) +
                                                   " does not match design dimension " + std::to_string(design_.dim()));
  }
  factor_ = cholesky(assemble_gram(kernel_, design_), policy);
  if (data_) {
    if (data_->size() != design_.size()) {
      throw Error(ErrorCode::dimension_mismatch, "data vector has length " + std::to_string(data_->size()) +
                                                     ", design has " + std::to_string(design_.size()) + " points");
    }
    const std::vector<real_t> f(data_->begin(), data_->end());
    weights_ = factor_.solve(f);
  }
}

Moments ConditionedModel::variance(Point x) const {
  check_point(design_, x);
  const real_t prior = kernel_.eval_wide(x, x);
  const auto r = cross_vector(kernel_, design_, x);
  const real_t reduction = quadratic_form(std::span<const real_t>(r), factor_);
  return clamp_variance(prior - reduction, prior, "conditional variance");
}

double ConditionedModel::interpolant_norm_sq() const {
  if (!data_) throw Error(ErrorCode::domain, "model has no data vector");
  real_t s = 0;
  for (std::size_t i = 0; i < weights_.size(); ++i) s += static_cast<real_t>((*data_)[i]) * weights_[i];
  return static_cast<double>(s);
}

const std::vector<real_t>& ConditionedModel::weights() const {
  if (!data_) throw Error(ErrorCode::domain, "model has no data vector");
  return weights_;
}

Moments conditional_moments(const ConditionedModel& model, Point x) {
  if (!model.has_data()) throw Error(ErrorCode::domain, "conditional mean requires a data vector");
  Moments m = model.variance(x);
  const auto r = cross_vector(model.kernel(), model.design(), x);
  const auto& w = model.weights();
  real_t mean = 0;
  for (std::size_t i = 0; i < r.size(); ++i) mean += r[i] * w[i];
  m.mean = static_cast<double>(mean);
  return m;
}

std::vector<double> interpolate(const ConditionedModel& model, std::span<const double> queries) {
  if (!model.has_data()) throw Error(ErrorCode::domain, "interpolation requires a data vector");
  const std::size_t d = model.design().dim();
  if (queries.size() % d != 0) throw Error(ErrorCode::dimension_mismatch, "query coordinates not a multiple of d");
  const std::size_t count = queries.size() / d;
  std::vector<double> out(count);
  const auto& w = model.weights();
  parallel_for(count, [&](std::size_t q) {
    const auto r = cross_vector(model.kernel(), model.design(), queries.subspan(q * d, d));
    real_t mean = 0;
    for (std::size_t i = 0; i < r.size(); ++i) mean += r[i] * w[i];
    out[q] = static_cast<double>(mean);
  });
  return out;
}

CrossWorstCaseError::CrossWorstCaseError(const KernelHandle& k1, const KernelHandle& k2, const Design& design,
                                         const JitterPolicy& policy)
    : k1_(k1), k2_(k2), design_(design), k1_gram_(assemble_gram(k1, design)),
      k2_factor_(cholesky(assemble_gram(k2, design), policy)) {}

Moments CrossWorstCaseError::at(Point x) const {
  check_point(design_, x);
  const std::size_t n = design_.size();
  const real_t prior = k1_.eval_wide(x, x);
  const auto k1x = cross_vector(k1_, design_, x);
  const auto a = k2_factor_.solve(cross_vector(k2_, design_, x));
  real_t cross = 0;
  real_t quad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cross += k1x[i] * a[i];
    const auto row = k1_gram_.row(i);
    real_t s = 0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * a[j];
    quad += a[i] * s;
  }
  return clamp_variance(prior - 2 * cross + quad, prior, "cross-kernel worst-case error");
}

double cross_wce_sq(const KernelHandle& k1, const KernelHandle& k2, const Design& design, Point x) {
  return CrossWorstCaseError(k1, k2, design).at(x).variance;
}

}  // namespace gpmisspec
