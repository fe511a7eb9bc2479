#include "gpmisspec/kernels.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gpmisspec/error.hpp"
#include "gpmisspec/specfun.hpp"

namespace gpmisspec {
namespace {

long double distance_wide(Point x, Point y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "kernel arguments have dimensions " + std::to_string(x.size()) + " and " +
                    std::to_string(y.size()));
  }
  long double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double diff = static_cast<long double>(x[i]) - static_cast<long double>(y[i]);
    s += diff * diff;
  }
  return std::sqrt(s);
}

long double matern_wide(const MaternParams& p, long double r) {
  const long double sigma2 = static_cast<long double>(p.sigma) * p.sigma;
  return sigma2 * scaled_matern_radial_wide(p.nu, static_cast<long double>(p.theta) * r);
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void MaternParams::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v > 0; };
  if (!ok(nu) || !ok(theta) || !ok(sigma)) {
    throw Error(ErrorCode::domain, "Matern parameters must be finite and positive (nu=" + format_double(nu) +
                                       ", theta=" + format_double(theta) + ", sigma=" + format_double(sigma) + ")");
  }
}

struct KernelHandle::Impl {
  std::size_t dim = 1;
  std::optional<MaternParams> matern;
  Callback fn;
  double factor = 1.0;
  std::string tag;
};

KernelHandle KernelHandle::matern(const MaternParams& params, std::size_t dim) {
  params.validate();
  if (dim == 0) throw Error(ErrorCode::domain, "kernel dimension must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->matern = params;
  impl->tag = format_kernel_spec(params);
  return KernelHandle(std::move(impl));
}

KernelHandle KernelHandle::custom(Callback fn, std::size_t dim, std::string tag) {
  if (!fn) throw Error(ErrorCode::domain, "custom kernel callback is empty");
  if (dim == 0) throw Error(ErrorCode::domain, "kernel dimension must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->fn = std::move(fn);
  impl->tag = std::move(tag);
  return KernelHandle(std::move(impl));
}

KernelHandle KernelHandle::scaled(double factor) const {
  if (!(factor > 0) || !std::isfinite(factor)) throw Error(ErrorCode::domain, "kernel scale factor must be positive");
  auto impl = std::make_shared<Impl>(*impl_);
  if (impl->matern) {
    impl->matern->sigma *= std::sqrt(factor);
    impl->tag = format_kernel_spec(*impl->matern);
  } else {
    impl->factor *= factor;
    impl->tag = format_double(factor) + "*" + impl_->tag;
  }
  return KernelHandle(std::move(impl));
}

long double KernelHandle::eval_wide(Point x, Point y) const {
  if (x.size() != impl_->dim || y.size() != impl_->dim) {
    throw Error(ErrorCode::dimension_mismatch, "kernel of dimension " + std::to_string(impl_->dim) +
                                                   " evaluated at points of dimension " +
                                                   std::to_string(x.size()) + " and " + std::to_string(y.size()));
  }
  if (impl_->matern) return matern_wide(*impl_->matern, distance_wide(x, y));
  return static_cast<long double>(impl_->factor) * static_cast<long double>(impl_->fn(x, y));
}

double KernelHandle::operator()(Point x, Point y) const { return static_cast<double>(eval_wide(x, y)); }

std::size_t KernelHandle::dim() const noexcept { return impl_->dim; }

const std::optional<MaternParams>& KernelHandle::matern_params() const noexcept { return impl_->matern; }

const std::string& KernelHandle::tag() const noexcept { return impl_->tag; }

double matern_eval(const MaternParams& params, Point x, Point y) {
  params.validate();
  return static_cast<double>(matern_wide(params, distance_wide(x, y)));
}

double matern_radial(const MaternParams& params, double r) {
  params.validate();
  if (!(r >= 0)) throw Error(ErrorCode::domain, "radial distance must be >= 0");
  return static_cast<double>(matern_wide(params, r));
}

double matern_spectral_density(const MaternParams& params, std::size_t d, std::span<const double> xi) {
  params.validate();
  if (d == 0) throw Error(ErrorCode::domain, "dimension must be >= 1");
  if (xi.size() != d) {
    throw Error(ErrorCode::dimension_mismatch, "frequency vector has dimension " + std::to_string(xi.size()) +
                                                   ", expected " + std::to_string(d));
  }
  const double nu = params.nu;
  const double half_d = static_cast<double>(d) / 2.0;
  double xi2 = 0;
  for (double v : xi) xi2 += v * v;
  const double log_density = (nu - 1) * std::numbers::ln2 + std::lgamma(nu + half_d) -
                             half_d * std::log(std::numbers::pi) + 2 * nu * std::log(params.theta) -
                             (nu + half_d) * std::log(params.theta * params.theta + xi2);
  return std::exp(log_density);
}

double sobolev_order(const MaternParams& params, std::size_t d) {
  params.validate();
  if (d == 0) throw Error(ErrorCode::domain, "dimension must be >= 1");
  return params.nu + static_cast<double>(d) / 2.0;
}

double rate_exponent(const MaternParams& truth, const MaternParams& model, std::size_t d) {
  return 2.0 * (sobolev_order(model, d) - sobolev_order(truth, d)) / static_cast<double>(d);
}

MaternParams parse_kernel_spec(std::string_view spec) {
  constexpr std::string_view prefix = "matern:";
  auto fail = [&](const std::string& why) -> MaternParams {
    throw Error(ErrorCode::parse, "bad kernel spec '" + std::string(spec) + "': " + why +
                                      " (expected matern:nu=<f>,theta=<f>,sigma=<f>)");
  };
  if (spec.substr(0, prefix.size()) != prefix) return fail("unknown kernel family");
  std::string_view rest = spec.substr(prefix.size());

  MaternParams p;
  bool have_nu = false;
  bool have_theta = false;
  bool have_sigma = false;
  for (bool more = !rest.empty(); more;) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    more = comma != std::string_view::npos;
    rest = more ? rest.substr(comma + 1) : std::string_view{};
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) return fail("missing '=' in '" + std::string(item) + "'");
    const std::string_view key = item.substr(0, eq);
    const std::string_view text = item.substr(eq + 1);
    double value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
      return fail("value '" + std::string(text) + "' is not a number");
    bool* seen = nullptr;
    if (key == "nu") {
      p.nu = value;
      seen = &have_nu;
    } else if (key == "theta") {
      p.theta = value;
      seen = &have_theta;
    } else if (key == "sigma") {
      p.sigma = value;
      seen = &have_sigma;
    } else {
      return fail("unknown key '" + std::string(key) + "'");
    }
    if (*seen) return fail("duplicate key '" + std::string(key) + "'");
    *seen = true;
  }
  if (!have_nu) return fail("nu is required");
  try {
    p.validate();
  } catch (const Error& e) {
    return fail(e.what());
  }
  return p;
}

std::string format_kernel_spec(const MaternParams& params) {
  return "matern:nu=" + format_double(params.nu) + ",theta=" + format_double(params.theta) +
         ",sigma=" + format_double(params.sigma);
}

}  // namespace gpmisspec
