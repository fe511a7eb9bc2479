#include "gpmisspec/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include "gpmisspec/error.hpp"

namespace gpmisspec {
namespace {

// Taylor coefficients c_k of 1/Gamma(z) = sum_k c_k z^k, k = 1..30.
constexpr std::array<long double, 31> kRecipGammaTaylor = {
    0.0L,
    1.0L,
    0.577215664901532860606512090082L,
    -0.655878071520253881077019515145L,
    -0.0420026350340952355290039348754L,
    0.166538611382291489501700795102L,
    -0.0421977345555443367482083012892L,
    -0.00962197152787697356211492167235L,
    0.00721894324666309954239501034045L,
    -0.00116516759185906511211397108402L,
    -0.000215241674114950972815729963054L,
    0.000128050282388116186153198626328L,
    -0.000020134854780788238655689391421L,
    -0.00000125049348214267065734535947383L,
    0.00000113302723198169588237412962033L,
    -0.000000205633841697760710345015413002L,
    0.00000000611609510448141581786249868286L,
    0.00000000500200764446922293005566504806L,
    -0.00000000118127457048702014458812656544L,
    1.04342671169110051049154033231e-10L,
    7.78226343990507125404993731136e-12L,
    -3.69680561864220570818781587809e-12L,
    5.10037028745447597901548132286e-13L,
    -2.05832605356650678322242954486e-14L,
    -5.34812253942301798237001731873e-15L,
    1.22677862823826079015889384662e-15L,
    -1.18125930169745876951376458684e-16L,
    1.18669225475160033257977724293e-18L,
    1.41238065531803178155580394757e-18L,
    -2.29874568443537020659247858063e-19L,
    1.71440632192733743338396337027e-20L,
};

[[noreturn]] void domain_error(const char* what, double nu, double z) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (nu=" << nu << ", z=" << z << ")";
  throw Error(ErrorCode::domain, os.str());
}

template <class T>
constexpr T pi_v = std::numbers::pi_v<T>;

// Temme's auxiliary functions for |mu| <= 1/2:
//   gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
//   gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
// plus 1/Gamma(1+mu) and 1/Gamma(1-mu) themselves.
template <class T>
struct TemmeGammas {
  T gam1, gam2, gampl, gammi;
};

template <class T>
TemmeGammas<T> temme_gammas(T mu) {
  // 1/Gamma(1+mu) = sum_{k>=1} c_k mu^{k-1}
  T even = 0;  // sum over even k of c_k mu^{k-2}
  T odd = 0;   // sum over odd k of c_k mu^{k-1}
  const T mu2 = mu * mu;
  for (std::size_t k = kRecipGammaTaylor.size() - 1; k >= 1; --k) {
    if (k % 2 == 0) {
      even = even * mu2 + static_cast<T>(kRecipGammaTaylor[k]);
    } else {
      odd = odd * mu2 + static_cast<T>(kRecipGammaTaylor[k]);
    }
  }
  TemmeGammas<T> g;
  g.gam1 = -even;
  g.gam2 = odd;
  g.gampl = odd + mu * even;
  g.gammi = odd - mu * even;
  return g;
}

// e^x K_mu(x) and e^x K_{mu+1}(x) for |mu| <= 1/2, x > 0.
template <class T>
std::pair<T, T> scaled_k_pair(T mu, T x) {
  constexpr T eps = std::numeric_limits<T>::epsilon();
  constexpr int max_iter = 100000;
  const T mu2 = mu * mu;

  if (x < T(2)) {
    const T x2 = x / 2;
    const T pimu = pi_v<T> * mu;
    const T fact = std::abs(pimu) < eps ? T(1) : pimu / std::sin(pimu);
    T d = -std::log(x2);
    T e = mu * d;
    const T fact2 = std::abs(e) < eps ? T(1) : std::sinh(e) / e;
    const auto g = temme_gammas(mu);
    T ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
    T sum = ff;
    e = std::exp(e);
    T p = T(0.5) * e / g.gampl;
    T q = T(0.5) / (e * g.gammi);
    T c = 1;
    d = x2 * x2;
    T sum1 = p;
    for (int i = 1; i <= max_iter; ++i) {
      const T fi = static_cast<T>(i);
      ff = (fi * ff + p + q) / (fi * fi - mu2);
      c *= d / fi;
      p /= (fi - mu);
      q /= (fi + mu);
      const T del = c * ff;
      sum += del;
      sum1 += c * (p - fi * ff);
      if (std::abs(del) < std::abs(sum) * eps) break;
    }
    const T ex = std::exp(x);
    return {sum * ex, sum1 * (T(2) / x) * ex};
  }

  // Steed's method for CF2, with Temme's normalisation of the sum.
  T b = 2 * (1 + x);
  T d = 1 / b;
  T h = d;
  T delh = d;
  T q1 = 0;
  T q2 = 1;
  const T a1 = T(0.25) - mu2;
  T q = a1;
  T c = a1;
  T a = -a1;
  T s = 1 + q * delh;
  for (int i = 2; i <= max_iter; ++i) {
    const T fi = static_cast<T>(i);
    a -= 2 * (fi - 1);
    c = -a * c / fi;
    const T qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2;
    d = 1 / (b + a * d);
    delh = (b * d - 1) * delh;
    h += delh;
    const T dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < eps) break;
  }
  h = a1 * h;
  const T kmu = std::sqrt(pi_v<T> / (2 * x)) / s;
  const T kmu1 = kmu * (mu + x + T(0.5) - h) / x;
  return {kmu, kmu1};
}

// e^x K_nu(x) for any real nu.
template <class T>
T scaled_k_numeric(T nu, T x) {
  nu = std::abs(nu);
  const long nl = static_cast<long>(std::floor(nu + T(0.5)));
  const T mu = nu - static_cast<T>(nl);
  auto [kmu, kmu1] = scaled_k_pair(mu, x);
  const T xi2 = 2 / x;
  for (long i = 1; i <= nl; ++i) {
    const T next = (mu + static_cast<T>(i)) * xi2 * kmu1 + kmu;
    kmu = kmu1;
    kmu1 = next;
  }
  return kmu;
}

// e^x x^nu K_nu(x), nu > 0, via F_{m+1} = x^2 F_{m-1} + 2m F_m.
template <class T>
T scaled_radial_numeric(T nu, T x) {
  const long nl = static_cast<long>(std::floor(nu + T(0.5)));
  const T mu = nu - static_cast<T>(nl);
  auto [kmu, kmu1] = scaled_k_pair(mu, x);
  T f0 = std::pow(x, mu) * kmu;
  if (nl == 0) return f0;
  T f1 = std::pow(x, mu + 1) * kmu1;
  const T x2 = x * x;
  for (long i = 1; i < nl; ++i) {
    const T m = mu + static_cast<T>(i);
    const T next = x2 * f0 + 2 * m * f1;
    f0 = f1;
    f1 = next;
  }
  return f1;
}

bool is_half_integer(double nu) noexcept {
  if (!(nu >= 0.5) || !(nu <= 100.5)) return false;
  const double twice = 2.0 * nu;
  return twice == std::floor(twice) && static_cast<long>(twice) % 2 == 1;
}

// Coefficients (n+k)!/(k!(n-k)!), k = 0..n.
template <class T>
void half_integer_coefficients(long n, T* out) {
  T a = 1;
  out[0] = a;
  for (long k = 0; k < n; ++k) {
    a = a * static_cast<T>(n + k + 1) * static_cast<T>(n - k) / static_cast<T>(k + 1);
    out[k + 1] = a;
  }
}

// e^z K_{n+1/2}(z).
template <class T>
T scaled_k_half(long n, T z) {
  std::array<T, 102> a{};
  half_integer_coefficients(n, a.data());
  const T w = 1 / (2 * z);
  T poly = 0;
  for (long k = n; k >= 0; --k) poly = poly * w + a[static_cast<std::size_t>(k)];
  return std::sqrt(pi_v<T> / (2 * z)) * poly;
}

// e^z z^{n+1/2} K_{n+1/2}(z) = sqrt(pi/2) sum_k a_k 2^{-k} z^{n-k}.
template <class T>
T scaled_radial_half(long n, T z) {
  std::array<T, 102> a{};
  half_integer_coefficients(n, a.data());
  T poly = 0;
  T pow2 = 1;
  // Horner in z over coefficients b_j = a_{n-j} 2^{-(n-j)}, j from n down to 0.
  std::array<T, 102> b{};
  for (long k = 0; k <= n; ++k) {
    b[static_cast<std::size_t>(n - k)] = a[static_cast<std::size_t>(k)] * pow2;
    pow2 /= 2;
  }
  for (long j = n; j >= 0; --j) poly = poly * z + b[static_cast<std::size_t>(j)];
  return std::sqrt(pi_v<T> / 2) * poly;
}

template <class T>
T radial_limit(T nu) {
  return std::exp2(nu - 1) * std::tgamma(nu);
}

// Leading terms of z^nu K_nu(z) as z -> 0. For 0 < nu < 1 the z^{2 nu} term
// is above double resolution at z ~ 1e-8 and must be kept; for nu >= 1 the
// corrections are O(z^2 log z) and are dropped.
template <class T>
T radial_small_z(T nu, T z) {
  const T lim = radial_limit(nu);
  if (z == 0 || nu >= 1) return lim;
  const T z2 = z * z;
  const T lead = lim * (1 + z2 / (4 * (1 - nu)));
  const T frac = std::exp2(-nu - 1) * std::tgamma(-nu) * std::pow(z, 2 * nu) * (1 + z2 / (4 * (1 + nu)));
  return lead + frac;
}

template <class T>
T scaled_matern_radial_impl(T nu, T z) {
  if (!(nu > 0) || !std::isfinite(static_cast<double>(nu)))
    domain_error("scaled_matern_radial requires finite nu > 0", static_cast<double>(nu), static_cast<double>(z));
  if (!(z >= 0) || !std::isfinite(static_cast<double>(z)))
    domain_error("scaled_matern_radial requires finite z >= 0", static_cast<double>(nu), static_cast<double>(z));
  if (z < static_cast<T>(kSmallArgumentThreshold)) return radial_small_z(nu, z);
  const T decay = std::exp(-z);
  if (is_half_integer(static_cast<double>(nu))) {
    const long n = static_cast<long>(std::floor(nu));
    return decay * scaled_radial_half(n, z);
  }
  return decay * scaled_radial_numeric(nu, z);
}

void check_bessel_args(double nu, double z) {
  if (!(nu >= 0) || !std::isfinite(nu)) domain_error("bessel_k requires finite nu >= 0", nu, z);
  if (!(z > 0) || !std::isfinite(z)) domain_error("bessel_k requires finite z > 0", nu, z);
}

BesselResult finish(long double scaled, double z, BesselEvalMode mode) {
  const long double v = scaled * std::exp(-static_cast<long double>(z));
  BesselResult r;
  r.mode = mode;
  const double dv = static_cast<double>(v);
  if (dv < std::numeric_limits<double>::min()) {
    r.value = 0.0;
    r.underflow = true;
  } else {
    r.value = dv;
  }
  return r;
}

}  // namespace

BesselEvalMode select_bessel_mode(double nu) noexcept {
  return is_half_integer(nu) ? BesselEvalMode::half_integer : BesselEvalMode::numeric;
}

double log_gamma(double x) {
  if (!(x > 0) || !std::isfinite(x)) domain_error("log_gamma requires finite x > 0", 0.0, x);
  return std::lgamma(x);
}

BesselResult bessel_k_eval(double nu, double z) {
  check_bessel_args(nu, z);
  if (is_half_integer(nu)) {
    const long n = static_cast<long>(std::floor(nu));
    return finish(scaled_k_half<long double>(n, z), z, BesselEvalMode::half_integer);
  }
  return finish(scaled_k_numeric<long double>(nu, z), z, BesselEvalMode::numeric);
}

double bessel_k(double nu, double z) { return bessel_k_eval(nu, z).value; }

double bessel_k_numeric(double nu, double z) {
  if (!std::isfinite(nu)) domain_error("bessel_k_numeric requires finite nu", nu, z);
  if (!(z > 0) || !std::isfinite(z)) domain_error("bessel_k_numeric requires finite z > 0", nu, z);
  return finish(scaled_k_numeric<long double>(nu, z), z, BesselEvalMode::numeric).value;
}

double bessel_k_half_integer(double nu, double z) {
  check_bessel_args(nu, z);
  if (!is_half_integer(nu)) domain_error("bessel_k_half_integer requires nu in {1/2, 3/2, ...}", nu, z);
  const long n = static_cast<long>(std::floor(nu));
  return finish(scaled_k_half<long double>(n, z), z, BesselEvalMode::half_integer).value;
}

double scaled_matern_radial(double nu, double z) {
  return static_cast<double>(scaled_matern_radial_impl<long double>(nu, z));
}

long double scaled_matern_radial_wide(long double nu, long double z) {
  return scaled_matern_radial_impl<long double>(nu, z);
}

double scaled_matern_radial_limit(double nu) {
  if (!(nu > 0) || !std::isfinite(nu)) domain_error("radial limit requires finite nu > 0", nu, 0.0);
  return static_cast<double>(radial_limit<long double>(nu));
}

}  // namespace gpmisspec
