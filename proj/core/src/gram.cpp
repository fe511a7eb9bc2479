#include "gpmisspec/gram.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gpmisspec/error.hpp"
#include "gpmisspec/parallel.hpp"

namespace gpmisspec {
namespace {

// Four independent accumulators keep the x87 add chain from serialising.
real_t dot(const real_t* a, const real_t* b, std::size_t n) noexcept {
  real_t s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < n; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

void check_size(std::size_t n) {
  if (n > kMaxGramSize) {
    throw Error(ErrorCode::size_limit, "N=" + std::to_string(n) + " exceeds the dense limit of " +
                                           std::to_string(kMaxGramSize));
  }
}

void check_match(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorCode::dimension_mismatch, std::string(what) + ": size " + std::to_string(got) +
                                                   " does not match factor of size " + std::to_string(want));
  }
}

}  // namespace

GramMatrix::GramMatrix(std::size_t n, std::vector<real_t> entries, std::string kernel_tag,
                       std::uint64_t design_fingerprint)
    : n_(n), entries_(std::move(entries)), kernel_tag_(std::move(kernel_tag)), design_fingerprint_(design_fingerprint) {
  check_size(n_);
  if (entries_.size() != n_ * n_) throw Error(ErrorCode::dimension_mismatch, "Gram entries do not form an n x n matrix");
}

real_t GramMatrix::mean_diagonal() const noexcept {
  if (n_ == 0) return 0;
  real_t s = 0;
  for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, i);
  return s / static_cast<real_t>(n_);
}

GramMatrix assemble_gram(const KernelHandle& kernel, const Design& design) {
  if (kernel.dim() != design.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "kernel dimension " + std::to_string(kernel.dim()) +
                                                   " does not match design dimension " + std::to_string(design.dim()));
  }
  const std::size_t n = design.size();
  check_size(n);
  std::vector<real_t> entries(n * n);
  std::vector<std::size_t> bad_column(n, n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      const real_t v = kernel.eval_wide(design.point(i), design.point(j));
      if (!std::isfinite(v) && bad_column[i] == n) bad_column[i] = j;
      entries[i * n + j] = v;
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (bad_column[i] != n) {
      throw Error(ErrorCode::domain, "kernel '" + kernel.tag() + "' is not finite at pair (" + std::to_string(i) +
                                         ", " + std::to_string(bad_column[i]) + ")");
    }
    for (std::size_t j = 0; j < i; ++j) entries[i * n + j] = entries[j * n + i];
  }
  return GramMatrix(n, std::move(entries), kernel.tag(), design.fingerprint());
}

std::vector<real_t> cross_vector(const KernelHandle& kernel, const Design& design, Point x) {
  std::vector<real_t> out(design.size());
  for (std::size_t i = 0; i < design.size(); ++i) out[i] = kernel.eval_wide(x, design.point(i));
  return out;
}

GramMatrix linear_combination(real_t a, const GramMatrix& g1, real_t b, const GramMatrix& g2) {
  if (g1.size() != g2.size()) throw Error(ErrorCode::dimension_mismatch, "Gram matrices differ in size");
  std::vector<real_t> out(g1.entries().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * g1.entries()[i] + b * g2.entries()[i];
  return GramMatrix(g1.size(), std::move(out), "linear-combination", g1.design_fingerprint());
}

JitterPolicy JitterPolicy::standard() { return {{0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6}}; }

JitterPolicy JitterPolicy::none() { return {{0.0}}; }

real_t CholeskyFactor::append_row(std::span<const real_t> cross, real_t diag) {
  const std::size_t i = n_;
  const std::size_t offset = packed_.size();
  packed_.resize(offset + i + 1);
  real_t* row_i = packed_.data() + offset;
  for (std::size_t j = 0; j < i; ++j) {
    const real_t* row_j = packed_.data() + j * (j + 1) / 2;
    row_i[j] = (cross[j] - dot(row_i, row_j, j)) / row_j[j];
  }
  const real_t schur = diag - dot(row_i, row_i, i);
  if (!(schur > 0) || !std::isfinite(schur)) {
    packed_.resize(offset);
    return schur;
  }
  row_i[i] = std::sqrt(schur);
  ++n_;
  return schur;
}

std::vector<real_t> CholeskyFactor::solve_lower(std::span<const real_t> b) const {
  check_match(b.size(), n_, "solve_lower");
  std::vector<real_t> y(b.begin(), b.end());
  for (std::size_t i = 0; i < n_; ++i) {
    const real_t* row_i = packed_.data() + i * (i + 1) / 2;
    y[i] = (y[i] - dot(row_i, y.data(), i)) / row_i[i];
  }
  return y;
}

std::vector<real_t> CholeskyFactor::solve_upper(std::span<const real_t> y) const {
  check_match(y.size(), n_, "solve_upper");
  std::vector<real_t> x(y.begin(), y.end());
  for (std::size_t k = n_; k-- > 0;) {
    const real_t* row_k = packed_.data() + k * (k + 1) / 2;
    x[k] /= row_k[k];
    const real_t xk = x[k];
    for (std::size_t i = 0; i < k; ++i) x[i] -= row_k[i] * xk;
  }
  return x;
}

std::vector<real_t> CholeskyFactor::solve(std::span<const real_t> b) const { return solve_upper(solve_lower(b)); }

double CholeskyFactor::reconstruction_error(const GramMatrix& g) const {
  check_match(g.size(), n_, "reconstruction_error");
  real_t num = 0;
  real_t den = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      real_t target = g(i, j);
      if (i == j) target += jitter_;
      const real_t diff = dot(packed_.data() + i * (i + 1) / 2, packed_.data() + j * (j + 1) / 2, j + 1) - target;
      const real_t w = i == j ? 1 : 2;
      num += w * diff * diff;
      den += w * g(i, j) * g(i, j);
    }
  }
  return den == 0 ? 0.0 : static_cast<double>(std::sqrt(num / den));
}

CholeskyFactor cholesky(const GramMatrix& g, const JitterPolicy& policy) {
  const std::size_t n = g.size();
  const real_t scale = g.mean_diagonal();
  std::size_t pivot = 0;
  double jitter = 0;
  for (double rung : policy.ladder) {
    jitter = static_cast<double>(rung * scale);
    CholeskyFactor f;
    f.jitter_ = jitter;
    f.packed_.reserve(n * (n + 1) / 2);
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      const real_t schur = f.append_row(g.row(i).first(i), g(i, i) + static_cast<real_t>(jitter));
      if (!(schur > 0) || !std::isfinite(schur)) {
        pivot = i;
        ok = false;
        break;
      }
    }
    if (ok) return f;
  }
  std::ostringstream os;
  os.precision(3);
  os << "Cholesky failed at pivot " << pivot << " of " << n << " with jitter " << jitter << " ("
     << g.kernel_tag() << ")";
  throw NotPositiveDefinite(pivot, jitter, os.str());
}

double trace_product(const GramMatrix& k, const CholeskyFactor& r_factor) {
  const std::size_t n = r_factor.size();
  check_match(k.size(), n, "trace_product");
  std::vector<real_t> diag(n);
  parallel_for(n, [&](std::size_t c) {
    std::vector<real_t> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = k(i, c);
    y = r_factor.solve_lower(y);
    // Back substitution only down to row c; entry c is all the trace needs.
    for (std::size_t row = n; row-- > c;) {
      const auto lrow = r_factor.row(row);
      y[row] /= lrow[row];
      const real_t v = y[row];
      for (std::size_t i = c; i < row; ++i) y[i] -= lrow[i] * v;
    }
    diag[c] = y[c];
  });
  real_t sum = 0;
  for (real_t v : diag) sum += v;
  return static_cast<double>(sum);
}

real_t quadratic_form(std::span<const real_t> v, const CholeskyFactor& r_factor) {
  check_match(v.size(), r_factor.size(), "quadratic_form");
  const auto y = r_factor.solve_lower(v);
  return dot(y.data(), y.data(), y.size());
}

double quadratic_form(std::span<const double> v, const CholeskyFactor& r_factor) {
  std::vector<real_t> wide(v.begin(), v.end());
  return static_cast<double>(quadratic_form(std::span<const real_t>(wide), r_factor));
}

real_t schur_complement(const CholeskyFactor& f, std::span<const real_t> new_cross, real_t new_diag) {
  check_match(new_cross.size(), f.size(), "schur_complement");
  const auto c = f.solve_lower(new_cross);
  return new_diag + static_cast<real_t>(f.jitter()) - dot(c.data(), c.data(), c.size());
}

CholeskyFactor extend_factor(CholeskyFactor f, std::span<const real_t> new_cross, real_t new_diag) {
  check_match(new_cross.size(), f.size(), "extend_factor");
  const std::size_t pivot = f.size();
  const real_t schur = f.append_row(new_cross, new_diag + static_cast<real_t>(f.jitter()));
  if (!(schur > 0) || !std::isfinite(schur)) {
    std::ostringstream os;
    os << "bordered factor has non-positive Schur complement " << static_cast<double>(schur) << " at n=" << pivot + 1;
    throw NotPositiveDefinite(pivot, f.jitter(), os.str());
  }
  return f;
}

std::string format_gram(const GramMatrix& g) {
  std::string out;
  char buf[40];
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(g(i, j)));
      if (j) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void dump_gram(const GramMatrix& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
  out << format_gram(g);
  if (!out) throw Error(ErrorCode::io, "failed writing '" + path + "'");
}

}  // namespace gpmisspec
