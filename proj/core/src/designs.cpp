#include "gpmisspec/designs.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "gpmisspec/error.hpp"
#include "gpmisspec/parallel.hpp"
#include "gpmisspec/random.hpp"

namespace gpmisspec {
namespace {

constexpr std::array<std::size_t, 6> kHaltonBases = {2, 3, 5, 7, 11, 13};

double radical_inverse(std::size_t index, std::size_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double factor = inv;
  double result = 0;
  while (index > 0) {
    result += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv;
  }
  return result;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

std::size_t checked_power(std::size_t base, std::size_t exponent) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (base != 0 && n > std::numeric_limits<std::size_t>::max() / base)
      throw Error(ErrorCode::size_limit, "grid size m^d overflows");
    n *= base;
  }
  return n;
}

// Cell indices 0..m-1 in the order first visited by the van der Corput sequence.
std::vector<std::size_t> van_der_corput_order(std::size_t m) {
  std::vector<std::size_t> order;
  order.reserve(m);
  std::vector<bool> taken(m, false);
  for (std::size_t k = 0; order.size() < m; ++k) {
    const auto cell = static_cast<std::size_t>(radical_inverse(k, 2) * static_cast<double>(m));
    if (!taken[cell]) {
      taken[cell] = true;
      order.push_back(cell);
    }
  }
  return order;
}

std::string fmt17(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

}  // namespace

std::string to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::grid: return "grid";
    case DesignKind::halton: return "halton";
    case DesignKind::jittered_grid: return "jittered-grid";
    case DesignKind::user: return "user";
  }
  return "user";
}

Design::Design(std::size_t dim, std::vector<double> coords, DesignKind kind)
    : dim_(dim), coords_(std::move(coords)), kind_(kind) {
  if (dim_ == 0) throw Error(ErrorCode::invalid_design, "design dimension must be >= 1");
  if (coords_.size() % dim_ != 0)
    throw Error(ErrorCode::invalid_design, "coordinate count is not a multiple of the dimension");
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    const double v = coords_[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::invalid_design, "point " + std::to_string(i / dim_) + " has coordinate " + fmt17(v) +
                                                 " outside [0,1]");
    }
  }
  const std::size_t n = size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto lex_less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(coords_.begin() + a * dim_, coords_.begin() + (a + 1) * dim_,
                                        coords_.begin() + b * dim_, coords_.begin() + (b + 1) * dim_);
  };
  std::sort(idx.begin(), idx.end(), lex_less);
  for (std::size_t k = 1; k < n; ++k) {
    if (std::equal(coords_.begin() + idx[k - 1] * dim_, coords_.begin() + (idx[k - 1] + 1) * dim_,
                   coords_.begin() + idx[k] * dim_)) {
      throw Error(ErrorCode::invalid_design, "points " + std::to_string(std::min(idx[k - 1], idx[k])) + " and " +
                                                 std::to_string(std::max(idx[k - 1], idx[k])) + " coincide");
    }
  }
}

Design Design::prefix(std::size_t n) const {
  if (n > size()) throw Error(ErrorCode::invalid_design, "prefix longer than design");
  return Design(dim_, std::vector<double>(coords_.begin(), coords_.begin() + n * dim_), kind_);
}

bool Design::is_prefix_of(const Design& other) const noexcept {
  if (dim_ != other.dim_ || coords_.size() > other.coords_.size()) return false;
  return std::equal(coords_.begin(), coords_.end(), other.coords_.begin());
}

Design Design::permuted(std::span<const std::size_t> order) const {
  if (order.size() != size()) throw Error(ErrorCode::invalid_design, "permutation has wrong length");
  std::vector<double> out;
  out.reserve(coords_.size());
  for (std::size_t i : order) {
    if (i >= size()) throw Error(ErrorCode::invalid_design, "permutation index out of range");
    const auto p = point(i);
    out.insert(out.end(), p.begin(), p.end());
  }
  return Design(dim_, std::move(out), kind_);
}

std::uint64_t Design::fingerprint() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  };
  mix(dim_);
  for (double v : coords_) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    mix(bits);
  }
  return h;
}

Design gen_grid(std::size_t dim, std::size_t per_axis) {
  if (dim == 0) throw Error(ErrorCode::domain, "dimension must be >= 1");
  if (per_axis == 0) throw Error(ErrorCode::domain, "points per axis must be >= 1");
  const std::size_t n = checked_power(per_axis, dim);
  const double m = static_cast<double>(per_axis);
  auto midpoint = [m](std::size_t cell) { return (2.0 * static_cast<double>(cell) + 1.0) / (2.0 * m); };

  std::vector<double> coords;
  coords.reserve(n * dim);
  if (dim == 1) {
    for (std::size_t cell : van_der_corput_order(per_axis)) coords.push_back(midpoint(cell));
  } else {
    std::vector<std::size_t> digits(dim, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < dim; ++k) coords.push_back(midpoint(digits[k]));
      for (std::size_t k = dim; k-- > 0;) {
        if (++digits[k] < per_axis) break;
        digits[k] = 0;
      }
    }
  }
  return Design(dim, std::move(coords), DesignKind::grid);
}

Design gen_halton(std::size_t dim, std::size_t count) {
  if (dim == 0) throw Error(ErrorCode::domain, "dimension must be >= 1");
  if (dim > kHaltonBases.size())
    throw Error(ErrorCode::unsupported, "Halton designs support d <= 6, got d=" + std::to_string(dim));
  if (count == 0) throw Error(ErrorCode::domain, "Halton design needs N >= 1");
  std::vector<double> coords;
  coords.reserve(count * dim);
  for (std::size_t i = 1; i <= count; ++i) {
    for (std::size_t k = 0; k < dim; ++k) coords.push_back(radical_inverse(i, kHaltonBases[k]));
  }
  return Design(dim, std::move(coords), DesignKind::halton);
}

Design gen_jittered_grid(std::size_t dim, std::size_t per_axis, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0 && amplitude < 1.0))
    throw Error(ErrorCode::domain, "jitter amplitude must lie in [0, 1)");
  const Design base = gen_grid(dim, per_axis);
  const CounterRng rng(seed);
  const double half_cell = 0.5 / static_cast<double>(per_axis);
  std::vector<double> coords = base.coords();
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double u = 2.0 * rng.uniform(/*stream=*/0x6a17u, i) - 1.0;
    coords[i] = std::clamp(coords[i] + amplitude * half_cell * u, 0.0, 1.0);
  }
  return Design(dim, std::move(coords), DesignKind::jittered_grid);
}

double fill_distance_grid_search(const Design& design, std::size_t resolution) {
  if (design.empty()) throw Error(ErrorCode::invalid_design, "fill distance needs N >= 1");
  if (resolution < 2) throw Error(ErrorCode::domain, "fill-distance resolution must be >= 2");
  const std::size_t d = design.dim();
  const std::size_t candidates = checked_power(resolution, d);
  const double step = 1.0 / static_cast<double>(resolution - 1);

  constexpr std::size_t chunk = 1024;
  const std::size_t chunks = (candidates + chunk - 1) / chunk;
  std::vector<double> best(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<double> x(d);
    double local = 0;
    const std::size_t end = std::min(candidates, (c + 1) * chunk);
    for (std::size_t flat = c * chunk; flat < end; ++flat) {
      std::size_t rem = flat;
      for (std::size_t k = d; k-- > 0;) {
        x[k] = static_cast<double>(rem % resolution) * step;
        rem /= resolution;
      }
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t n = 0; n < design.size(); ++n) nearest = std::min(nearest, squared_distance(x, design.point(n)));
      local = std::max(local, nearest);
    }
    best[c] = local;
  });
  return std::sqrt(*std::max_element(best.begin(), best.end()));
}

GeometryReport fill_distance(const Design& design, std::size_t resolution) {
  if (design.empty()) throw Error(ErrorCode::invalid_design, "fill distance needs N >= 1");
  GeometryReport report;
  if (design.dim() == 1) {
    std::vector<double> xs = design.coords();
    std::sort(xs.begin(), xs.end());
    double h = std::max(xs.front(), 1.0 - xs.back());
    for (std::size_t i = 1; i < xs.size(); ++i) h = std::max(h, 0.5 * (xs[i] - xs[i - 1]));
    report.fill_distance = h;
    report.resolution_used = 0;
  } else {
    report.fill_distance = fill_distance_grid_search(design, resolution);
    report.resolution_used = resolution;
  }
  return report;
}

double separation_radius(const Design& design) {
  const std::size_t n = design.size();
  if (n < 2) throw Error(ErrorCode::invalid_design, "separation radius needs N >= 2");
  std::vector<double> row_min(n, std::numeric_limits<double>::infinity());
  parallel_for(n - 1, [&](std::size_t i) {
    double local = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < n; ++j) local = std::min(local, squared_distance(design.point(i), design.point(j)));
    row_min[i] = local;
  });
  return 0.5 * std::sqrt(*std::min_element(row_min.begin(), row_min.end()));
}

GeometryReport geometry(const Design& design, std::size_t resolution) {
  GeometryReport report = fill_distance(design, resolution);
  report.separation_radius = separation_radius(design);
  report.ratio = report.fill_distance / report.separation_radius;
  return report;
}

QuasiUniformityReport quasi_uniformity_check(std::span<const Design> family, double bound, std::size_t resolution) {
  if (family.size() < 3) throw Error(ErrorCode::domain, "quasi-uniformity check needs at least 3 designs");
  QuasiUniformityReport report;
  report.bound = bound;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0;
  for (const Design& design : family) {
    QuasiUniformityRow row;
    row.n = design.size();
    row.fill_distance = fill_distance(design, resolution).fill_distance;
    row.scaled_fill = row.fill_distance * std::pow(static_cast<double>(row.n), 1.0 / static_cast<double>(design.dim()));
    lo = std::min(lo, row.scaled_fill);
    hi = std::max(hi, row.scaled_fill);
    report.rows.push_back(row);
  }
  report.spread = hi / lo;
  report.quasi_uniform = report.spread <= bound;
  return report;
}

std::string format_design(const Design& design) {
  std::string out = "# d=" + std::to_string(design.dim()) + " n=" + std::to_string(design.size()) + "\n";
  for (std::size_t i = 0; i < design.size(); ++i) {
    const auto p = design.point(i);
    for (std::size_t k = 0; k < p.size(); ++k) out += (k ? " " : "") + fmt17(p[k]);
    out += "\n";
  }
  return out;
}

void write_design(const Design& design, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
  out << format_design(design);
  if (!out) throw Error(ErrorCode::io, "failed writing '" + path + "'");
}

Design read_design(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "' for reading");
  std::string line;
  std::size_t dim = 0;
  std::size_t n = 0;
  bool have_header = false;
  std::vector<double> coords;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') {
      if (!have_header) {
        if (std::sscanf(line.c_str(), "# d=%zu n=%zu", &dim, &n) != 2 || dim == 0)
          throw Error(ErrorCode::parse, path + ":" + std::to_string(line_no) + ": expected header '# d=<int> n=<int>'");
        have_header = true;
      }
      continue;
    }
    if (!have_header) throw Error(ErrorCode::parse, path + ": missing '# d=<int> n=<int>' header");
    std::istringstream row(line);
    std::string token;
    std::size_t count = 0;
    while (row >> token) {
      double v = 0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc{} || ptr != token.data() + token.size())
        throw Error(ErrorCode::parse, path + ":" + std::to_string(line_no) + ": bad number '" + token + "'");
      coords.push_back(v);
      ++count;
    }
    if (count != dim) {
      throw Error(ErrorCode::parse, path + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                                        " coordinates, got " + std::to_string(count));
    }
  }
  if (!have_header) throw Error(ErrorCode::parse, path + ": missing '# d=<int> n=<int>' header");
  if (coords.size() != n * dim) {
    throw Error(ErrorCode::parse, path + ": header declares n=" + std::to_string(n) + " but file has " +
                                      std::to_string(coords.size() / dim) + " points");
  }
  return Design(dim, std::move(coords), DesignKind::user);
}

}  // namespace gpmisspec
