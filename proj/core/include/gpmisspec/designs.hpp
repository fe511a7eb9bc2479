#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gpmisspec {

enum class DesignKind { grid, halton, jittered_grid, user };

[[nodiscard]] std::string to_string(DesignKind kind);

/// Ordered, pairwise-distinct points in [0,1]^d. Order matters: sequential
/// decompositions condition point n on points 1..n-1.
class Design {
 public:
  /// `coords` holds N*d values, point-major. Throws Error(invalid_design) if a
  /// point leaves [0,1]^d or two points coincide. N = 0 is allowed.
  Design(std::size_t dim, std::vector<double> coords, DesignKind kind = DesignKind::user);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  [[nodiscard]] bool empty() const noexcept { return coords_.empty(); }
  [[nodiscard]] DesignKind kind() const noexcept { return kind_; }

  [[nodiscard]] std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  [[nodiscard]] const std::vector<double>& coords() const noexcept { return coords_; }

  /// First n points, same kind.
  [[nodiscard]] Design prefix(std::size_t n) const;
  /// True if this design equals the first size() points of `other`.
  [[nodiscard]] bool is_prefix_of(const Design& other) const noexcept;
  /// Reordered copy: result point i = this point order[i].
  [[nodiscard]] Design permuted(std::span<const std::size_t> order) const;

  /// FNV-1a digest of dimension and coordinate bits.
  [[nodiscard]] std::uint64_t fingerprint() const noexcept;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  DesignKind kind_;
};

/// Midpoint grid {(2i-1)/(2m)}^d, N = m^d. In d = 1 points are visited in
/// van der Corput order (cells in the order first hit by the base-2 radical
/// inverse sequence), so every prefix is spread over [0,1]. In d >= 2 the
/// order is row-major with the first coordinate varying slowest.
[[nodiscard]] Design gen_grid(std::size_t dim, std::size_t per_axis);

/// Halton points with prime bases 2, 3, 5, 7, 11, 13, indices 1..N. d <= 6.
[[nodiscard]] Design gen_halton(std::size_t dim, std::size_t count);

/// Midpoint grid with each point displaced uniformly by up to
/// `amplitude` * (half cell width) per axis, deterministic in `seed`.
[[nodiscard]] Design gen_jittered_grid(std::size_t dim, std::size_t per_axis, double amplitude,
                                       std::uint64_t seed);

struct GeometryReport {
  double fill_distance = 0;
  double separation_radius = 0;
  double ratio = 0;  ///< fill / separation
  /// Candidate points per axis of the sup-search; 0 when the value is exact (d = 1).
  std::size_t resolution_used = 0;
};

/// Fill distance sup_x min_n |x - x_n| over [0,1]^d. Exact in d = 1; in d >= 2
/// a lower bound from a resolution^d candidate grid including the corners,
/// accurate to within one candidate spacing times sqrt(d)/2.
[[nodiscard]] GeometryReport fill_distance(const Design& design, std::size_t resolution = 65);

/// Candidate-grid search used for d >= 2, callable in any dimension.
[[nodiscard]] double fill_distance_grid_search(const Design& design, std::size_t resolution);

/// q_N = 1/2 min_{i != j} |x_i - x_j|. Requires N >= 2.
[[nodiscard]] double separation_radius(const Design& design);

/// Fill distance, separation radius and their ratio.
[[nodiscard]] GeometryReport geometry(const Design& design, std::size_t resolution = 65);

struct QuasiUniformityRow {
  std::size_t n = 0;
  double fill_distance = 0;
  double scaled_fill = 0;  ///< h_N N^{1/d}
};

struct QuasiUniformityReport {
  std::vector<QuasiUniformityRow> rows;
  double spread = 0;  ///< max/min of scaled_fill
  double bound = 4;
  bool quasi_uniform = false;
};

/// Flags a family quasi-uniform when max/min of h_N N^{1/d} is <= bound.
[[nodiscard]] QuasiUniformityReport quasi_uniformity_check(std::span<const Design> family,
                                                           double bound = 4.0,
                                                           std::size_t resolution = 65);

/// Point file: header `# d=<int> n=<int>`, then one point per line with
/// space-separated coordinates in 17-significant-digit decimal.
[[nodiscard]] std::string format_design(const Design& design);
void write_design(const Design& design, const std::string& path);
[[nodiscard]] Design read_design(const std::string& path);

}  // namespace gpmisspec
