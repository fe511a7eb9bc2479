#include "gpmisspec/designs.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <vector>

#include "gpmisspec/error.hpp"

using namespace gpmisspec;

namespace {
std::vector<double> flat(const Design& d) { return d.coords(); }
}  // namespace

TEST(GenGrid, OneDimensionalOrdering) {
  EXPECT_EQ(flat(gen_grid(1, 4)), (std::vector<double>{0.125, 0.625, 0.375, 0.875}));
  EXPECT_EQ(flat(gen_grid(1, 1)), (std::vector<double>{0.5}));
  EXPECT_EQ(gen_grid(1, 4).kind(), DesignKind::grid);
}

TEST(GenGrid, NonPowerOfTwoIsAPermutationOfMidpoints) {
  auto c = flat(gen_grid(1, 6));
  std::sort(c.begin(), c.end());
  for (std::size_t i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(c[i], (2.0 * double(i) + 1) / 12.0);
}

TEST(GenGrid, TwoDimensions) {
  const Design d = gen_grid(2, 2);
  ASSERT_EQ(d.size(), 4u);
  for (double v : d.coords()) EXPECT_TRUE(v == 0.25 || v == 0.75);
  EXPECT_EQ(flat(d), (std::vector<double>{0.25, 0.25, 0.25, 0.75, 0.75, 0.25, 0.75, 0.75}));
}

TEST(GenGrid, Errors) {
  EXPECT_THROW((void)gen_grid(1, 0), Error);
  EXPECT_THROW((void)gen_grid(6, std::size_t{1} << 20), Error);
}

TEST(GenHalton, RadicalInverse) {
  EXPECT_EQ(flat(gen_halton(1, 4)), (std::vector<double>{0.5, 0.25, 0.75, 0.125}));
  const Design d = gen_halton(2, 1);
  EXPECT_EQ(d.point(0)[0], 0.5);
  EXPECT_DOUBLE_EQ(d.point(0)[1], 1.0 / 3.0);
  EXPECT_EQ(gen_halton(6, 100).size(), 100u);
}

TEST(GenHalton, DimensionLimit) {
  EXPECT_THROW((void)gen_halton(7, 4), Error);
  try {
    (void)gen_halton(7, 4);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unsupported);
  }
}

TEST(Generators, Deterministic) {
  EXPECT_EQ(flat(gen_grid(2, 7)), flat(gen_grid(2, 7)));
  EXPECT_EQ(flat(gen_halton(3, 50)), flat(gen_halton(3, 50)));
  EXPECT_EQ(flat(gen_jittered_grid(2, 5, 0.5, 9)), flat(gen_jittered_grid(2, 5, 0.5, 9)));
  EXPECT_NE(flat(gen_jittered_grid(2, 5, 0.5, 9)), flat(gen_jittered_grid(2, 5, 0.5, 10)));
}

TEST(GenJitteredGrid, StaysInsideItsCell) {
  const std::size_t m = 8;
  const Design base = gen_grid(1, m);
  const Design j = gen_jittered_grid(1, m, 0.9, 3);
  EXPECT_EQ(j.kind(), DesignKind::jittered_grid);
  for (std::size_t i = 0; i < m; ++i) EXPECT_LE(std::abs(j.point(i)[0] - base.point(i)[0]), 0.9 * 0.5 / m);
  EXPECT_THROW((void)gen_jittered_grid(1, m, 1.0, 3), Error);
}

TEST(Design, Invariants) {
  EXPECT_THROW(Design(1, {0.1, 0.1}), Error);
  EXPECT_THROW(Design(1, {0.1, 1.5}), Error);
  EXPECT_THROW(Design(2, {0.1, 0.2, 0.3}), Error);
  EXPECT_THROW(Design(1, {std::nan("")}), Error);
  EXPECT_NO_THROW(Design(1, {}));
  EXPECT_TRUE(Design(1, {}).empty());
}

TEST(Design, PrefixPermutationFingerprint) {
  const Design h = gen_halton(2, 20);
  const Design p = h.prefix(5);
  EXPECT_EQ(p.size(), 5u);
  EXPECT_TRUE(p.is_prefix_of(h));
  EXPECT_FALSE(gen_grid(2, 4).is_prefix_of(h));
  std::vector<std::size_t> order(20);
  std::iota(order.rbegin(), order.rend(), 0);
  const Design r = h.permuted(order);
  EXPECT_EQ(r.point(0)[0], h.point(19)[0]);
  EXPECT_NE(r.fingerprint(), h.fingerprint());
  EXPECT_EQ(h.fingerprint(), gen_halton(2, 20).fingerprint());
  EXPECT_THROW((void)h.permuted(std::vector<std::size_t>{0, 0}), Error);
}

TEST(FillDistance, SpecExamples) {
  EXPECT_DOUBLE_EQ(fill_distance(gen_grid(1, 4)).fill_distance, 0.125);
  EXPECT_DOUBLE_EQ(fill_distance(Design(1, {0.5})).fill_distance, 0.5);
  EXPECT_DOUBLE_EQ(fill_distance(gen_grid(1, 8)).fill_distance, 0.0625);
  EXPECT_EQ(fill_distance(gen_grid(1, 8)).resolution_used, 0u);
}

TEST(FillDistance, GridSearchAgreesInOneDimension) {
  for (const Design& d : {gen_halton(1, 37), gen_grid(1, 9), gen_jittered_grid(1, 11, 0.7, 1)}) {
    const std::size_t res = 201;
    const double exact = fill_distance(d).fill_distance;
    const double searched = fill_distance_grid_search(d, res);
    EXPECT_LE(searched, exact + 1e-15);
    EXPECT_GE(searched, exact - 1.0 / (res - 1));
  }
  EXPECT_THROW((void)fill_distance_grid_search(gen_grid(2, 2), 1), Error);
}

TEST(FillDistance, TwoDimensionalGrid) {
  // corner (0,0) is at distance sqrt(2)/4 from (0.25, 0.25)
  const auto g = fill_distance(gen_grid(2, 2), 65);
  EXPECT_NEAR(g.fill_distance, std::sqrt(2.0) / 4, 1e-12);
  EXPECT_EQ(g.resolution_used, 65u);
}

TEST(SeparationRadius, SpecExamples) {
  EXPECT_DOUBLE_EQ(separation_radius(gen_grid(1, 4)), 0.125);
  EXPECT_DOUBLE_EQ(separation_radius(Design(1, {0.0, 1.0})), 0.5);
  EXPECT_THROW((void)separation_radius(Design(1, {0.5})), Error);
}

TEST(Geometry, PrefixMonotonicity) {
  const Design h = gen_halton(2, 128);
  double fill = INFINITY, sep = INFINITY;
  for (std::size_t n : {8, 16, 32, 64, 128}) {
    const auto g = geometry(h.prefix(n), 33);
    EXPECT_LE(g.fill_distance, fill + 1e-15);
    EXPECT_LE(g.separation_radius, sep);
    EXPECT_GT(g.fill_distance, 0);
    EXPECT_GT(g.separation_radius, 0);
    fill = g.fill_distance;
    sep = g.separation_radius;
  }
}

TEST(QuasiUniformity, SpecExamples) {
  const std::vector<Design> grids{gen_grid(1, 4), gen_grid(1, 8), gen_grid(1, 16)};
  const auto g = quasi_uniformity_check(grids);
  EXPECT_TRUE(g.quasi_uniform);
  for (const auto& row : g.rows) EXPECT_DOUBLE_EQ(row.scaled_fill, 0.5);

  std::vector<Design> squeezed;
  for (std::size_t n : {4, 16, 64}) {
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = 0.5 * double(i) / double(n - 1);
    squeezed.emplace_back(1, c);
  }
  const auto s = quasi_uniformity_check(squeezed);
  EXPECT_FALSE(s.quasi_uniform);
  for (const auto& row : s.rows) EXPECT_GE(row.fill_distance, 0.25);

  const Design h = gen_halton(1, 256);
  const std::vector<Design> halton{h.prefix(16), h.prefix(64), h};
  EXPECT_TRUE(quasi_uniformity_check(halton).quasi_uniform);
  EXPECT_THROW((void)quasi_uniformity_check(std::vector<Design>{h, h}), Error);
}

TEST(DesignFile, RoundTripsExactly) {
  const auto path = std::filesystem::temp_directory_path() / "gpmisspec_design_rt.txt";
  const Design d = gen_jittered_grid(3, 4, 0.8, 5);
  write_design(d, path.string());
  const Design back = read_design(path.string());
  EXPECT_EQ(back.dim(), 3u);
  EXPECT_EQ(back.coords(), d.coords());
  std::filesystem::remove(path);
  EXPECT_THROW((void)read_design("/nonexistent/dir/x.txt"), Error);
}

TEST(DesignFile, RejectsMalformed) {
  const auto path = std::filesystem::temp_directory_path() / "gpmisspec_design_bad.txt";
  for (const char* text : {"# d=1 n=2\n0.1\n", "# d=2 n=1\n0.1\n", "0.1 0.2\n", "# d=1 n=1\nabc\n",
                           "# d=1 n=2\n0.1\n0.1\n"}) {
    {
      std::FILE* f = std::fopen(path.c_str(), "w");
      std::fputs(text, f);
      std::fclose(f);
    }
    EXPECT_THROW((void)read_design(path.string()), Error) << text;
  }
  std::filesystem::remove(path);
}
