#include "gpmisspec/mle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "gpmisspec/error.hpp"
#include "oracles.hpp"

using namespace gpmisspec;
using oracle::rel_err;

namespace {

MisspecScenario scenario(double nu0, double theta0, double sigma0, double nu, double theta, std::size_t d = 1) {
  return {{nu0, theta0, sigma0}, {nu, theta, 1.0}, d};
}

}  // namespace

TEST(Scenario, Validation) {
  EXPECT_NO_THROW(scenario(0.5, 1, 2, 1.5, 1).validate());
  MisspecScenario s = scenario(0.5, 1, 2, 1.5, 1);
  s.model.sigma = 2;
  EXPECT_THROW(s.validate(), Error);
  EXPECT_EQ(scenario(0.5, 1, 1, 1.5, 1).theoretical_slope(), 2.0);
  EXPECT_EQ(scenario(0.5, 1, 1, 2.5, 1, 2).theoretical_slope(), 2.0);
  EXPECT_TRUE(scenario(0.5, 1, 1, 1.5, 1).has_rate_theory());
  EXPECT_FALSE(scenario(1.5, 1, 1, 0.5, 1).has_rate_theory());
}

TEST(ScaleMle, SinglePoint) {
  const auto r = KernelHandle::matern({0.5, 1, 1}, 1);
  const std::vector<double> data{2.0};
  EXPECT_LE(rel_err(scale_mle(r, Design(1, {0.7}), data), 4 / std::sqrt(std::numbers::pi / 2)), 1e-14);
  EXPECT_NEAR(scale_mle(r, Design(1, {0.7}), data), 3.1915383, 1e-7);
}

TEST(ScaleMle, ZeroIffDataZero) {
  const auto r = KernelHandle::matern({1.5, 2, 1}, 1);
  const Design d = gen_grid(1, 10);
  EXPECT_EQ(scale_mle(r, d, std::vector<double>(10, 0.0)), 0.0);
  std::vector<double> v(10, 0.0);
  v[3] = 1e-3;
  EXPECT_GT(scale_mle(r, d, v), 0.0);
  EXPECT_THROW((void)scale_mle(r, d, std::vector<double>(9, 1.0)), Error);
  EXPECT_THROW((void)scale_mle(r, Design(1, {}), std::vector<double>{}), Error);
}

TEST(ExpectedMle, Unbiased) {
  for (const Design& d : {gen_grid(1, 50), gen_halton(2, 40)}) {
    const auto s = scenario(1.5, 2, 2, 1.5, 2, d.dim());
    EXPECT_LE(rel_err(expected_mle(s, d), 4.0), 1e-8);
    EXPECT_LE(rel_err(expected_mle(scenario(0.5, 1, 1, 0.5, 1, d.dim()), d), 1.0), 1e-8);
  }
  EXPECT_THROW((void)expected_mle(scenario(0.5, 1, 1, 0.5, 1), Design(1, {})), Error);
}

TEST(ExpectedMle, RangeMisspecifiedWithinBounds) {
  const auto s = scenario(1.5, 2, 1, 1.5, 1);
  const auto b = matern_range_bounds(s);
  EXPECT_EQ(b.lower, 0.5);
  EXPECT_EQ(b.upper, 8.0);
  for (const Design& d : {gen_grid(1, 7), gen_halton(1, 100), gen_jittered_grid(1, 30, 0.9, 2)}) {
    const double v = expected_mle(s, d);
    EXPECT_GE(v, 0.5);
    EXPECT_LE(v, 8.0);
  }
}

TEST(ExpectedMle, ScaleEquivariance) {
  const Design d = gen_halton(1, 64);
  const double a = expected_mle(scenario(0.5, 1, 1.3, 1.5, 2), d);
  const double b = expected_mle(scenario(0.5, 1, 2.6, 1.5, 2), d);
  EXPECT_LE(rel_err(b, 4 * a), 1e-12);
}

TEST(ExpectedMle, OrderFree) {
  const Design d = gen_halton(1, 48);
  std::vector<std::size_t> order(48);
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());
  const auto s = scenario(0.5, 1, 1, 1.5, 1);
  EXPECT_LE(rel_err(expected_mle(s, d.permuted(order)), expected_mle(s, d)), 1e-10);
  const auto t1 = mle_decomposition(s, d).terms;
  const auto t2 = mle_decomposition(s, d.permuted(order)).terms;
  EXPECT_GT(std::abs(t1[5].ratio_sq - t2[5].ratio_sq), 1e-3 * t1[5].ratio_sq);
}

TEST(Decomposition, FirstTermIsDiagonalRatio) {
  const auto s = scenario(0.5, 2, 1.5, 2.5, 1);
  const auto r = mle_decomposition(s, gen_grid(1, 8));
  const double want = 2.25 * std::exp2(-0.5) * std::tgamma(0.5) / (std::exp2(1.5) * std::tgamma(2.5));
  EXPECT_LE(rel_err(r.terms[0].ratio_sq, want), 1e-14);
  EXPECT_EQ(r.terms[0].n, 1u);
}

TEST(Decomposition, AllOnesWhenKernelsCoincide) {
  const auto r = mle_decomposition(scenario(1.5, 3, 1, 1.5, 3, 2), gen_halton(2, 64));
  for (const auto& t : r.terms) EXPECT_NEAR(t.ratio_sq, 1.0, 1e-8);
}

TEST(Decomposition, MeanEqualsTrace) {
  for (const auto& s : {scenario(0.5, 1, 1, 1.5, 1), scenario(1.5, 2, 1, 1.5, 1), scenario(0.3, 1.7, 1.2, 2.7, 0.8),
                        scenario(2.5, 1, 1, 0.5, 1)}) {
    for (const Design& d : {gen_grid(1, 128), gen_halton(1, 100)}) {
      const auto r = mle_decomposition(s, d);
      EXPECT_LE(r.relative_gap(), 1e-8);
      EXPECT_LE(rel_err(r.mean, expected_mle(s, d)), 1e-8);
      for (const auto& t : r.terms) {
        EXPECT_GT(t.denominator, 0.0);
        EXPECT_GE(t.numerator, 0.0);
      }
      EXPECT_DOUBLE_EQ(r.terms.back().running_mean, r.mean);
    }
  }
}

TEST(Decomposition, DenominatorIsModelVariance) {
  const auto s = scenario(0.5, 1, 1, 0.5, 1);
  const auto r = mle_decomposition(s, Design(1, {0.0, 1.0}));
  const double c = std::sqrt(std::numbers::pi / 2);
  EXPECT_LE(rel_err(r.terms[1].denominator, c * (1 - std::exp(-2.0))), 1e-14);
}

TEST(Decomposition, DegenerateExtensionNamesIndex) {
  const auto k = KernelHandle::custom([](Point a, Point b) { return a[0] == b[0] ? 1.0 : 1.0 - 1e-30; }, 1);
  try {
    (void)mle_decomposition(k, k, Design(1, {0.1, 0.2, 0.3}), JitterPolicy::none());
    FAIL();
  } catch (const NotPositiveDefinite& e) {
    EXPECT_EQ(e.pivot(), 1u);
  }
}

TEST(RangeBounds, Branches) {
  auto b = matern_range_bounds(scenario(0.5, 1, 1, 0.5, 2));
  EXPECT_EQ(b.lower, 0.5);
  EXPECT_EQ(b.upper, 2.0);
  b = matern_range_bounds(scenario(2.5, 3, 1.5, 2.5, 3, 2));
  EXPECT_EQ(b.lower, 2.25);
  EXPECT_EQ(b.upper, 2.25);
  EXPECT_THROW((void)matern_range_bounds(scenario(0.5, 1, 1, 1.5, 1)), Error);
  for (double t0 : {0.5, 1.0, 3.0}) {
    for (double t : {0.7, 2.0}) {
      const auto bb = matern_range_bounds(scenario(1.5, t0, 1, 1.5, t, 2));
      EXPECT_LE(bb.lower, bb.upper);
    }
  }
}

TEST(RangeBounds, ContainmentProperty) {
  for (double nu : {0.5, 1.5}) {
    for (auto [t0, t] : {std::pair{2.0, 1.0}, {1.0, 2.0}, {0.5, 3.0}, {4.0, 1.5}}) {
      for (std::size_t d : {1, 2}) {
        const auto s = scenario(nu, t0, 1.2, nu, t, d);
        const auto b = matern_range_bounds(s);
        const double v = expected_mle(s, gen_halton(d, 60));
        EXPECT_GE(v, b.lower * (1 - 1e-12));
        EXPECT_LE(v, b.upper * (1 + 1e-12));
      }
    }
  }
}

TEST(Driscoll, AnchorTraceEqualsN) {
  const auto s = scenario(1.5, 1, 1, 1.5, 1);
  const std::vector<std::size_t> sizes{32, 64, 128, 256};
  const auto r = driscoll_trace(s, prefix_family(gen_halton(1, 256), sizes));
  for (std::size_t i = 0; i < sizes.size(); ++i) EXPECT_LE(rel_err(r.traces[i], double(sizes[i])), 1e-8);
  EXPECT_NEAR(r.fit.slope, 1.0, 0.02);
  EXPECT_EQ(r.classification, TraceTrend::apparently_divergent);
  EXPECT_EQ(r.label, "finite-N heuristic");
}

TEST(Driscoll, ScalingAndClassification) {
  const std::vector<std::size_t> sizes{16, 32, 64, 128};
  const auto fam = prefix_family(gen_halton(1, 128), sizes);
  const auto a = driscoll_trace(scenario(2.5, 1, 1, 0.5, 1), fam);
  const auto b = driscoll_trace(scenario(2.5, 1, 2, 0.5, 1), fam);
  for (std::size_t i = 0; i < sizes.size(); ++i) EXPECT_LE(rel_err(b.traces[i], 4 * a.traces[i]), 1e-12);
  EXPECT_NEAR(a.fit.slope, b.fit.slope, 1e-12);
  // classification follows the thresholds whatever the slope turns out to be
  const auto expected = a.fit.slope <= kBoundedSlope    ? TraceTrend::apparently_bounded
                        : a.fit.slope >= kDivergentSlope ? TraceTrend::apparently_divergent
                                                         : TraceTrend::inconclusive;
  EXPECT_EQ(a.classification, expected);
  EXPECT_EQ(to_string(TraceTrend::apparently_bounded), "apparently-bounded");
  EXPECT_EQ(to_string(TraceTrend::inconclusive), "inconclusive");
}

TEST(Driscoll, RejectsNonNested) {
  const auto s = scenario(1.5, 1, 1, 1.5, 1);
  const std::vector<Design> fam{gen_grid(1, 8), gen_grid(1, 16), gen_grid(1, 32)};
  try {
    (void)driscoll_trace(s, fam);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_nested);
  }
  const Design h = gen_halton(1, 64);
  EXPECT_THROW((void)driscoll_trace(s, std::vector<Design>{h.prefix(8), h.prefix(16)}), Error);
  EXPECT_THROW((void)prefix_family(h, std::vector<std::size_t>{16, 16, 32}), Error);
}
