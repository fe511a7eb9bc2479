#include "gpmisspec/kernels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gpmisspec/error.hpp"
#include "oracles.hpp"

using namespace gpmisspec;
using oracle::rel_err;

namespace {
const double kSqrtHalfPi = std::sqrt(std::numbers::pi / 2);
}

TEST(MaternEval, SpecExamples) {
  const MaternParams p{0.5, 1, 1};
  const std::vector<double> x{0.3}, y{0.3}, z{1.0}, o{0.0};
  EXPECT_NEAR(matern_eval(p, x, y), kSqrtHalfPi, 1e-15);
  EXPECT_NEAR(matern_eval(p, o, z), kSqrtHalfPi * std::exp(-1.0), 1e-15);
  const MaternParams p2{0.5, 1, 2};
  EXPECT_EQ(matern_eval(p2, o, z), 4 * matern_eval(p, o, z));
}

TEST(MaternEval, DiagonalIsNotNormalized) {
  for (double nu : {0.5, 1.0, 1.5, 2.7}) {
    const MaternParams p{nu, 3.0, 1.5};
    const std::vector<double> x{0.2, 0.4};
    EXPECT_LE(rel_err(matern_eval(p, x, x), 2.25 * std::exp2(nu - 1) * std::tgamma(nu)), 1e-14);
  }
}

TEST(MaternEval, HalfIntegerClosedForms) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int twice : {1, 3, 5}) {
    const double nu = twice / 2.0;
    const MaternParams p{nu, 2.5, 1.3};
    for (int i = 0; i < 50; ++i) {
      const std::vector<double> x{u(gen), u(gen)}, y{u(gen), u(gen)};
      const double r = std::hypot(x[0] - y[0], x[1] - y[1]);
      const double z = p.theta * r;
      const double want = p.sigma * p.sigma * std::pow(z, nu) * oracle::bessel_k_half(twice, z);
      EXPECT_LE(rel_err(matern_eval(p, x, y), want), 1e-10);
    }
  }
}

TEST(MaternEval, SymmetricAndIsotropic) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  const MaternParams p{1.3, 4.0, 1.0};
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> x{u(gen), u(gen)}, y{u(gen), u(gen)};
    EXPECT_EQ(matern_eval(p, x, y), matern_eval(p, y, x));
    // rotate the difference by 90 degrees about x and translate
    const std::vector<double> x2{0.5, 0.5}, y2{0.5 - (y[1] - x[1]), 0.5 + (y[0] - x[0])};
    EXPECT_LE(rel_err(matern_eval(p, x2, y2), matern_eval(p, x, y)), 1e-12);
    EXPECT_LT(matern_eval(p, x, y), matern_eval(p, x, x));
  }
}

TEST(MaternEval, DimensionMismatch) {
  const std::vector<double> x{0.1}, y{0.1, 0.2};
  EXPECT_THROW((void)matern_eval({0.5, 1, 1}, x, y), Error);
}

TEST(MaternParams, Validation) {
  EXPECT_NO_THROW((MaternParams{0.5, 1, 1}.validate()));
  EXPECT_THROW((MaternParams{0, 1, 1}.validate()), Error);
  EXPECT_THROW((MaternParams{0.5, -1, 1}.validate()), Error);
  EXPECT_THROW((MaternParams{0.5, 1, std::nan("")}.validate()), Error);
  EXPECT_THROW((MaternParams{0.5, 1, INFINITY}.validate()), Error);
}

TEST(SpectralDensity, SpecExamples) {
  const std::vector<double> zero{0.0};
  EXPECT_LE(rel_err(matern_spectral_density({0.5, 1, 1}, 1, zero), 1 / std::sqrt(2 * std::numbers::pi)), 1e-14);
  const double c = matern_spectral_density({0.5, 1, 1}, 1, zero);
  for (double xi : {0.1, 1.0, 7.0, 100.0}) {
    const std::vector<double> v{xi};
    EXPECT_LE(rel_err(matern_spectral_density({0.5, 1, 1}, 1, v) * (1 + xi * xi), c), 1e-12);
  }
}

TEST(SpectralDensity, MatchesHighPrecisionValues) {
  const std::vector<double> xi2{1.3, 0.0}, xi3{0.0, 4.0, 0.0};
  EXPECT_LE(rel_err(matern_spectral_density({1.5, 2.0, 1}, 2, xi2), 0.061988431270288883), 1e-13);
  EXPECT_LE(rel_err(matern_spectral_density({2.5, 0.7, 1}, 3, xi3), 6.9275395251265113e-6), 1e-13);
}

TEST(SpectralDensity, StrictlyDecaying) {
  const MaternParams p{1.7, 3.0, 2.0};
  double prev = INFINITY;
  for (double r = 0; r < 50; r += 0.5) {
    const std::vector<double> xi{r / std::sqrt(2.0), r / std::sqrt(2.0)};
    const double v = matern_spectral_density(p, 2, xi);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(SobolevOrder, Arithmetic) {
  EXPECT_EQ(sobolev_order({0.5, 1, 1}, 1), 1.0);
  EXPECT_EQ(sobolev_order({1.5, 1, 1}, 2), 2.5);
  EXPECT_EQ(rate_exponent({0.5, 1, 1}, {1.5, 1, 1}, 1), 2.0);
  EXPECT_EQ(rate_exponent({0.5, 3, 1}, {2.5, 1, 1}, 2), 2.0);
}

TEST(KernelSpec, ParsesAnyOrderWithDefaults) {
  EXPECT_EQ(parse_kernel_spec("matern:nu=1.5,theta=2,sigma=3"), (MaternParams{1.5, 2, 3}));
  EXPECT_EQ(parse_kernel_spec("matern:sigma=3,nu=1.5"), (MaternParams{1.5, 1, 3}));
  EXPECT_EQ(parse_kernel_spec("matern:nu=0.5"), (MaternParams{0.5, 1, 1}));
}

TEST(KernelSpec, RejectsMalformed) {
  for (const char* bad : {"", "matern", "matern:", "gauss:nu=1", "matern:theta=2", "matern:nu=1,nu=2",
                          "matern:nu=1,rho=2", "matern:nu=abc", "matern:nu=-1", "matern:nu=1,"}) {
    EXPECT_THROW((void)parse_kernel_spec(bad), Error) << bad;
  }
}

TEST(KernelSpec, RoundTrips) {
  const MaternParams p{0.1 + 0.2, 1.0 / 3.0, 2.0 / 7.0};
  EXPECT_EQ(parse_kernel_spec(format_kernel_spec(p)), p);
}

TEST(KernelHandle, MaternAndScaled) {
  const auto k = KernelHandle::matern({1.5, 2, 1}, 2);
  const std::vector<double> x{0.1, 0.2}, y{0.4, 0.9};
  EXPECT_EQ(k.dim(), 2u);
  ASSERT_TRUE(k.matern_params().has_value());
  EXPECT_EQ(k(x, y), matern_eval({1.5, 2, 1}, x, y));
  const auto k4 = k.scaled(4.0);
  EXPECT_LE(rel_err(k4(x, y), 4 * k(x, y)), 1e-15);
  EXPECT_LE(rel_err(k4.matern_params()->sigma, 2.0), 1e-15);
  EXPECT_THROW((void)k.scaled(0.0), Error);
}

TEST(KernelHandle, CustomCallback) {
  const auto k = KernelHandle::custom([](Point x, Point y) { return std::exp(-std::abs(x[0] - y[0])); }, 1, "exp");
  const std::vector<double> x{0.0}, y{1.0};
  EXPECT_EQ(k.tag(), "exp");
  EXPECT_FALSE(k.matern_params().has_value());
  EXPECT_NEAR(k(x, y), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(k.scaled(3.0)(x, y), 3 * std::exp(-1.0), 1e-15);
  EXPECT_THROW((void)k(x, std::vector<double>{0.0, 1.0}), Error);
}
