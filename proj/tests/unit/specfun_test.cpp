#include "gpmisspec/specfun.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gpmisspec/error.hpp"
#include "oracles.hpp"

using namespace gpmisspec;
using oracle::rel_err;

namespace {

struct Ref {
  double nu, z, value;
};

// mpmath besselk at 50 digits
const std::vector<Ref> kBesselRefs = {
    {0, 1e-6, 1.3931442073626419e+1},   {0, 0.01, 4.721244730161095},
    {0, 0.5, 9.2441907122766586e-1},    {0, 1, 4.2102443824070833e-1},
    {0, 1.9999, 1.1390786025689362e-1}, {0, 2.0001, 1.138798870804414e-1},
    {0, 7.5, 2.4917761635611439e-4},    {0, 30, 2.1324774964630564e-14},
    {0.3, 1e-6, 1.1616463060626913e+2}, {0.3, 0.01, 6.8901026382927698},
    {0.3, 0.5, 9.7647412438178792e-1},  {0.3, 1, 4.3507602420880202e-1},
    {0.3, 1.9999, 1.1605131718169793e-1}, {0.3, 2.0001, 1.1602263341811274e-1},
    {0.3, 7.5, 2.505888044383281e-4},   {0.3, 30, 2.1356270283260949e-14},
    {1, 1e-6, 9.9999999999278428e+5},   {1, 0.01, 9.9973894118296248e+1},
    {1, 0.5, 1.6564411200033009},       {1, 1, 6.0190723019723457e-1},
    {1, 1.9999, 1.3988426583169102e-1}, {1, 2.0001, 1.3984750046881143e-1},
    {1, 7.5, 2.6529739012528953e-4},    {1, 30, 2.1677320018915494e-14},
    {1.5, 1e-6, 1.2533141373148736e+9}, {1.5, 0.5, 3.2251428104997607},
    {2.7, 1e-6, 7.9541020697249694e+16}, {2.7, 0.01, 1.2606216837489578e+6},
    {2.7, 0.5, 3.1458720904338692e+1},  {2.7, 1, 4.3742418261911628},
    {2.7, 1.9999, 4.7331624027596185e-1}, {2.7, 2.0001, 4.7314761840311607e-1},
    {2.7, 7.5, 3.9229888037683485e-4},  {2.7, 30, 2.4030878842059365e-14},
    {4.25, 1e-6, 2.4925533448693803e+27}, {4.25, 0.01, 2.4925341714888225e+10},
    {4.25, 0.5, 1.4713132094552912e+3}, {4.25, 1, 7.3075176735017073e+1},
    {4.25, 1.9999, 3.0979604286196212}, {4.25, 2.0001, 3.0964726713778457},
    {4.25, 7.5, 7.5763313231796519e-4}, {4.25, 30, 2.8663107471912217e-14},
    {10.5, 1e-6, 8.2058120580897887e+71}, {10.5, 0.01, 8.2057904638795027e+29},
    {10.5, 0.5, 1.1805392319985248e+12}, {10.5, 1, 7.9930103108806031e+8},
    {10.5, 7.5, 1.3440211034007015e-1}, {10.5, 30, 1.279044369153198e-13},
};

}  // namespace

TEST(LogGamma, SpecExamples) {
  EXPECT_EQ(log_gamma(1.0), 0.0);
  EXPECT_NEAR(log_gamma(5.0), std::log(24.0), 1e-14);
  EXPECT_NEAR(log_gamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-14);
}

TEST(LogGamma, MatchesHighPrecisionValues) {
  const std::vector<std::pair<double, double>> refs = {
      {0.1, 2.252712651734206},      {0.5, 0.57236494292470009},  {1.5, -0.12078223763524522},
      {2.7, 0.43482055365510453},    {10.25, 13.368023671476046}, {171.5, 709.14316303092824}};
  for (auto [x, want] : refs) EXPECT_LE(rel_err(log_gamma(x), want), 1e-12) << "x=" << x;
}

TEST(LogGamma, RejectsNonPositive) {
  EXPECT_THROW((void)log_gamma(0.0), Error);
  EXPECT_THROW((void)log_gamma(-1.0), Error);
  EXPECT_THROW((void)log_gamma(std::nan("")), Error);
}

TEST(BesselK, SpecExamples) {
  EXPECT_NEAR(bessel_k(0.5, 1.0), std::sqrt(std::numbers::pi / 2) * std::exp(-1.0), 1e-15);
  EXPECT_LE(rel_err(bessel_k(1.5, 2.0), std::sqrt(std::numbers::pi / 4) * std::exp(-2.0) * 1.5), 1e-14);
  EXPECT_LE(rel_err(bessel_k(1.0, 1.0), 0.6019072301972346), 1e-12);
}

TEST(BesselK, MatchesHighPrecisionValues) {
  for (const auto& r : kBesselRefs) {
    EXPECT_LE(rel_err(bessel_k(r.nu, r.z), r.value), 1e-10) << "nu=" << r.nu << " z=" << r.z;
  }
}

TEST(BesselK, MatchesQuadratureOracle) {
  for (double nu : {0.0, 0.3, 1.0, 2.7, 4.25, 7.9}) {
    for (double z : {1e-3, 0.05, 0.7, 1.99, 2.01, 5.0, 15.0, 30.0}) {
      const auto want = static_cast<double>(oracle::bessel_k_quadrature(nu, z));
      EXPECT_LE(rel_err(bessel_k(nu, z), want), 1e-10) << "nu=" << nu << " z=" << z;
    }
  }
}

TEST(BesselK, NumericPathAgreesWithClosedForms) {
  for (int twice : {1, 3, 5, 7}) {
    for (int i = 0; i < 100; ++i) {
      const double z = 1e-3 * std::pow(3e4, i / 99.0);
      const double closed = oracle::bessel_k_half(twice, z);
      EXPECT_LE(rel_err(bessel_k_numeric(twice / 2.0, z), closed), 1e-10) << "nu=" << twice / 2.0 << " z=" << z;
      EXPECT_LE(rel_err(bessel_k_half_integer(twice / 2.0, z), closed), 1e-13);
    }
  }
}

TEST(BesselK, ReflectionSymmetry) {
  for (double nu : {0.3, 0.5, 1.5, 2.7}) {
    for (double z : {0.01, 1.0, 3.0}) {
      EXPECT_LE(rel_err(bessel_k_numeric(-nu, z), bessel_k(nu, z)), 1e-12);
    }
  }
}

TEST(BesselK, StrictlyDecreasingInZ) {
  for (double nu : {0.0, 0.3, 0.5, 1.0, 2.5, 6.3}) {
    double prev = bessel_k(nu, 1e-4);
    for (int i = 1; i < 400; ++i) {
      const double z = 1e-4 + i * 0.1;
      const double v = bessel_k(nu, z);
      ASSERT_LT(v, prev) << "nu=" << nu << " z=" << z;
      prev = v;
    }
  }
}

TEST(BesselK, ModeSelection) {
  EXPECT_EQ(select_bessel_mode(0.5), BesselEvalMode::half_integer);
  EXPECT_EQ(select_bessel_mode(2.5), BesselEvalMode::half_integer);
  EXPECT_EQ(select_bessel_mode(1.0), BesselEvalMode::numeric);
  EXPECT_EQ(select_bessel_mode(0.3), BesselEvalMode::numeric);
  EXPECT_EQ(select_bessel_mode(0.0), BesselEvalMode::numeric);
  EXPECT_EQ(bessel_k_eval(1.5, 1.0).mode, BesselEvalMode::half_integer);
  EXPECT_EQ(bessel_k_eval(1.2, 1.0).mode, BesselEvalMode::numeric);
}

TEST(BesselK, UnderflowIsFlagged) {
  const auto r = bessel_k_eval(0.5, 800.0);
  EXPECT_TRUE(r.underflow);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_FALSE(bessel_k_eval(0.5, 50.0).underflow);
  EXPECT_GT(bessel_k(2.7, 700.0), 0.0);
}

TEST(BesselK, DomainErrors) {
  EXPECT_THROW((void)bessel_k(0.5, 0.0), Error);
  EXPECT_THROW((void)bessel_k(0.5, -1.0), Error);
  EXPECT_THROW((void)bessel_k(-0.5, 1.0), Error);
  EXPECT_THROW((void)bessel_k_half_integer(1.0, 1.0), Error);
}

TEST(ScaledMaternRadial, LimitValues) {
  EXPECT_NEAR(scaled_matern_radial(0.5, 0.0), std::sqrt(std::numbers::pi / 2), 1e-15);
  EXPECT_EQ(scaled_matern_radial(1.0, 0.0), 1.0);
  EXPECT_NEAR(scaled_matern_radial(0.5, 1.0), 0.46106850444789456, 1e-15);
  EXPECT_LE(rel_err(scaled_matern_radial_limit(2.7), std::exp2(1.7) * std::tgamma(2.7)), 1e-14);
}

TEST(ScaledMaternRadial, ContinuousAtSmallArgumentThreshold) {
  for (double nu : {0.3, 0.5, 0.9, 1.0, 1.5, 2.7, 5.5}) {
    const double below = scaled_matern_radial(nu, kSmallArgumentThreshold * (1 - 1e-9));
    const double above = scaled_matern_radial(nu, kSmallArgumentThreshold * (1 + 1e-9));
    EXPECT_LE(rel_err(below, above), 1e-9) << "nu=" << nu;
  }
}

TEST(ScaledMaternRadial, MatchesProductAwayFromZero) {
  for (double nu : {0.3, 1.0, 2.5}) {
    for (double z : {1e-4, 0.1, 1.0, 10.0}) {
      EXPECT_LE(rel_err(scaled_matern_radial(nu, z), std::pow(z, nu) * bessel_k(nu, z)), 1e-13);
      EXPECT_LE(rel_err(static_cast<double>(scaled_matern_radial_wide(nu, z)), scaled_matern_radial(nu, z)), 1e-14);
    }
  }
}
