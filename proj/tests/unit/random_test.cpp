#include "gpmisspec/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

using gpmisspec::CounterRng;

TEST(Philox, KnownAnswerVectors) {
  using B = CounterRng::Block;
  EXPECT_EQ(CounterRng::philox({0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(CounterRng::philox({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(CounterRng::philox({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterRng, PureFunctionOfCoordinates) {
  const CounterRng a(42), b(42), c(43);
  EXPECT_EQ(a.normal(3, 17), b.normal(3, 17));
  EXPECT_NE(a.normal(3, 17), c.normal(3, 17));
  EXPECT_NE(a.normal(3, 17), a.normal(4, 17));
  EXPECT_NE(a.normal(3, 16), a.normal(3, 17));
}

TEST(CounterRng, UniformInOpenInterval) {
  const CounterRng r(1);
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform(0, i);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
}

TEST(CounterRng, NormalMoments) {
  const CounterRng r(9);
  const int n = 200000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal(1, i);
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 5 / std::sqrt(double(n)));
  EXPECT_NEAR(s2 / n, 1.0, 5 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 5 * std::sqrt(96.0 / n));
}
