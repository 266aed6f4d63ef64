#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "sbvp/rng.hpp"

using namespace sbvp;

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, KnownAnswers) {
  const auto zero = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(zero[0], 0x6627e8d5u);
  EXPECT_EQ(zero[1], 0xe169c58du);
  EXPECT_EQ(zero[2], 0xbc57ac4cu);
  EXPECT_EQ(zero[3], 0x9b00dbd8u);
  const auto ones = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                         {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(ones[0], 0x408f276du);
  EXPECT_EQ(ones[1], 0x41c83b0eu);
  EXPECT_EQ(ones[2], 0xa20bc7c6u);
  EXPECT_EQ(ones[3], 0x6d5451fdu);
}

// Reference quantiles from scipy.special.ndtri.
TEST(NormalQuantile, MatchesReference) {
  const struct {
    double p, z;
  } cases[] = {{1e-300, -37.0470962993612},     {1e-20, -9.262340089798409},
               {1e-10, -6.361340902404056},     {1e-05, -4.264890793922825},
               {0.001, -3.090232306167813},     {0.025, -1.9599639845400545},
               {0.1, -1.2815515655446004},      {0.3, -0.5244005127080409},
               {0.5, 0.0},                      {0.7, 0.5244005127080407},
               {0.975, 1.959963984540054},      {0.999, 3.090232306167813},
               {1 - 1e-10, 6.361340889697422}};
  for (const auto& c : cases) {
    EXPECT_NEAR(normal_quantile(c.p), c.z, 1e-14 * std::max(1.0, std::abs(c.z))) << c.p;
  }
}

TEST(NormalQuantile, EdgesAndSymmetry) {
  EXPECT_EQ(normal_quantile(0.0), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(normal_quantile(1.0), std::numeric_limits<double>::infinity());
  EXPECT_TRUE(std::isnan(normal_quantile(-0.1)));
  for (double p : {0.01, 0.2, 0.4}) EXPECT_NEAR(normal_quantile(p), -normal_quantile(1 - p), 1e-14);
}

TEST(NormalStream, DeterministicAndStreamSeparated) {
  const NormalStream a(7, 0), b(7, 0), c(7, 1), d(8, 0);
  for (std::uint64_t k = 0; k < 64; ++k) {
    EXPECT_EQ(a.normal(k), b.normal(k));
    const double u = a.uniform(k);
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_NE(a.normal(0), c.normal(0));
  EXPECT_NE(a.normal(0), d.normal(0));
}

TEST(NormalStream, SampleMomentsLookNormal) {
  const NormalStream s(2024, 0);
  const int n = 200000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int k = 0; k < n; ++k) {
    const double z = s.normal(static_cast<std::uint64_t>(k));
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  EXPECT_NEAR(m1, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m4, 3.0, 5.0 * std::sqrt(96.0 / n));
}
