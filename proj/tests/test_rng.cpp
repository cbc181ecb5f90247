#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "darkstore/rng.hpp"

using namespace darkstore;

// Reference values from the published algorithms.
TEST(Rng, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
}

TEST(Rng, SplitMixKnownSequence) {
  // First outputs of SplitMix64 seeded with 0.
  Rng r(0);
  EXPECT_EQ(r.next(), 0xe220a8397b1dcdafull);
  EXPECT_EQ(r.next(), 0x6e789e6aa1b965f4ull);
  EXPECT_EQ(r.next(), 0x06c45d188009454full);
}

TEST(Rng, DeriveIsMixOfXor) {
  EXPECT_EQ(derive_seed(42, "layout"), splitmix64_mix(42 ^ fnv1a64("layout")));
}

TEST(Rng, SubstreamDoesNotAdvance) {
  Rng a(5), b(5);
  (void)a.substream("x");
  EXPECT_EQ(a.next(), b.next());
  EXPECT_EQ(a.substream("x").next(), b.substream("x").next());
  EXPECT_NE(a.substream("x").next(), a.substream("y").next());
}

TEST(Rng, UniformRangeAndMean) {
  Rng r(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Rng, BelowIsUnbiased) {
  Rng r(3);
  std::array<int, 7> counts{};
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[r.below(7)];
  // Chi-square with 6 degrees of freedom; 22.46 is the 0.999 quantile.
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi2, 22.46);
}

TEST(Rng, NormalMoments) {
  Rng r(4);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal(1.0, 2.0);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 1.0, 4.0 * 2.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n - mean * mean, 4.0, 0.06);
}

TEST(Rng, PoissonMeanAndVariance) {
  for (double lambda : {0.0, 0.35, 4.0, 37.5}) {
    Rng r(static_cast<std::uint64_t>(lambda * 100) + 1);
    const int n = 100000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(r.poisson(lambda));
      s += k;
      s2 += k * k;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    const double se = std::sqrt(std::max(lambda, 1e-12) / n);
    EXPECT_NEAR(mean, lambda, 5.0 * se + 1e-12) << lambda;
    EXPECT_NEAR(var, lambda, 0.05 * lambda + 1e-12) << lambda;
  }
}

TEST(Rng, PoissonPmfSmallMean) {
  Rng r(8);
  const double lambda = 1.5;
  const int n = 200000;
  std::array<int, 8> counts{};
  for (int i = 0; i < n; ++i) {
    const auto k = r.poisson(lambda);
    if (k < counts.size()) ++counts[k];
  }
  double p = std::exp(-lambda);
  for (std::size_t k = 0; k < 6; ++k) {
    const double expect = p * n;
    EXPECT_NEAR(counts[k], expect, 5.0 * std::sqrt(expect)) << k;
    p *= lambda / static_cast<double>(k + 1);
  }
}

TEST(Rng, DistinctLabelsGiveDistinctSeeds) {
  std::set<std::uint64_t> seen;
  for (int k = 0; k < 10000; ++k) seen.insert(derive_seed(7, "batch/" + std::to_string(k)));
  EXPECT_EQ(seen.size(), 10000u);
}
