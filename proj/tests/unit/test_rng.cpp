#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ulab/rng.hpp"

namespace ulab {
namespace {

TEST(Rng, IdenticalSeedIdenticalStream) {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
  Rng c(123), d(123);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(c.normal(), d.normal());
}

TEST(Rng, ChildStreamsAreDistinct) {
  const Rng master(42);
  std::set<std::uint64_t> first_words;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    Rng child = master.child(i);
    first_words.insert(child.next_u64());
  }
  EXPECT_EQ(first_words.size(), 10000u);
  EXPECT_NE(derive_seed(1, 0), derive_seed(0, 1));
}

TEST(Rng, ChildDoesNotAdvanceParent) {
  Rng a(9);
  Rng b(9);
  (void)a.child(3);
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, UniformStaysInHalfOpenUnitInterval) {
  Rng rng(5);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LE(u, 1.0);
  }
}

TEST(Rng, NormalMoments) {
  Rng rng(77);
  const int count = 200000;
  double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
  for (int i = 0; i < count; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
    sum4 += z * z * z * z;
  }
  const double mean = sum / count;
  const double var = sum2 / count - mean * mean;
  // Standard errors: 1/sqrt(N) ~ 0.0022 for the mean, sqrt(2/N) ~ 0.0032 for
  // the variance, sqrt(96/N) ~ 0.022 for the fourth moment.
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.015);
  EXPECT_NEAR(sum4 / count, 3.0, 0.1);
}

}  // namespace
}  // namespace ulab
