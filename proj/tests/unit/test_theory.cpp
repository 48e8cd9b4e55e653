#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ulab/theory.hpp"

namespace ulab::theory {
namespace {

// Independent of std::erf: composite Simpson rule on the standard normal
// density over [-eps, eps].
double small_ball_by_quadrature(double eps) {
  const int panels = 20000;
  const double h = 2.0 * eps / panels;
  auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
  double s = phi(-eps) + phi(eps);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * phi(-eps + i * h);
  return s * h / 3.0;
}

// Frozen from the quadrature oracle above.
constexpr double kSmallBall01 = 0.0796556745540580;
constexpr double kSmallBall1 = 0.682689492137086;

TEST(Thresholds, StrongRecovery) {
  EXPECT_EQ(strong_threshold({10, 1}), 36);
  EXPECT_EQ(strong_threshold({8, 1}), 28);
  for (std::int64_t n = 2; n <= 20; n += 2) EXPECT_EQ(strong_threshold({n, n / 2}), n * n);
  EXPECT_THROW(strong_threshold({5, 3}), std::invalid_argument);
}

TEST(Thresholds, WeakRecovery) {
  EXPECT_EQ(weak_threshold({8, 1}), 16);
  EXPECT_EQ(weak_threshold({10, 2}), 37);
  EXPECT_EQ(weak_threshold({10, 1}), 20);
  for (std::int64_t n = 1; n <= 12; ++n) EXPECT_EQ(weak_threshold({n, n}), n * n + 1);
  EXPECT_THROW(weak_threshold({4, 0}), std::invalid_argument);
  EXPECT_THROW(weak_threshold({4, 5}), std::invalid_argument);
}

TEST(Thresholds, NuclearReference) { EXPECT_EQ(nuclear_empirical_reference({10, 1}), 38); }

TEST(ManifoldDim, Examples) {
  EXPECT_EQ(manifold_dim(10, 2), 36);
  EXPECT_EQ(manifold_dim(10, 0), 0);
  EXPECT_EQ(manifold_dim(10, 4), 64);
  EXPECT_EQ(manifold_dim(10, 4), strong_threshold({10, 2}));
  EXPECT_THROW(manifold_dim(3, 4), std::invalid_argument);
}

TEST(ManifoldDim, UnitSlice) {
  EXPECT_EQ(unit_manifold_dim(10, 2), 35);
  EXPECT_EQ(unit_manifold_dim(4, 4), 15);
  EXPECT_THROW(unit_manifold_dim(4, 0), std::invalid_argument);
}

TEST(ThresholdIdentities, HoldOnAllValidDims) {
  for (std::int64_t n = 1; n <= 40; ++n) {
    for (std::int64_t r = 1; r <= n; ++r) {
      const ProblemDims d{n, r};
      EXPECT_EQ(weak_threshold(d), manifold_dim(n, r) + 1);
      if (2 * r <= n) EXPECT_EQ(strong_threshold(d), manifold_dim(n, 2 * r));
      for (std::int64_t k = 1; k <= n; ++k) {
        EXPECT_EQ(unit_manifold_dim(n, k), manifold_dim(n, k) - 1);
      }
    }
  }
}

TEST(CoveringBound, Examples) {
  EXPECT_DOUBLE_EQ(covering_bound(2, 0.5), 36.0);
  EXPECT_DOUBLE_EQ(covering_bound(1, 0.5), 6.0);
  double prev = 0.0;
  for (double eps = 0.9; eps > 0.01; eps *= 0.7) {
    const double b = covering_bound(3, eps);
    EXPECT_GT(b, prev);
    prev = b;
  }
  EXPECT_THROW(covering_bound(2, 0.0), std::invalid_argument);
  EXPECT_THROW(covering_bound(2, 1.0), std::invalid_argument);
}

TEST(SmallBall, ReferenceMatchesQuadratureOracle) {
  EXPECT_NEAR(small_ball_by_quadrature(0.1), kSmallBall01, 1e-13);
  EXPECT_NEAR(small_ball_by_quadrature(1.0), kSmallBall1, 1e-13);
  EXPECT_NEAR(gaussian_small_ball(0.1), kSmallBall01, 1e-14);
  EXPECT_NEAR(gaussian_small_ball(1.0), kSmallBall1, 1e-14);
}

TEST(SmallBall, EstimateWithinStatedTolerance) {
  Rng rng(42);
  EXPECT_NEAR(small_ball_estimate(4, 0.1, 100000, rng), kSmallBall01, 0.003);
  EXPECT_NEAR(small_ball_estimate(4, 1.0, 100000, rng), kSmallBall1, 0.005);
}

TEST(SmallBall, LinearBoundWithConstantBelowOne) {
  Rng rng(7);
  for (double eps : {0.05, 0.1, 0.2, 0.5}) {
    EXPECT_LE(small_ball_estimate(3, eps, 100000, rng) / eps, 0.9) << "eps " << eps;
  }
}

TEST(SmallBall, CustomMatrixIsNormalized) {
  Rng a(3), b(3);
  Matrix x(2, 2);
  x(0, 1) = 5.0;  // unit after normalization: coordinate functional
  EXPECT_EQ(small_ball_estimate(x, 0.3, 2000, a), small_ball_estimate(x * 0.01, 0.3, 2000, b));
}

TEST(SmallBall, RejectsBadArguments) {
  Rng rng(1);
  EXPECT_THROW(small_ball_estimate(3, 0.0, 1000, rng), std::invalid_argument);
  EXPECT_THROW(small_ball_estimate(3, 0.1, 0, rng), std::invalid_argument);
}

TEST(SubspaceCounterexample, TooFewMeasurementsAlwaysIntersect) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const std::int64_t d = 1 + static_cast<std::int64_t>(seed % 8);
    const std::int64_t m = static_cast<std::int64_t>(seed % (d + 1));
    EXPECT_TRUE(subspace_counterexample(3, d, m, rng)) << "seed " << seed;
  }
}

TEST(SubspaceCounterexample, SquareSystemIsInvertibleAlmostSurely) {
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    failures += subspace_counterexample(3, 4, 5, rng) ? 1 : 0;
  }
  EXPECT_EQ(failures, 0);
}

TEST(SubspaceCounterexample, EmptyMeasurementOfALine) {
  Rng rng(0);
  EXPECT_TRUE(subspace_counterexample(2, 0, 0, rng));
}

TEST(SubspaceCounterexample, RejectsOversizedSubspace) {
  Rng rng(0);
  EXPECT_THROW(subspace_counterexample(2, 4, 1, rng), std::invalid_argument);
}

}  // namespace
}  // namespace ulab::theory
