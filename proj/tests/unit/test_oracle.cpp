#include <gtest/gtest.h>

#include <cmath>

#include "ulab/solvers.hpp"

namespace ulab {
namespace {

double det2(const Matrix& a) { return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0); }

// Sensing matrices orthogonal to the identity, so the feasible line is Xp + t I.
MeasurementOperator traceless_operator() {
  return MeasurementOperator(2, {Matrix{{0, 1}, {0, 0}}, Matrix{{0, 0}, {1, 0}},
                                 Matrix{{1, 0}, {0, -1}}});
}

double rel_diff(const Matrix& a, const Matrix& b) {
  return frobenius_norm(a - b) / std::max(frobenius_norm(b), 1e-300);
}

TEST(DetOracle, KnownRoots) {
  // Xp = diag(1, -1): det(Xp + t I) = t^2 - 1.
  const auto op = traceless_operator();
  const DetOracleResult res = det_oracle_2x2(op, Vector{0, 0, 2});
  EXPECT_EQ(res.minimal_rank, 1u);
  ASSERT_EQ(res.rank_one.size(), 2u);
  const Matrix a{{2, 0}, {0, 0}}, b{{0, 0}, {0, -2}};
  const bool order = rel_diff(res.rank_one[0], a) < 1e-12;
  EXPECT_LE(rel_diff(res.rank_one[order ? 0 : 1], a), 1e-12);
  EXPECT_LE(rel_diff(res.rank_one[order ? 1 : 0], b), 1e-12);
}

TEST(DetOracle, NegativeDiscriminant) {
  // Xp is a quarter rotation: det(Xp + t I) = t^2 + 1 has no real root.
  const DetOracleResult res = det_oracle_2x2(traceless_operator(), Vector{-1, 1, 0});
  EXPECT_TRUE(res.rank_one.empty());
  EXPECT_EQ(res.minimal_rank, 2u);
}

TEST(DetOracle, HomogeneousData) {
  const DetOracleResult res = det_oracle_2x2(traceless_operator(), Vector{0, 0, 0});
  EXPECT_TRUE(res.rank_one.empty());
  EXPECT_EQ(res.minimal_rank, 0u);
}

TEST(DetOracle, RootsAreFeasibleAndSingular) {
  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    const auto op = sample_gaussian_operator(2, 3, rng);
    Vector y(3);
    for (double& v : y) v = rng.normal();
    const DetOracleResult res = det_oracle_2x2(op, y);
    for (const Matrix& x : res.rank_one) {
      EXPECT_LE(constraint_residual(op, x, y), 1e-10);
      EXPECT_LE(std::abs(det2(x)), 1e-10 * frobenius_norm(x) * frobenius_norm(x));
    }
  }
}

TEST(DetOracle, TruthIsAmongRoots) {
  Rng rng(10);
  for (int t = 0; t < 200; ++t) {
    Vector u{rng.normal(), rng.normal()}, v{rng.normal(), rng.normal()};
    const Matrix truth = outer(u, v);
    const auto op = sample_gaussian_operator(2, 3, rng);
    const DetOracleResult res = det_oracle_2x2(op, op.apply(truth));
    double best = std::numeric_limits<double>::infinity();
    for (const Matrix& x : res.rank_one) best = std::min(best, rel_diff(x, truth));
    EXPECT_LE(best, 1e-10) << "instance " << t;
  }
}

TEST(DetOracle, RejectsWrongShapes) {
  EXPECT_THROW(det_oracle_2x2(sample_gaussian_operator(3, 3, 1), Vector(3, 0.0)),
               std::invalid_argument);
  EXPECT_THROW(det_oracle_2x2(sample_gaussian_operator(2, 2, 1), Vector(2, 0.0)),
               std::invalid_argument);
  const Matrix a{{1, 0}, {0, 0}};
  EXPECT_THROW(det_oracle_2x2(MeasurementOperator(2, {a, a, Matrix{{0, 1}, {0, 0}}}),
                              Vector(3, 1.0)),
               RankDeficientError);
}

TEST(DetOracle, FeasibilityMatchesARoot) {
  Rng rng(77);
  for (int t = 0; t < 50; ++t) {
    const Matrix truth = outer(Vector{rng.normal(), rng.normal()},
                               Vector{rng.normal(), rng.normal()});
    const auto op = sample_gaussian_operator(2, 3, rng);
    const Vector y = op.apply(truth);
    const FeasibilityResult feas = rank_feasibility(op, y, 1);
    ASSERT_TRUE(feas.feasible) << "instance " << t;
    double best = std::numeric_limits<double>::infinity();
    for (const Matrix& x : det_oracle_2x2(op, y).rank_one)
      best = std::min(best, rel_diff(feas.x_best, x));
    EXPECT_LE(best, 1e-6) << "instance " << t;
  }
}

// The feasible line runs along a rank-one direction, so det is linear on it.
MeasurementOperator rank_one_kernel_operator(Rng& rng) {
  Matrix kernel = outer(Vector{rng.normal(), rng.normal()}, Vector{rng.normal(), rng.normal()});
  kernel *= 1.0 / frobenius_norm(kernel);
  std::vector<Matrix> sensing;
  for (int i = 0; i < 3; ++i) {
    Matrix a = gaussian_matrix(2, 2, rng);
    a -= kernel * inner(a, kernel);
    sensing.push_back(a);
  }
  return MeasurementOperator(2, std::move(sensing));
}

TEST(DetOracle, LinearCaseHasUniqueRootRecoveredByRankMinimize) {
  Rng rng(404);
  for (int t = 0; t < 50; ++t) {
    const Matrix truth = outer(Vector{rng.normal(), rng.normal()},
                               Vector{rng.normal(), rng.normal()});
    const auto op = rank_one_kernel_operator(rng);
    const Vector y = op.apply(truth);
    const DetOracleResult oracle = det_oracle_2x2(op, y);
    ASSERT_EQ(oracle.rank_one.size(), 1u) << "instance " << t;
    EXPECT_LE(rel_diff(oracle.rank_one.front(), truth), 1e-10) << "instance " << t;
    const RecoveryResult res = rank_minimize(op, y, 2);
    EXPECT_EQ(res.rank_hat, 1u) << "instance " << t;
    EXPECT_LE(rel_diff(res.x_hat, truth), 1e-6) << "instance " << t;
  }
}

TEST(DetOracle, AgreesWithRankMinimize) {
  Rng rng(2023);
  for (int t = 0; t < 200; ++t) {
    const auto op = sample_gaussian_operator(2, 3, rng);
    Vector y(3);
    if (t % 2 == 0) {
      y = op.apply(outer(Vector{rng.normal(), rng.normal()}, Vector{rng.normal(), rng.normal()}));
    } else {
      for (double& v : y) v = rng.normal();
    }
    const DetOracleResult oracle = det_oracle_2x2(op, y);
    const RecoveryResult res = rank_minimize(op, y, 2);
    EXPECT_EQ(res.rank_hat, oracle.minimal_rank) << "instance " << t;
    if (oracle.rank_one.size() == 1)
      EXPECT_LE(rel_diff(res.x_hat, oracle.rank_one.front()), 1e-6) << "instance " << t;
  }
}

}  // namespace
}  // namespace ulab
