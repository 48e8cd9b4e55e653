#pragma once

#include <cstdint>

#include "ulab/matrix.hpp"
#include "ulab/rng.hpp"

namespace ulab::theory {

/// Side length n and target rank r of an n x n recovery problem.
struct ProblemDims {
  std::int64_t n = 1;
  std::int64_t r = 1;

  /// Throws std::invalid_argument unless 1 <= r <= n.
  void validate() const;
  /// Strong-recovery formulas also need r <= n/2.
  bool strong_applicable() const noexcept { return 2 * r <= n; }
};

/// Measurements sufficient for uniform recovery of every rank-r matrix,
/// 4nr - 4r^2. Throws std::invalid_argument when r > n/2.
std::int64_t strong_threshold(const ProblemDims& d);

/// Measurements sufficient to recover one fixed rank-r matrix, 2nr - r^2 + 1.
std::int64_t weak_threshold(const ProblemDims& d);

/// Empirical nuclear-norm weak-recovery location for Gaussian operators,
/// 4nr - 2r^2. Used only as a comparison column.
std::int64_t nuclear_empirical_reference(const ProblemDims& d);

/// Dimension of the manifold of n x n rank-k matrices, 2nk - k^2.
std::int64_t manifold_dim(std::int64_t n, std::int64_t k);

/// Dimension of its unit-Frobenius slice, manifold_dim - 1 (k >= 1).
std::int64_t unit_manifold_dim(std::int64_t n, std::int64_t k);

/// Covering-number bound (3/eps)^d for the Euclidean unit ball in R^d,
/// 0 < eps < 1.
double covering_bound(std::int64_t d, double eps);

/// 2 Phi(eps) - 1 = P(|g| < eps) for g standard normal.
double gaussian_small_ball(double eps);

/// Fraction of `trials` fresh n x n Gaussian matrices A with
/// |<A, X>| < eps, for the normalized all-ones X.
double small_ball_estimate(std::int64_t n, double eps, std::int64_t trials, Rng& rng);

/// Same, for a caller-supplied n x n matrix x (normalized internally).
double small_ball_estimate(const Matrix& x, double eps, std::int64_t trials, Rng& rng);

/// Relative smallest-singular-value threshold for the kernel test below.
inline constexpr double kKernelTol = 1e-10;

/// Draws a random (d+1)-dimensional subspace V of n x n matrices and m
/// Gaussian measurement functionals, and reports whether some nonzero element
/// of V is annihilated by all of them. Always true for m <= d.
bool subspace_counterexample(std::int64_t n, std::int64_t d, std::int64_t m, Rng& rng);

}  // namespace ulab::theory
