#pragma once

#include <cmath>
#include <cstddef>

#include "ulab/linalg.hpp"
#include "ulab/rng.hpp"

namespace ulab::testing {

inline double orthonormality_error(const Matrix& q) {
  Matrix g = matmul_tn(q, q);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return frobenius_norm(g);
}

/// Gaussian matrix with random rank deficiency and scaling, for property runs.
inline Matrix random_test_matrix(Rng& rng, std::size_t max_side = 12) {
  const std::size_t rows = 1 + rng.next_u64() % max_side;
  const std::size_t cols = 1 + rng.next_u64() % max_side;
  const std::size_t kmax = std::min(rows, cols);
  const std::size_t rank = rng.next_u64() % 3 == 0 ? rng.next_u64() % (kmax + 1) : kmax;
  Matrix x(rows, cols);
  if (rank > 0) x = matmul_nt(gaussian_matrix(rows, rank, rng), gaussian_matrix(cols, rank, rng));
  x *= std::pow(10.0, static_cast<double>(rng.next_u64() % 7) - 3.0);
  return x;
}

}  // namespace ulab::testing
