#pragma once

#include <cstddef>
#include <span>

#include "ulab/errors.hpp"
#include "ulab/matrix.hpp"
#include "ulab/rng.hpp"

namespace ulab {

inline constexpr double kDefaultRankTol = 1e-8;

/// Thin SVD x = U diag(sigma) Vᵀ with k = min(rows, cols).
struct SvdResult {
  Matrix u;      ///< rows x k, orthonormal columns
  Vector sigma;  ///< k values, nonincreasing, >= 0
  Matrix v;      ///< cols x k, orthonormal columns

  Matrix reconstruct() const;
};

/// One-sided (Hestenes) Jacobi SVD with cyclic sweeps.
///
/// Sweeps stop once every column pair satisfies
/// |w_pᵀw_q| <= tol * ||w_p|| ||w_q|| with tol = max(1e-14, 4 rows eps).
/// Left singular vectors for zero (or numerically lost) singular values are
/// completed to an orthonormal set. Each U column has its largest-magnitude
/// entry made nonnegative; V follows.
///
/// Throws std::invalid_argument for non-finite input and ConvergenceError if
/// the sweep cap is exceeded.
SvdResult svd(const Matrix& x);

/// Singular values only, nonincreasing.
Vector singular_values(const Matrix& x);

/// Number of singular values above rel_tol * sigma_1 (0 for the zero matrix).
std::size_t matrix_rank(const Matrix& x, double rel_tol = kDefaultRankTol);

double frobenius_norm(const Matrix& x);
double nuclear_norm(const Matrix& x);
double spectral_norm(const Matrix& x);

/// Householder QR of a tall (rows >= cols) matrix, reflectors kept in
/// compact form.
class HouseholderQR {
 public:
  explicit HouseholderQR(const Matrix& a);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  /// Upper-triangular cols x cols factor.
  Matrix r() const;
  /// Explicit rows x cols factor with orthonormal columns.
  Matrix thin_q() const;

  Vector apply_qt(std::span<const double> b) const;
  /// Q * z for z of length rows.
  Vector apply_q(std::span<const double> z) const;

  /// min |R_ii| / max |R_ii|; 0 for a zero matrix.
  double diagonal_ratio() const noexcept;

  /// Solve R x = c (back substitution), c of length cols.
  Vector solve_r(std::span<const double> c) const;
  /// Solve Rᵀ z = c (forward substitution), c of length cols.
  Vector solve_rt(std::span<const double> c) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  Matrix packed_;  // R above the diagonal, reflector tails below
  Vector head_;    // reflector first components
  Vector beta_;
  Vector rdiag_;
};

/// Relative |R_ii| threshold below which least_squares reports rank deficiency.
inline constexpr double kLeastSquaresRankTol = 1e-12;

/// argmin ||a x - b||_2 through Householder QR. Requires rows >= cols and full
/// column rank; throws RankDeficientError otherwise.
Vector least_squares(const Matrix& a, std::span<const double> b);

/// Minimum-norm solution of the underdetermined system a x = b (rows <= cols,
/// full row rank), via QR of aᵀ. Throws RankDeficientError otherwise.
Vector min_norm_solve(const Matrix& a, std::span<const double> b);

/// rows x cols matrix with i.i.d. standard normal entries drawn in row-major
/// order from rng.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace ulab
