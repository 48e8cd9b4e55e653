#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ulab/linalg.hpp"

namespace ulab {

/// Relative smallest-singular-value threshold for the flattened sensing matrix.
inline constexpr double kFullRowRankTol = 1e-10;

/// Linear map X -> (<A_1, X>, ..., <A_m, X>) on n x n matrices.
///
/// Immutable after construction. Holds the m x n^2 flattened sensing matrix
/// Φ and a Householder QR of Φᵀ, which gives the adjoint-range projector
/// and the affine projection onto {X : A(X) = y}.
class MeasurementOperator {
 public:
  /// Takes ownership of the sensing matrices; each must be n x n and finite,
  /// and m <= n^2.
  MeasurementOperator(std::size_t n, std::vector<Matrix> sensing,
                      std::optional<std::uint64_t> seed = std::nullopt);

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return flat_.rows(); }
  /// Seed that regenerates this operator via sample_gaussian_operator, if any.
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }

  Matrix sensing(std::size_t i) const;
  /// m x n^2, row i is A_i in row-major order.
  const Matrix& flattened() const noexcept { return flat_; }

  Vector apply(const Matrix& x) const;
  Matrix adjoint(std::span<const double> y) const;

  /// sigma_min / sigma_max of the flattened sensing matrix (1 for m = 0).
  double conditioning() const noexcept { return conditioning_; }
  bool full_row_rank() const noexcept { return conditioning_ > kFullRowRankTol; }

  /// Frobenius-nearest X' to x with A(X') = y. Throws RankDeficientError if
  /// the operator is not of full row rank.
  Matrix project_affine(const Matrix& x, std::span<const double> y) const;

  /// Orthogonal projection of g onto span{A_i} (the range of the adjoint).
  Matrix project_range(const Matrix& g) const;

  /// Coefficients lambda minimizing ||A*(lambda) - g||_F.
  Vector fit_adjoint(const Matrix& g) const;

  /// Orthonormal basis of the null space of Φ, as n x n matrices.
  std::vector<Matrix> null_space_basis() const;

 private:
  void require_full_rank(const char* who) const;
  Vector flat_arg(const Matrix& x, const char* who) const;

  std::size_t n_;
  Matrix flat_;
  std::optional<std::uint64_t> seed_;
  std::shared_ptr<const HouseholderQR> qr_;  // QR of Φᵀ, absent when m = 0
  Matrix q_rows_;                            // m x n^2, rows are Q's columns
  double conditioning_ = 1.0;
};

/// m Gaussian sensing matrices with i.i.d. N(0, 1) entries. Rejects m > n^2.
MeasurementOperator sample_gaussian_operator(std::size_t n, std::size_t m, Rng& rng);

/// Seed-reproducible variant; the returned operator remembers its seed.
MeasurementOperator sample_gaussian_operator(std::size_t n, std::size_t m,
                                             std::uint64_t seed);

/// Binary operator file: magic "ULAB0001", then little-endian uint64 words
/// n, m, seed, flags (bit 0: seed valid, bit 1: body present), then, when
/// present, m*n^2 IEEE-754 doubles (little-endian) in flattened order.
/// The body is omitted for seed-reproducible operators unless forced.
inline constexpr char kOperatorMagic[8] = {'U', 'L', 'A', 'B', '0', '0', '0', '1'};

void write_operator(std::ostream& out, const MeasurementOperator& op,
                    bool force_body = false);
MeasurementOperator read_operator(std::istream& in);

void save_operator(const std::string& path, const MeasurementOperator& op,
                   bool force_body = false);
MeasurementOperator load_operator(const std::string& path);

}  // namespace ulab
