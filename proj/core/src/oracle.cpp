#include <cmath>
#include <stdexcept>

#include "ulab/solvers.hpp"

namespace ulab {

namespace {

double det2(const Matrix& a) { return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0); }

}  // namespace

DetOracleResult det_oracle_2x2(const MeasurementOperator& op, std::span<const double> y) {
  if (op.n() != 2 || op.m() != 3) {
    throw std::invalid_argument("det_oracle_2x2: requires n = 2 and m = 3");
  }
  if (y.size() != 3) throw std::invalid_argument("det_oracle_2x2: length mismatch");
  if (!op.full_row_rank()) {
    throw RankDeficientError("det_oracle_2x2: null space is not one-dimensional");
  }

  DetOracleResult out;
  if (norm2(y) == 0.0) {
    // Zero is feasible; rank 0 beats every root of t^2 det(N).
    out.minimal_rank = 0;
    return out;
  }

  const Matrix xp = op.project_affine(Matrix(2, 2), y);
  const Matrix nv = op.null_space_basis().front();

  // det(Xp + t N) = a t^2 + b t + c
  const double a = det2(nv);
  const double b = xp(0, 0) * nv(1, 1) + xp(1, 1) * nv(0, 0) - xp(0, 1) * nv(1, 0) -
                   xp(1, 0) * nv(0, 1);
  const double c = det2(xp);

  // nv has unit Frobenius norm, so |det nv| <= 1/2; below this it is rounding.
  constexpr double kLinearTol = 1e-12;
  std::vector<double> roots;
  if (std::abs(a) <= kLinearTol) {
    if (b != 0.0) roots.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc == 0.0) {
      roots.push_back(-b / (2.0 * a));
    } else if (disc > 0.0) {
      // Cancellation-free pair.
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      roots.push_back(q / a);
      if (q != 0.0) roots.push_back(c / q);
    }
  }

  for (double t : roots) out.rank_one.push_back(xp + nv * t);
  out.minimal_rank = out.rank_one.empty() ? 2 : 1;
  return out;
}

}  // namespace ulab
