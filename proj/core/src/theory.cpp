#include "ulab/theory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ulab/linalg.hpp"

namespace ulab::theory {

void ProblemDims::validate() const {
  if (n < 1) throw std::invalid_argument("ProblemDims: n must be >= 1");
  if (r < 1 || r > n) {
    throw std::invalid_argument("ProblemDims: r must satisfy 1 <= r <= n (got r=" +
                                std::to_string(r) + ", n=" + std::to_string(n) + ")");
  }
}

std::int64_t strong_threshold(const ProblemDims& d) {
  d.validate();
  if (!d.strong_applicable()) {
    throw std::invalid_argument("strong_threshold: requires r <= n/2");
  }
  return 4 * d.n * d.r - 4 * d.r * d.r;
}

std::int64_t weak_threshold(const ProblemDims& d) {
  d.validate();
  return 2 * d.n * d.r - d.r * d.r + 1;
}

std::int64_t nuclear_empirical_reference(const ProblemDims& d) {
  d.validate();
  return 4 * d.n * d.r - 2 * d.r * d.r;
}

std::int64_t manifold_dim(std::int64_t n, std::int64_t k) {
  if (n < 1 || k < 0 || k > n) {
    throw std::invalid_argument("manifold_dim: requires 0 <= k <= n, n >= 1");
  }
  return 2 * n * k - k * k;
}

std::int64_t unit_manifold_dim(std::int64_t n, std::int64_t k) {
  if (k == 0) {
    throw std::invalid_argument("unit_manifold_dim: no unit-norm rank-0 matrix");
  }
  return manifold_dim(n, k) - 1;
}

double covering_bound(std::int64_t d, double eps) {
  if (d < 1) throw std::invalid_argument("covering_bound: d must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("covering_bound: eps must lie in (0, 1)");
  }
  return std::pow(3.0 / eps, static_cast<double>(d));
}

double gaussian_small_ball(double eps) {
  return eps <= 0.0 ? 0.0 : std::erf(eps / std::sqrt(2.0));
}

double small_ball_estimate(const Matrix& x, double eps, std::int64_t trials, Rng& rng) {
  if (x.rows() != x.cols() || x.empty()) {
    throw std::invalid_argument("small_ball_estimate: x must be square and nonempty");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("small_ball_estimate: eps must be > 0");
  if (trials < 1) throw std::invalid_argument("small_ball_estimate: trials must be >= 1");
  const double nrm = frobenius_norm(x);
  if (nrm == 0.0) throw std::invalid_argument("small_ball_estimate: x is zero");
  const Matrix unit = x * (1.0 / nrm);

  std::int64_t hits = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    double s = 0.0;
    for (double xv : unit.flat()) s += rng.normal() * xv;
    if (std::abs(s) < eps) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

double small_ball_estimate(std::int64_t n, double eps, std::int64_t trials, Rng& rng) {
  if (n < 1) throw std::invalid_argument("small_ball_estimate: n must be >= 1");
  const auto side = static_cast<std::size_t>(n);
  return small_ball_estimate(Matrix(side, side, 1.0), eps, trials, rng);
}

bool subspace_counterexample(std::int64_t n, std::int64_t d, std::int64_t m, Rng& rng) {
  if (n < 1 || d < 0 || d + 1 > n * n || m < 0) {
    throw std::invalid_argument(
        "subspace_counterexample: requires n >= 1, 1 <= d+1 <= n^2, m >= 0");
  }
  const auto side = static_cast<std::size_t>(n);
  const auto dim = static_cast<std::size_t>(d + 1);
  const auto meas = static_cast<std::size_t>(m);

  std::vector<Matrix> basis;
  basis.reserve(dim);
  for (std::size_t j = 0; j < dim; ++j) basis.push_back(gaussian_matrix(side, side, rng));

  // Functionals restricted to the basis of V.
  Matrix restricted(meas, dim);
  for (std::size_t i = 0; i < meas; ++i) {
    const Matrix g = gaussian_matrix(side, side, rng);
    for (std::size_t j = 0; j < dim; ++j) restricted(i, j) = inner(g, basis[j]);
  }
  if (meas == 0) return true;
  return matrix_rank(restricted, kKernelTol) < dim;
}

}  // namespace ulab::theory
