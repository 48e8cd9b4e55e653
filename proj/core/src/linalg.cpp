#include "ulab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ulab {

namespace {

constexpr int kMaxSweeps = 80;

// Columns of a tall matrix stored contiguously.
struct ColumnSet {
  std::size_t len = 0;
  std::size_t count = 0;
  Vector data;

  double* col(std::size_t j) { return data.data() + j * len; }
  const double* col(std::size_t j) const { return data.data() + j * len; }
};

double col_dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

void rotate(double* a, double* b, std::size_t n, double c, double s) {
  for (std::size_t k = 0; k < n; ++k) {
    const double x = a[k];
    const double y = b[k];
    a[k] = c * x - s * y;
    b[k] = s * x + c * y;
  }
}

struct JacobiOutput {
  ColumnSet w;  // A V, columns have norms sigma_j
  ColumnSet v;
};

// Orthogonalize the columns of a tall matrix by plane rotations applied
// from the right.
JacobiOutput jacobi_sweeps(const Matrix& a, bool want_v) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  JacobiOutput out;
  out.w = {m, n, Vector(m * n)};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.w.col(j)[i] = a(i, j);
  if (want_v) {
    out.v = {n, n, Vector(n * n, 0.0)};
    for (std::size_t j = 0; j < n; ++j) out.v.col(j)[j] = 1.0;
  }

  const double tol = std::max(
      1e-14, 4.0 * static_cast<double>(m) * std::numeric_limits<double>::epsilon());
  Vector norms(n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    norms[j] = col_dot(out.w.col(j), out.w.col(j), m);
    total += norms[j];
  }
  // Columns at rounding level of ||A||_F are numerically zero and are not
  // rotated.
  const double negligible = std::pow(
      static_cast<double>(m + n) * std::numeric_limits<double>::epsilon(), 2) * total;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = norms[p];
        const double beta = norms[q];
        if (alpha <= negligible || beta <= negligible) continue;
        const double gamma = col_dot(out.w.col(p), out.w.col(q), m);
        if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(out.w.col(p), out.w.col(q), m, c, s);
        if (want_v) rotate(out.v.col(p), out.v.col(q), n, c, s);
        norms[p] = col_dot(out.w.col(p), out.w.col(p), m);
        norms[q] = col_dot(out.w.col(q), out.w.col(q), m);
      }
    }
    if (!rotated) return out;
  }
  throw ConvergenceError("svd: Jacobi sweep limit exceeded");
}

// Remove the components of v along the first `count` columns, twice.
void orthogonalize_against(double* v, const ColumnSet& basis, std::size_t count) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < count; ++j) {
      const double* b = basis.col(j);
      const double proj = col_dot(b, v, basis.len);
      for (std::size_t k = 0; k < basis.len; ++k) v[k] -= proj * b[k];
    }
  }
}

SvdResult svd_tall(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  JacobiOutput jac = jacobi_sweeps(a, true);

  Vector sig(n);
  for (std::size_t j = 0; j < n; ++j) {
    sig[j] = std::sqrt(col_dot(jac.w.col(j), jac.w.col(j), m));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

  const double sigma_max = n ? sig[order[0]] : 0.0;
  ColumnSet u{m, n, Vector(m * n, 0.0)};
  SvdResult res;
  res.sigma.resize(n);
  res.v = Matrix(n, n);
  for (std::size_t jj = 0; jj < n; ++jj) {
    const std::size_t j = order[jj];
    res.sigma[jj] = sig[j];
    for (std::size_t k = 0; k < n; ++k) res.v(k, jj) = jac.v.col(j)[k];

    double* uj = u.col(jj);
    bool have = false;
    if (sig[j] > 0.0 &&
        sig[j] > sigma_max * std::numeric_limits<double>::min() * 1e4) {
      for (std::size_t k = 0; k < m; ++k) uj[k] = jac.w.col(j)[k] / sig[j];
      // Columns of tiny sigma carry relative orthogonality error
      // ~tol * sigma_max / sigma_j; re-orthogonalize against larger ones.
      orthogonalize_against(uj, u, jj);
      const double nrm = std::sqrt(col_dot(uj, uj, m));
      if (nrm > 0.5) {
        for (std::size_t k = 0; k < m; ++k) uj[k] /= nrm;
        have = true;
      }
    }
    if (!have) {
      // Complete the basis from coordinate directions.
      for (std::size_t e = 0; e < m && !have; ++e) {
        std::fill(uj, uj + m, 0.0);
        uj[e] = 1.0;
        orthogonalize_against(uj, u, jj);
        const double nrm = std::sqrt(col_dot(uj, uj, m));
        if (nrm > 0.5) {
          for (std::size_t k = 0; k < m; ++k) uj[k] /= nrm;
          have = true;
        }
      }
    }
  }

  res.u = Matrix(m, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double* uj = u.col(j);
    std::size_t arg = 0;
    for (std::size_t k = 1; k < m; ++k) {
      if (std::abs(uj[k]) > std::abs(uj[arg])) arg = k;
    }
    const double sign = (m > 0 && uj[arg] < 0.0) ? -1.0 : 1.0;
    for (std::size_t k = 0; k < m; ++k) res.u(k, j) = sign * uj[k];
    if (sign < 0.0) {
      for (std::size_t k = 0; k < n; ++k) res.v(k, j) = -res.v(k, j);
    }
  }
  return res;
}

void require_finite(const Matrix& x, const char* who) {
  if (!x.is_finite()) {
    throw std::invalid_argument(std::string(who) + ": non-finite entry");
  }
}

}  // namespace

Matrix SvdResult::reconstruct() const {
  Matrix us = u;
  for (std::size_t i = 0; i < us.rows(); ++i)
    for (std::size_t j = 0; j < us.cols(); ++j) us(i, j) *= sigma[j];
  return matmul_nt(us, v);
}

SvdResult svd(const Matrix& x) {
  require_finite(x, "svd");
  if (x.rows() >= x.cols()) return svd_tall(x);
  SvdResult t = svd_tall(x.transpose());
  // Sign convention is defined on U, so redo it after the swap.
  SvdResult res{std::move(t.v), std::move(t.sigma), std::move(t.u)};
  for (std::size_t j = 0; j < res.u.cols(); ++j) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < res.u.rows(); ++k) {
      if (std::abs(res.u(k, j)) > std::abs(res.u(arg, j))) arg = k;
    }
    if (res.u(arg, j) < 0.0) {
      for (std::size_t k = 0; k < res.u.rows(); ++k) res.u(k, j) = -res.u(k, j);
      for (std::size_t k = 0; k < res.v.rows(); ++k) res.v(k, j) = -res.v(k, j);
    }
  }
  return res;
}

Vector singular_values(const Matrix& x) {
  require_finite(x, "singular_values");
  const Matrix& tall = x;
  JacobiOutput jac = x.rows() >= x.cols() ? jacobi_sweeps(tall, false)
                                          : jacobi_sweeps(x.transpose(), false);
  Vector sig(jac.w.count);
  for (std::size_t j = 0; j < jac.w.count; ++j) {
    sig[j] = std::sqrt(col_dot(jac.w.col(j), jac.w.col(j), jac.w.len));
  }
  std::sort(sig.begin(), sig.end(), std::greater<>());
  return sig;
}

std::size_t matrix_rank(const Matrix& x, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw std::invalid_argument("matrix_rank: rel_tol must lie in (0, 1)");
  }
  const Vector sig = singular_values(x);
  if (sig.empty() || sig[0] == 0.0) return 0;
  const double cut = rel_tol * sig[0];
  return static_cast<std::size_t>(
      std::count_if(sig.begin(), sig.end(), [&](double s) { return s > cut; }));
}

double frobenius_norm(const Matrix& x) { return norm2(x.flat()); }

double nuclear_norm(const Matrix& x) {
  const Vector sig = singular_values(x);
  return std::accumulate(sig.begin(), sig.end(), 0.0);
}

double spectral_norm(const Matrix& x) {
  const Vector sig = singular_values(x);
  return sig.empty() ? 0.0 : sig[0];
}

// --- Householder QR -------------------------------------------------------

HouseholderQR::HouseholderQR(const Matrix& a)
    : rows_{a.rows()},
      cols_{a.cols()},
      packed_{a},
      head_(a.cols(), 0.0),
      beta_(a.cols(), 0.0),
      rdiag_(a.cols(), 0.0) {
  if (rows_ < cols_) {
    throw std::invalid_argument("HouseholderQR: requires rows >= cols");
  }
  require_finite(a, "HouseholderQR");
  Matrix& w = packed_;
  for (std::size_t k = 0; k < cols_; ++k) {
    double scale = 0.0;
    for (std::size_t i = k; i < rows_; ++i) scale = std::max(scale, std::abs(w(i, k)));
    if (scale == 0.0) {
      rdiag_[k] = 0.0;
      beta_[k] = 0.0;
      head_[k] = 0.0;
      continue;
    }
    double ss = 0.0;
    for (std::size_t i = k; i < rows_; ++i) {
      const double t = w(i, k) / scale;
      ss += t * t;
    }
    const double nrm = scale * std::sqrt(ss);
    const double alpha = w(k, k) > 0.0 ? -nrm : nrm;
    // v = x - alpha e_1, stored as head_ (first entry) and the column tail.
    const double v0 = w(k, k) - alpha;
    double vtv = v0 * v0;
    for (std::size_t i = k + 1; i < rows_; ++i) vtv += w(i, k) * w(i, k);
    head_[k] = v0;
    beta_[k] = vtv > 0.0 ? 2.0 / vtv : 0.0;
    rdiag_[k] = alpha;
    for (std::size_t j = k + 1; j < cols_; ++j) {
      double s = v0 * w(k, j);
      for (std::size_t i = k + 1; i < rows_; ++i) s += w(i, k) * w(i, j);
      s *= beta_[k];
      w(k, j) -= s * v0;
      for (std::size_t i = k + 1; i < rows_; ++i) w(i, j) -= s * w(i, k);
    }
  }
}

Matrix HouseholderQR::r() const {
  Matrix r(cols_, cols_);
  for (std::size_t i = 0; i < cols_; ++i) {
    r(i, i) = rdiag_[i];
    for (std::size_t j = i + 1; j < cols_; ++j) r(i, j) = packed_(i, j);
  }
  return r;
}

Vector HouseholderQR::apply_qt(std::span<const double> b) const {
  if (b.size() != rows_) throw std::invalid_argument("apply_qt: length mismatch");
  Vector x(b.begin(), b.end());
  for (std::size_t k = 0; k < cols_; ++k) {
    if (beta_[k] == 0.0) continue;
    double s = head_[k] * x[k];
    for (std::size_t i = k + 1; i < rows_; ++i) s += packed_(i, k) * x[i];
    s *= beta_[k];
    x[k] -= s * head_[k];
    for (std::size_t i = k + 1; i < rows_; ++i) x[i] -= s * packed_(i, k);
  }
  return x;
}

Vector HouseholderQR::apply_q(std::span<const double> z) const {
  if (z.size() != rows_) throw std::invalid_argument("apply_q: length mismatch");
  Vector x(z.begin(), z.end());
  for (std::size_t kk = cols_; kk-- > 0;) {
    if (beta_[kk] == 0.0) continue;
    double s = head_[kk] * x[kk];
    for (std::size_t i = kk + 1; i < rows_; ++i) s += packed_(i, kk) * x[i];
    s *= beta_[kk];
    x[kk] -= s * head_[kk];
    for (std::size_t i = kk + 1; i < rows_; ++i) x[i] -= s * packed_(i, kk);
  }
  return x;
}

Matrix HouseholderQR::thin_q() const {
  Matrix q(rows_, cols_);
  Vector e(rows_, 0.0);
  for (std::size_t j = 0; j < cols_; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const Vector col = apply_q(e);
    q.set_column(j, col);
  }
  return q;
}

double HouseholderQR::diagonal_ratio() const noexcept {
  if (cols_ == 0) return 1.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double d : rdiag_) {
    lo = std::min(lo, std::abs(d));
    hi = std::max(hi, std::abs(d));
  }
  return hi == 0.0 ? 0.0 : lo / hi;
}

Vector HouseholderQR::solve_r(std::span<const double> c) const {
  Vector x(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(cols_));
  for (std::size_t ii = cols_; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t j = ii + 1; j < cols_; ++j) s -= packed_(ii, j) * x[j];
    x[ii] = s / rdiag_[ii];
  }
  return x;
}

Vector HouseholderQR::solve_rt(std::span<const double> c) const {
  Vector z(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(cols_));
  for (std::size_t i = 0; i < cols_; ++i) {
    double s = z[i];
    for (std::size_t j = 0; j < i; ++j) s -= packed_(j, i) * z[j];
    z[i] = s / rdiag_[i];
  }
  return z;
}

Vector least_squares(const Matrix& a, std::span<const double> b) {
  if (a.rows() != b.size()) {
    throw std::invalid_argument("least_squares: length mismatch");
  }
  if (a.rows() < a.cols()) {
    throw RankDeficientError("least_squares: fewer rows than columns");
  }
  const HouseholderQR qr(a);
  if (qr.diagonal_ratio() <= kLeastSquaresRankTol) {
    throw RankDeficientError("least_squares: rank-deficient design matrix");
  }
  const Vector qtb = qr.apply_qt(b);
  return qr.solve_r(qtb);
}

Vector min_norm_solve(const Matrix& a, std::span<const double> b) {
  if (a.rows() != b.size()) {
    throw std::invalid_argument("min_norm_solve: length mismatch");
  }
  if (a.rows() > a.cols()) {
    throw std::invalid_argument("min_norm_solve: requires rows <= cols");
  }
  const HouseholderQR qr(a.transpose());
  if (qr.diagonal_ratio() <= kLeastSquaresRankTol) {
    throw RankDeficientError("min_norm_solve: rank-deficient system");
  }
  Vector z = qr.solve_rt(b);
  z.resize(a.cols(), 0.0);
  return qr.apply_q(z);
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix g(rows, cols);
  for (double& v : g.flat()) v = rng.normal();
  return g;
}

}  // namespace ulab
