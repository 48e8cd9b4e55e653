#include "ulab/measurement.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace ulab {

MeasurementOperator::MeasurementOperator(std::size_t n, std::vector<Matrix> sensing,
                                         std::optional<std::uint64_t> seed)
    : n_{n}, flat_(sensing.size(), n * n), seed_{seed} {
  if (n == 0) throw std::invalid_argument("MeasurementOperator: n must be >= 1");
  const std::size_t dim = n * n;
  if (sensing.size() > dim) {
    throw std::invalid_argument("MeasurementOperator: m exceeds n^2");
  }
  for (std::size_t i = 0; i < sensing.size(); ++i) {
    const Matrix& a = sensing[i];
    if (a.rows() != n || a.cols() != n) {
      throw std::invalid_argument("MeasurementOperator: sensing matrix is not n x n");
    }
    if (!a.is_finite()) {
      throw std::invalid_argument("MeasurementOperator: non-finite sensing entry");
    }
    std::copy(a.flat().begin(), a.flat().end(), flat_.flat().begin() + i * dim);
  }
  if (m() == 0) return;

  qr_ = std::make_shared<const HouseholderQR>(flat_.transpose());
  q_rows_ = qr_->thin_q().transpose();
  // Φᵀ = QR, so Φ and R share singular values.
  const Vector sig = singular_values(qr_->r());
  conditioning_ = sig.front() > 0.0 ? sig.back() / sig.front() : 0.0;
}

Matrix MeasurementOperator::sensing(std::size_t i) const {
  if (i >= m()) throw std::out_of_range("MeasurementOperator::sensing");
  return Matrix::from_flat(n_, n_, flat_.flat().subspan(i * n_ * n_, n_ * n_));
}

Vector MeasurementOperator::flat_arg(const Matrix& x, const char* who) const {
  if (x.rows() != n_ || x.cols() != n_) {
    throw std::invalid_argument(std::string(who) + ": matrix is not n x n");
  }
  return Vector(x.flat().begin(), x.flat().end());
}

Vector MeasurementOperator::apply(const Matrix& x) const {
  const Vector v = flat_arg(x, "apply");
  return matvec(flat_, v);
}

Matrix MeasurementOperator::adjoint(std::span<const double> y) const {
  if (y.size() != m()) throw std::invalid_argument("adjoint: length mismatch");
  return Matrix::from_flat(n_, n_, matvec_t(flat_, y));
}

void MeasurementOperator::require_full_rank(const char* who) const {
  if (!full_row_rank()) {
    throw RankDeficientError(std::string(who) +
                             ": measurement operator is not of full row rank");
  }
}

Matrix MeasurementOperator::project_affine(const Matrix& x,
                                           std::span<const double> y) const {
  if (y.size() != m()) throw std::invalid_argument("project_affine: length mismatch");
  Vector v = flat_arg(x, "project_affine");
  if (m() == 0) return x;
  require_full_rank("project_affine");
  // x - Φᵀ(ΦΦᵀ)⁻¹(Φx - y) with ΦΦᵀ = RᵀR and Φᵀ = QR.
  Vector resid = matvec(flat_, v);
  for (std::size_t i = 0; i < resid.size(); ++i) resid[i] -= y[i];
  const Vector z = qr_->solve_rt(resid);
  const Vector corr = matvec_t(q_rows_, z);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] -= corr[k];
  return Matrix::from_flat(n_, n_, v);
}

Matrix MeasurementOperator::project_range(const Matrix& g) const {
  const Vector v = flat_arg(g, "project_range");
  if (m() == 0) return Matrix(n_, n_);
  const Vector coeff = matvec(q_rows_, v);
  return Matrix::from_flat(n_, n_, matvec_t(q_rows_, coeff));
}

Vector MeasurementOperator::fit_adjoint(const Matrix& g) const {
  const Vector v = flat_arg(g, "fit_adjoint");
  if (m() == 0) return {};
  require_full_rank("fit_adjoint");
  // Φᵀλ ≈ g  ⇔  Rλ = Qᵀg.
  return qr_->solve_r(matvec(q_rows_, v));
}

std::vector<Matrix> MeasurementOperator::null_space_basis() const {
  const std::size_t dim = n_ * n_;
  std::vector<Matrix> basis;
  if (m() == 0) {
    for (std::size_t k = 0; k < dim; ++k) {
      Matrix e(n_, n_);
      e.flat()[k] = 1.0;
      basis.push_back(std::move(e));
    }
    return basis;
  }
  require_full_rank("null_space_basis");
  Vector e(dim, 0.0);
  for (std::size_t k = m(); k < dim; ++k) {
    std::fill(e.begin(), e.end(), 0.0);
    e[k] = 1.0;
    basis.push_back(Matrix::from_flat(n_, n_, qr_->apply_q(e)));
  }
  return basis;
}

namespace {

std::vector<Matrix> draw_gaussian_sensing(std::size_t n, std::size_t m, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_gaussian_operator: n must be >= 1");
  if (m > n * n) {
    throw std::invalid_argument("sample_gaussian_operator: m must not exceed n^2");
  }
  std::vector<Matrix> sensing;
  sensing.reserve(m);
  for (std::size_t i = 0; i < m; ++i) sensing.push_back(gaussian_matrix(n, n, rng));
  return sensing;
}

}  // namespace

MeasurementOperator sample_gaussian_operator(std::size_t n, std::size_t m, Rng& rng) {
  return MeasurementOperator(n, draw_gaussian_sensing(n, m, rng));
}

MeasurementOperator sample_gaussian_operator(std::size_t n, std::size_t m,
                                             std::uint64_t seed) {
  Rng rng(seed);
  return MeasurementOperator(n, draw_gaussian_sensing(n, m, rng), seed);
}

// --- binary format ---------------------------------------------------------

namespace {

constexpr std::uint64_t kFlagSeed = 1;
constexpr std::uint64_t kFlagBody = 2;

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (std::size_t i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), 8);
  if (!in) throw std::runtime_error("read_operator: truncated file");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_operator(std::ostream& out, const MeasurementOperator& op, bool force_body) {
  const bool body = force_body || !op.seed().has_value();
  out.write(kOperatorMagic, sizeof(kOperatorMagic));
  put_u64(out, op.n());
  put_u64(out, op.m());
  put_u64(out, op.seed().value_or(0));
  put_u64(out, (op.seed() ? kFlagSeed : 0) | (body ? kFlagBody : 0));
  if (body) {
    for (double v : op.flattened().flat()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw std::runtime_error("write_operator: stream failure");
}

MeasurementOperator read_operator(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), 8);
  if (!in || !std::equal(magic.begin(), magic.end(), kOperatorMagic)) {
    throw std::runtime_error("read_operator: bad magic (expected ULAB0001)");
  }
  const std::uint64_t n = get_u64(in);
  const std::uint64_t m = get_u64(in);
  const std::uint64_t seed = get_u64(in);
  const std::uint64_t flags = get_u64(in);
  if (n == 0 || n > (1u << 16) || m > n * n) {
    throw std::runtime_error("read_operator: invalid dimensions");
  }
  if (!(flags & kFlagBody)) {
    if (!(flags & kFlagSeed)) {
      throw std::runtime_error("read_operator: neither seed nor body present");
    }
    return sample_gaussian_operator(n, m, seed);
  }
  std::vector<Matrix> sensing;
  sensing.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    Matrix a(n, n);
    for (double& v : a.flat()) v = std::bit_cast<double>(get_u64(in));
    sensing.push_back(std::move(a));
  }
  std::optional<std::uint64_t> s;
  if (flags & kFlagSeed) s = seed;
  return MeasurementOperator(n, std::move(sensing), s);
}

void save_operator(const std::string& path, const MeasurementOperator& op,
                   bool force_body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_operator: cannot open " + path);
  write_operator(out, op, force_body);
}

MeasurementOperator load_operator(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_operator: cannot open " + path);
  return read_operator(in);
}

}  // namespace ulab
