#include "ulab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ulab {

void SolverParams::validate() const {
  if (!(constraint_tol > 0.0) || !(inner_tol > 0.0) || !(step > 0.0)) {
    throw std::invalid_argument("SolverParams: tolerances and step must be positive");
  }
  if (restarts < 1) throw std::invalid_argument("SolverParams: restarts must be >= 1");
  if (max_iters < 1) throw std::invalid_argument("SolverParams: max_iters must be >= 1");
}

double constraint_residual(const MeasurementOperator& op, const Matrix& x,
                           std::span<const double> y) {
  Vector ax = op.apply(x);
  for (std::size_t i = 0; i < ax.size(); ++i) ax[i] -= y[i];
  return norm2(ax) / std::max(norm2(y), 1.0);
}

Matrix svt(const Matrix& x, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("svt: tau must be >= 0");
  if (tau == 0.0) return x;
  SvdResult s = svd(x);
  for (double& v : s.sigma) v = std::max(v - tau, 0.0);
  return s.reconstruct();
}

// --- nuclear-norm minimization --------------------------------------------

RecoveryResult nuclear_min(const MeasurementOperator& op, std::span<const double> y,
                           const SolverParams& p) {
  p.validate();
  if (y.size() != op.m()) throw std::invalid_argument("nuclear_min: length mismatch");
  const std::size_t n = op.n();
  RecoveryResult out;
  if (op.m() == 0) {
    out.x_hat = Matrix(n, n);
    out.converged = true;
    out.optimality_gap = 0.0;
    return out;
  }

  const double rho = p.step;
  const double tau = 1.0 / rho;
  Matrix z(n, n);
  Matrix u(n, n);  // scaled dual
  Matrix x(n, n);

  for (std::size_t it = 1; it <= p.max_iters; ++it) {
    x = op.project_affine(z - u, y);
    const Matrix z_prev = z;
    z = svt(x + u, tau);
    u += x;
    u -= z;
    out.iterations = it;

    const double primal = frobenius_norm(x - z);
    const double dual = rho * frobenius_norm(z - z_prev);
    const double scale = std::max(1.0, frobenius_norm(z));
    if (primal > kSplittingTol * scale || dual > kSplittingTol * scale) continue;
    if (constraint_residual(op, z, y) > p.constraint_tol) continue;

    // rho * u is a subgradient of ||.||_* at z by construction of the prox
    // step; it should also lie in the range of the adjoint.
    const Matrix g = u * rho;
    const Matrix fitted = op.adjoint(op.fit_adjoint(g));
    const double gap = spectral_norm(fitted - g) / std::max(spectral_norm(g), 1.0);
    out.optimality_gap = gap;
    if (gap <= kNuclearOptimalityTol) {
      out.converged = true;
      break;
    }
  }

  out.x_hat = z;
  out.residual = constraint_residual(op, z, y);
  out.rank_hat = matrix_rank(z);
  if (!out.converged && std::isnan(out.optimality_gap)) {
    const Matrix g = u * rho;
    const Matrix fitted = op.adjoint(op.fit_adjoint(g));
    out.optimality_gap = spectral_norm(fitted - g) / std::max(spectral_norm(g), 1.0);
  }
  return out;
}

// --- factored searches -----------------------------------------------------

namespace {

// Row i is vec(A_i V), so that design * vec(U) = A(U Vᵀ).
Matrix design_for_left(const MeasurementOperator& op, const Matrix& v) {
  const std::size_t n = op.n();
  const std::size_t k = v.cols();
  const Matrix& phi = op.flattened();
  Matrix d(op.m(), n * k);
  for (std::size_t i = 0; i < op.m(); ++i) {
    const double* a = &phi.flat()[i * n * n];
    double* row = &d.flat()[i * n * k];
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t b = 0; b < n; ++b) {
        const double arb = a[r * n + b];
        for (std::size_t c = 0; c < k; ++c) row[r * k + c] += arb * v(b, c);
      }
  }
  return d;
}

// Row i is vec(A_iᵀ U), so that design * vec(V) = A(U Vᵀ).
Matrix design_for_right(const MeasurementOperator& op, const Matrix& u) {
  const std::size_t n = op.n();
  const std::size_t k = u.cols();
  const Matrix& phi = op.flattened();
  Matrix d(op.m(), n * k);
  for (std::size_t i = 0; i < op.m(); ++i) {
    const double* a = &phi.flat()[i * n * n];
    double* row = &d.flat()[i * n * k];
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t b = 0; b < n; ++b) {
        const double arb = a[r * n + b];
        for (std::size_t c = 0; c < k; ++c) row[b * k + c] += arb * u(r, c);
      }
  }
  return d;
}

Vector solve_block(const Matrix& design, std::span<const double> y) {
  return design.rows() >= design.cols() ? least_squares(design, y)
                                        : min_norm_solve(design, y);
}

// Equalize column norms of the two factors; leaves U Vᵀ unchanged.
void balance(Matrix& u, Matrix& v) {
  for (std::size_t c = 0; c < u.cols(); ++c) {
    double nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.rows(); ++i) nu += u(i, c) * u(i, c);
    for (std::size_t i = 0; i < v.rows(); ++i) nv += v(i, c) * v(i, c);
    if (nu == 0.0 || nv == 0.0) continue;
    const double s = std::sqrt(std::sqrt(nv / nu));
    for (std::size_t i = 0; i < u.rows(); ++i) u(i, c) *= s;
    for (std::size_t i = 0; i < v.rows(); ++i) v(i, c) /= s;
  }
}

Matrix orthonormal_columns(const Matrix& f) { return HouseholderQR(f).thin_q(); }

constexpr std::size_t kAlsWarmup = 5;

struct AlsRun {
  Matrix x;
  double residual = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
};

// Damped Gauss-Newton on the joint factors (U, V): each step solves
// min ||J d + f||^2 + mu ||d||^2 with J = [A(. Vᵀ), A(U .ᵀ)].
struct LmState {
  Matrix u;
  Matrix v;
  double residual;
};

void refine_lm(const MeasurementOperator& op, std::span<const double> y, LmState& st,
               double target, std::size_t max_steps, double stall_tol,
               std::size_t& iterations) {
  const std::size_t n = st.u.rows();
  const std::size_t r = st.u.cols();
  const std::size_t nr = n * r;
  const std::size_t m = op.m();
  const double ynorm = std::max(norm2(y), 1.0);
  double mu = 1e-3;
  auto residual_vec = [&](const Matrix& u, const Matrix& v) {
    Vector f = op.apply(matmul_nt(u, v));
    for (std::size_t i = 0; i < m; ++i) f[i] -= y[i];
    return f;
  };
  Vector f = residual_vec(st.u, st.v);
  double cost = norm2(f);
  for (std::size_t step = 0; step < max_steps && cost / ynorm > target; ++step) {
    ++iterations;
    const Matrix jl = design_for_left(op, st.v);
    const Matrix jr = design_for_right(op, st.u);
    bool improved = false;
    for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
      Matrix aug(m + 2 * nr, 2 * nr);
      Vector rhs(m + 2 * nr, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t c = 0; c < nr; ++c) {
          aug(i, c) = jl(i, c);
          aug(i, nr + c) = jr(i, c);
        }
        rhs[i] = -f[i];
      }
      const double damp = std::sqrt(mu);
      for (std::size_t c = 0; c < 2 * nr; ++c) aug(m + c, c) = damp;
      const Vector d = least_squares(aug, rhs);
      Matrix un = st.u;
      Matrix vn = st.v;
      for (std::size_t c = 0; c < nr; ++c) {
        un.flat()[c] += d[c];
        vn.flat()[c] += d[nr + c];
      }
      Vector fn = residual_vec(un, vn);
      const double cn = norm2(fn);
      if (cn < cost) {
        const double gain = (cost - cn) / cost;
        st.u = std::move(un);
        st.v = std::move(vn);
        balance(st.u, st.v);
        f = std::move(fn);
        cost = cn;
        mu = std::max(mu / 3.0, 1e-14);
        improved = true;
        if (gain <= stall_tol) {
          st.residual = cost / ynorm;
          return;
        }
      } else {
        mu *= 4.0;
      }
    }
    if (!improved) break;
  }
  st.residual = cost / ynorm;
}

AlsRun run_als(const MeasurementOperator& op, std::span<const double> y,
               std::size_t r, Rng& rng, const SolverParams& p, bool spectral) {
  const std::size_t n = op.n();
  const double init_scale = 1.0 / std::sqrt(static_cast<double>(n));
  Matrix u = gaussian_matrix(n, r, rng) * init_scale;
  Matrix v = gaussian_matrix(n, r, rng) * init_scale;
  if (spectral) {
    // Top-r part of A*(y), an unbiased estimate of the truth for Gaussian A.
    const SvdResult s = svd(op.adjoint(y));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < r; ++c) {
        u(i, c) = s.u(i, c) * std::sqrt(s.sigma[c]);
        v(i, c) = s.v(i, c) * std::sqrt(s.sigma[c]);
      }
  }

  // Iterate past feasibility to polish x_best, but stop once progress slows.
  const double polish_tol = 1e-3 * p.constraint_tol;
  AlsRun run;
  double prev = std::numeric_limits<double>::infinity();
  std::size_t it = 1;
  for (; it <= p.max_iters; ++it) {
    u = Matrix::from_flat(n, r, solve_block(design_for_left(op, v), y));
    v = Matrix::from_flat(n, r, solve_block(design_for_right(op, u), y));
    balance(u, v);
    run.x = matmul_nt(u, v);
    run.residual = constraint_residual(op, run.x, y);
    run.iterations = it;
    if (run.residual <= polish_tol) return run;
    if (run.residual <= p.constraint_tol && run.residual > 0.5 * prev) return run;
    if (std::isfinite(prev) && prev - run.residual <= p.inner_tol * prev) break;
    // ALS is linear at best; hand slow progress to the Gauss-Newton phase.
    if (it >= kAlsWarmup && run.residual > 0.5 * prev) break;
    prev = run.residual;
  }
  LmState st{u, v, run.residual};
  refine_lm(op, y, st, polish_tol, p.max_iters, p.inner_tol, run.iterations);
  if (st.residual < run.residual) {
    run.x = matmul_nt(st.u, st.v);
    run.residual = constraint_residual(op, run.x, y);
  }
  return run;
}

bool restarts_disagree(std::vector<double> values) {
  if (values.size() < 2) return false;
  std::partial_sort(values.begin(), values.begin() + 2, values.end());
  return values[1] > 1e2 * values[0];
}

}  // namespace

FeasibilityResult rank_feasibility(const MeasurementOperator& op,
                                   std::span<const double> y, std::size_t r,
                                   const SolverParams& p) {
  p.validate();
  if (y.size() != op.m()) throw std::invalid_argument("rank_feasibility: length mismatch");
  const std::size_t n = op.n();
  if (r > n) throw std::invalid_argument("rank_feasibility: r must not exceed n");

  FeasibilityResult out;
  out.x_best = Matrix(n, n);
  out.residual = constraint_residual(op, out.x_best, y);
  if (r == 0) {
    out.feasible = out.residual <= p.constraint_tol;
    return out;
  }
  if (r == n) {
    // Every matrix has rank <= n; the feasible set is the affine space.
    out.x_best = op.project_affine(Matrix(n, n), y);
    out.residual = constraint_residual(op, out.x_best, y);
    out.feasible = out.residual <= p.constraint_tol;
    out.restarts_used = 0;
    return out;
  }

  const std::uint64_t rank_seed = derive_seed(p.seed, r);
  std::size_t budget = p.restarts;
  bool extended = false;
  for (std::size_t s = 0; s < budget; ++s) {
    Rng rng(derive_seed(rank_seed, s));
    ++out.restarts_used;
    AlsRun run;
    try {
      run = run_als(op, y, r, rng, p, s == 0);
    } catch (const RankDeficientError&) {
      // Degenerate subproblem consumes the restart.
      continue;
    }
    out.iterations += run.iterations;
    if (run.residual < out.residual) {
      out.residual = run.residual;
      out.x_best = std::move(run.x);
    }
    if (out.residual <= p.constraint_tol) break;
    // No feasible restart yet: extend the budget once.
    if (s + 1 == budget && !extended) {
      budget += p.restarts;
      extended = true;
    }
  }
  out.feasible = out.residual <= p.constraint_tol;
  return out;
}

RecoveryResult rank_minimize(const MeasurementOperator& op, std::span<const double> y,
                             std::size_t r_max, const SolverParams& p) {
  p.validate();
  if (r_max > op.n()) throw std::invalid_argument("rank_minimize: r_max must not exceed n");
  RecoveryResult out;
  FeasibilityResult last;
  for (std::size_t r = 0; r <= r_max; ++r) {
    last = rank_feasibility(op, y, r, p);
    out.iterations += last.iterations;
    if (last.feasible) {
      out.converged = true;
      break;
    }
  }
  out.x_hat = std::move(last.x_best);
  out.residual = last.residual;
  out.rank_hat = matrix_rank(out.x_hat);
  return out;
}

// --- null-space intersection search ---------------------------------------

std::string_view to_string(SearchVerdict v) noexcept {
  switch (v) {
    case SearchVerdict::found: return "FOUND";
    case SearchVerdict::not_found: return "NOT FOUND";
    case SearchVerdict::inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

SearchVerdict classify_objective(double objective) noexcept {
  if (objective <= kIntersectionFound) return SearchVerdict::found;
  if (objective >= kIntersectionAbsent) return SearchVerdict::not_found;
  return SearchVerdict::inconclusive;
}

namespace {

struct SmallestDirection {
  double value;  // squared smallest singular value
  Vector direction;
};

SmallestDirection smallest_right_singular(const Matrix& b) {
  Matrix padded = b;
  if (b.rows() < b.cols()) {
    padded = Matrix(b.cols(), b.cols());
    std::copy(b.flat().begin(), b.flat().end(), padded.flat().begin());
  }
  const SvdResult s = svd(padded);
  const std::size_t last = s.sigma.size() - 1;
  return {s.sigma[last] * s.sigma[last], s.v.column(last)};
}

double objective_of(const MeasurementOperator& op, const Matrix& x) {
  const Vector ax = op.apply(x);
  return dot(ax, ax);
}

struct SearchRun {
  double objective = std::numeric_limits<double>::infinity();
  Matrix witness;
};

SearchRun run_search(const MeasurementOperator& op, std::size_t k, Rng& rng,
                     const SolverParams& p) {
  const std::size_t n = op.n();
  Matrix v = orthonormal_columns(gaussian_matrix(n, k, rng));
  SearchRun run;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= p.max_iters; ++it) {
    const SmallestDirection left = smallest_right_singular(design_for_left(op, v));
    const Matrix u = orthonormal_columns(Matrix::from_flat(n, k, left.direction));
    const SmallestDirection right = smallest_right_singular(design_for_right(op, u));
    const Matrix vn = Matrix::from_flat(n, k, right.direction);
    Matrix x = matmul_nt(u, vn);
    x *= 1.0 / frobenius_norm(x);
    const double obj = objective_of(op, x);
    if (obj < run.objective) {
      run.objective = obj;
      run.witness = std::move(x);
    }
    if (run.objective <= 1e-2 * kIntersectionFound) break;
    if (std::isfinite(prev) && prev - run.objective <= p.inner_tol * prev) break;
    prev = run.objective;
    v = orthonormal_columns(vn);
  }
  return run;
}

NullspaceSearchResult exact_full_rank_search(const MeasurementOperator& op) {
  const std::size_t n = op.n();
  NullspaceSearchResult out;
  out.exact = true;
  if (op.m() < n * n && op.full_row_rank()) {
    out.witness = op.null_space_basis().front();
  } else {
    const SmallestDirection d = smallest_right_singular(op.flattened());
    out.witness = Matrix::from_flat(n, n, d.direction);
  }
  out.witness *= 1.0 / frobenius_norm(out.witness);
  out.objective = objective_of(op, out.witness);
  out.verdict = classify_objective(out.objective);
  return out;
}

}  // namespace

NullspaceSearchResult nullspace_rank_search(const MeasurementOperator& op,
                                            std::size_t k, const SolverParams& p) {
  p.validate();
  const std::size_t n = op.n();
  if (k < 1 || k > n) throw std::invalid_argument("nullspace_rank_search: need 1 <= k <= n");

  if (op.m() == 0) {
    NullspaceSearchResult out;
    out.witness = Matrix(n, n);
    for (std::size_t i = 0; i < k; ++i) out.witness(i, i) = 1.0 / std::sqrt(double(k));
    out.objective = 0.0;
    out.verdict = SearchVerdict::found;
    out.exact = true;
    return out;
  }
  if (k == n) return exact_full_rank_search(op);

  NullspaceSearchResult out;
  out.objective = std::numeric_limits<double>::infinity();
  const std::uint64_t base = derive_seed(p.seed, 0x5EA4C4ULL + k);
  std::vector<double> seen;
  std::size_t budget = p.restarts;
  bool extended = false;
  for (std::size_t s = 0; s < budget; ++s) {
    Rng rng(derive_seed(base, s));
    ++out.restarts_used;
    SearchRun run = run_search(op, k, rng, p);
    seen.push_back(run.objective);
    if (run.objective < out.objective) {
      out.objective = run.objective;
      out.witness = std::move(run.witness);
    }
    if (out.objective <= kIntersectionFound) break;
    if (s + 1 == budget && !extended && restarts_disagree(seen)) {
      budget += p.restarts;
      extended = true;
    }
  }
  out.verdict = classify_objective(out.objective);
  return out;
}

}  // namespace ulab
