#include "ulab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

namespace ulab {

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::rank_min: return "rank_min";
    case Method::nuclear_min: return "nuclear_min";
    case Method::unicity_search: return "unicity_search";
  }
  return "rank_min";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
  for (Method m : {Method::rank_min, Method::nuclear_min, Method::unicity_search}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::uint64_t TrialSpec::seed() const noexcept {
  std::uint64_t cell = mix64(static_cast<std::uint64_t>(method) + 1);
  cell = mix64(cell ^ static_cast<std::uint64_t>(n));
  cell = mix64(cell ^ (static_cast<std::uint64_t>(r) << 20));
  cell = mix64(cell ^ (static_cast<std::uint64_t>(m) << 40));
  return derive_seed(derive_seed(master_seed, cell), trial_index);
}

void TrialSpec::validate() const {
  if (n < 1) throw std::invalid_argument("TrialSpec: n must be >= 1");
  if (r < 1 || r > n) throw std::invalid_argument("TrialSpec: r must satisfy 1 <= r <= n");
  if (m > n * n) throw std::invalid_argument("TrialSpec: m must not exceed n^2");
  if (search_rank > n) throw std::invalid_argument("TrialSpec: search_rank must not exceed n");
  solver.validate();
}

Matrix draw_low_rank(std::size_t n, std::size_t r, Rng& rng) {
  const Matrix left = gaussian_matrix(n, r, rng);
  const Matrix right = gaussian_matrix(n, r, rng);
  Matrix x = matmul_nt(left, right);
  x *= 1.0 / frobenius_norm(x);
  return x;
}

namespace {

void run_recovery(const TrialSpec& spec, TrialOutcome& out) {
  const Rng stream(spec.seed());
  Rng truth_rng = stream.child(0);
  Rng op_rng = stream.child(1);
  SolverParams params = spec.solver;
  params.seed = derive_seed(spec.seed(), 2);

  const Matrix truth = draw_low_rank(spec.n, spec.r, truth_rng);
  const MeasurementOperator op = sample_gaussian_operator(spec.n, spec.m, op_rng);
  if (!op.full_row_rank()) {
    out.note = "degenerate operator";
    out.rel_error = std::numeric_limits<double>::infinity();
    out.residual = std::numeric_limits<double>::infinity();
    return;
  }
  const Vector y = op.apply(truth);

  const RecoveryResult res = spec.method == Method::rank_min
                                 ? rank_minimize(op, y, spec.r, params)
                                 : nuclear_min(op, y, params);
  out.rel_error = frobenius_norm(res.x_hat - truth);
  out.residual = res.residual;
  out.rank_hat = res.rank_hat;
  out.iterations = res.iterations;
  out.converged = res.converged;
  out.success = out.rel_error <= kSuccessTol;
  if (!res.converged) out.note = "solver did not converge";
}

void run_unicity(const TrialSpec& spec, TrialOutcome& out) {
  const Rng stream(spec.seed());
  Rng op_rng = stream.child(1);
  SolverParams params = spec.solver;
  params.seed = derive_seed(spec.seed(), 2);

  const MeasurementOperator op = sample_gaussian_operator(spec.n, spec.m, op_rng);
  const std::size_t k = spec.search_rank ? spec.search_rank : std::min(2 * spec.r, spec.n);
  const NullspaceSearchResult res = nullspace_rank_search(op, k, params);
  out.rel_error = res.objective;
  out.residual = res.objective;
  out.rank_hat = k;
  out.iterations = res.restarts_used;
  out.converged = res.verdict != SearchVerdict::inconclusive;
  out.success = res.verdict == SearchVerdict::not_found;
  out.note = std::string(to_string(res.verdict));
}

}  // namespace

TrialOutcome run_trial(const TrialSpec& spec) {
  spec.validate();
  TrialOutcome out;
  out.spec = spec;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (spec.method == Method::unicity_search) {
      run_unicity(spec, out);
    } else {
      run_recovery(spec, out);
    }
  } catch (const std::exception& e) {
    out.success = false;
    out.converged = false;
    out.rel_error = std::numeric_limits<double>::infinity();
    out.residual = std::numeric_limits<double>::infinity();
    out.note = e.what();
  }
  out.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

TrialRecord TrialRecord::from(const TrialOutcome& o) {
  TrialRecord rec;
  rec.method = o.spec.method;
  rec.n = o.spec.n;
  rec.r = o.spec.r;
  rec.m = o.spec.m;
  rec.trial = o.spec.trial_index;
  rec.seed = o.spec.seed();
  rec.success = o.success;
  rec.rel_error = o.rel_error;
  rec.residual = o.residual;
  rec.wall_time_s = o.wall_time;
  return rec;
}

// --- PhaseTable ------------------------------------------------------------

PhaseTable::PhaseTable(std::vector<TrialRecord> records) : records_{std::move(records)} {
  std::sort(records_.begin(), records_.end(), [](const TrialRecord& a, const TrialRecord& b) {
    const CellKey ka{a.method, a.n, a.r, a.m};
    const CellKey kb{b.method, b.n, b.r, b.m};
    if (ka != kb) return ka < kb;
    return a.trial < b.trial;
  });
  for (const TrialRecord& rec : records_) {
    CellCounts& c = cells_[CellKey{rec.method, rec.n, rec.r, rec.m}];
    ++c.trials;
    if (rec.success) ++c.successes;
  }
  for (const auto& [key, counts] : cells_) {
    crossings_.try_emplace(CurveKey{key.method, key.n, key.r});
  }
  for (auto& [key, crossing] : crossings_) crossing = estimate_crossing(curve(key));
}

std::vector<std::pair<double, double>> PhaseTable::curve(const CurveKey& key) const {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [cell, counts] : cells_) {
    if (cell.method == key.method && cell.n == key.n && cell.r == key.r) {
      pts.emplace_back(static_cast<double>(cell.m), counts.rate());
    }
  }
  return pts;  // map order is already ascending in m
}

std::optional<double> estimate_crossing(
    const std::vector<std::pair<double, double>>& rates) {
  for (std::size_t i = 0; i + 1 < rates.size(); ++i) {
    const auto [m0, p0] = rates[i];
    const auto [m1, p1] = rates[i + 1];
    if (p0 < 0.5 && p1 >= 0.5) {
      return m0 + (0.5 - p0) / (p1 - p0) * (m1 - m0);
    }
  }
  return std::nullopt;
}

std::vector<std::size_t> m_range(std::size_t lo, std::size_t hi, std::size_t step) {
  if (step == 0) throw std::invalid_argument("m_range: step must be >= 1");
  std::vector<std::size_t> out;
  for (std::size_t m = lo; m <= hi; m += step) out.push_back(m);
  return out;
}

PhaseTable phase_sweep(const SweepConfig& config) {
  if (config.n_values.empty() || config.r_values.empty() || config.m_values.empty() ||
      config.methods.empty()) {
    throw std::invalid_argument("phase_sweep: grid lists must be nonempty");
  }
  if (config.trials_per_cell < 1) {
    throw std::invalid_argument("phase_sweep: trials_per_cell must be >= 1");
  }
  config.solver.validate();

  std::vector<TrialSpec> jobs;
  for (Method method : config.methods)
    for (std::size_t n : config.n_values)
      for (std::size_t r : config.r_values)
        for (std::size_t m : config.m_values) {
          if (n < 1 || r < 1 || r > n || m > n * n) continue;
          for (std::size_t t = 0; t < config.trials_per_cell; ++t) {
            jobs.push_back(TrialSpec{n, r, m, method, config.master_seed, t, config.solver});
          }
        }

  std::vector<TrialRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      TrialRecord rec = TrialRecord::from(run_trial(jobs[i]));
      if (!config.record_wall_time) rec.wall_time_s = 0.0;
      records[i] = rec;
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, jobs.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return PhaseTable(std::move(records));
}

}  // namespace ulab
