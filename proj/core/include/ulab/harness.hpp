#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ulab/solvers.hpp"

namespace ulab {

enum class Method { rank_min, nuclear_min, unicity_search };

std::string_view to_string(Method m) noexcept;
/// Accepts the names printed by to_string; nullopt otherwise.
std::optional<Method> parse_method(std::string_view name) noexcept;

/// Relative Frobenius error at or below which a recovery counts as success.
inline constexpr double kSuccessTol = 1e-4;

struct TrialSpec {
  std::size_t n = 1;
  std::size_t r = 1;
  std::size_t m = 0;
  Method method = Method::rank_min;
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
  SolverParams solver{};
  /// unicity_search only: rank k of the search, 0 for min(2r, n).
  std::size_t search_rank = 0;

  /// Seed of this trial's stream, keyed by (master_seed, cell, trial_index)
  /// so adding cells to a sweep never perturbs existing cells.
  std::uint64_t seed() const noexcept;
  /// Throws std::invalid_argument unless r >= 1, r <= n, m <= n^2 and
  /// search_rank <= n.
  void validate() const;
};

struct TrialOutcome {
  TrialSpec spec;
  bool success = false;
  /// ||x_hat - M||_F for recovery methods (M has unit norm); the search
  /// objective for unicity_search.
  double rel_error = 0.0;
  double residual = 0.0;
  double wall_time = 0.0;  ///< seconds
  std::size_t rank_hat = 0;
  std::size_t iterations = 0;
  bool converged = false;
  std::string note;  ///< diagnostics for failed or degenerate trials
};

/// Unit-Frobenius ground truth G1 G2ᵀ with n x r Gaussian factors.
Matrix draw_low_rank(std::size_t n, std::size_t r, Rng& rng);

/// One seeded Monte Carlo sample. Solver failures are recorded in the
/// outcome, never thrown.
TrialOutcome run_trial(const TrialSpec& spec);

// --- tables ----------------------------------------------------------------

/// One row of the trials CSV.
struct TrialRecord {
  Method method = Method::rank_min;
  std::size_t n = 0;
  std::size_t r = 0;
  std::size_t m = 0;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  bool success = false;
  double rel_error = 0.0;
  double residual = 0.0;
  double wall_time_s = 0.0;

  static TrialRecord from(const TrialOutcome& o);
  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct CellKey {
  Method method;
  std::size_t n;
  std::size_t r;
  std::size_t m;
  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct CurveKey {
  Method method;
  std::size_t n;
  std::size_t r;
  friend auto operator<=>(const CurveKey&, const CurveKey&) = default;
};

struct CellCounts {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double rate() const noexcept {
    return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
  }
  friend bool operator==(const CellCounts&, const CellCounts&) = default;
};

/// Success counts over an (n, r, m, method) grid. Built from trial records;
/// cells and crossings are derived data.
class PhaseTable {
 public:
  PhaseTable() = default;
  explicit PhaseTable(std::vector<TrialRecord> records);

  const std::vector<TrialRecord>& records() const noexcept { return records_; }
  const std::map<CellKey, CellCounts>& cells() const noexcept { return cells_; }
  /// Every (method, n, r) curve; value set only when the rates bracket 0.5.
  const std::map<CurveKey, std::optional<double>>& crossings() const noexcept {
    return crossings_;
  }
  /// (m, success rate) pairs of one curve, sorted by m.
  std::vector<std::pair<double, double>> curve(const CurveKey& key) const;

  friend bool operator==(const PhaseTable&, const PhaseTable&) = default;

 private:
  std::vector<TrialRecord> records_;  // sorted by (cell, trial)
  std::map<CellKey, CellCounts> cells_;
  std::map<CurveKey, std::optional<double>> crossings_;
};

/// First upward crossing of 0.5 by linear interpolation between the bracketing
/// pair (rate_i < 0.5 <= rate_{i+1}). Input sorted by m.
std::optional<double> estimate_crossing(
    const std::vector<std::pair<double, double>>& rates);

struct SweepConfig {
  std::vector<std::size_t> n_values;
  std::vector<std::size_t> r_values;
  std::vector<std::size_t> m_values;
  std::vector<Method> methods;
  std::size_t trials_per_cell = 1;
  std::uint64_t master_seed = 42;
  SolverParams solver{};
  std::size_t workers = 1;
  /// When false, wall times are stored as 0 so outputs are byte-reproducible.
  bool record_wall_time = false;
};

/// Inclusive range lo, lo+step, ..., <= hi.
std::vector<std::size_t> m_range(std::size_t lo, std::size_t hi, std::size_t step = 1);

/// All trials of the grid; cells with r > n or m > n^2 are skipped. Results
/// are merged by (cell, trial_index), so the table is identical for any
/// worker count.
PhaseTable phase_sweep(const SweepConfig& config);

// --- CSV persistence ---------------------------------------------------------

inline constexpr std::string_view kTrialsHeader =
    "method,n,r,m,trial,seed,success,rel_error,residual,wall_time_s";
inline constexpr std::string_view kSummaryHeader = "method,n,r,m,trials,successes,rate";
inline constexpr std::string_view kCrossingsHeader =
    "method,n,r,m_star,weak_threshold,strong_threshold,nuclear_empirical_ref";

void write_csv(const PhaseTable& table, std::ostream& out);
void write_csv(const PhaseTable& table, const std::string& path);
/// Throws ParseError naming the offending line.
PhaseTable read_csv(std::istream& in);
PhaseTable read_csv(const std::string& path);

void write_summary_csv(const PhaseTable& table, std::ostream& out);
/// Threshold columns come from the theory module; strong_threshold is left
/// empty where r > n/2, m_star where no crossing exists.
void write_crossings_csv(const PhaseTable& table, std::ostream& out);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace ulab
