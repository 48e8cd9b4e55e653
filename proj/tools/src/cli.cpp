#include "ulab_cli/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ulab/harness.hpp"
#include "ulab/theory.hpp"

namespace ulab::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 42;
  std::optional<std::size_t> threads;
  std::string out_dir = "results";
};

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

std::size_t resolve_threads(const Globals& g) {
  if (const char* env = std::getenv("ULAB_THREADS"); env && *env) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (*end != '\0' || v < 1) throw UsageError("ULAB_THREADS must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  if (g.threads) return *g.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

void check_dims(std::size_t n, std::size_t r) {
  if (r > n) throw UsageError("--r must not exceed --n");
}

void check_m(std::size_t n, std::size_t m) {
  if (m > n * n) throw UsageError("--m must not exceed n^2");
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

// --- thresholds ---------------------------------------------------------------

struct ThresholdsArgs {
  std::size_t n = 0;
  std::size_t r = 0;
};

int cmd_thresholds(const ThresholdsArgs& a, std::ostream& out, std::ostream& err) {
  check_dims(a.n, a.r);
  const theory::ProblemDims d{static_cast<std::int64_t>(a.n), static_cast<std::int64_t>(a.r)};
  out << "n=" << a.n << " r=" << a.r << '\n';
  if (d.strong_applicable()) {
    out << "strong=" << theory::strong_threshold(d) << '\n';
  } else {
    err << "warning: r > n/2, the uniform (strong) recovery bound does not apply\n";
    out << "strong=n/a\n";
  }
  out << "weak=" << theory::weak_threshold(d) << '\n';
  out << "nuclear_ref=" << theory::nuclear_empirical_reference(d) << '\n';
  out << "manifold_dim_r=" << theory::manifold_dim(d.n, d.r) << '\n';
  if (d.strong_applicable()) {
    out << "manifold_dim_2r=" << theory::manifold_dim(d.n, 2 * d.r) << '\n';
    out << "unit_manifold_dim_2r=" << theory::unit_manifold_dim(d.n, 2 * d.r) << '\n';
  }
  out << "ambient_dim=" << a.n * a.n << '\n';
  return kExitOk;
}

// --- recover ------------------------------------------------------------------

struct RecoverArgs {
  std::size_t n = 0;
  std::size_t r = 0;
  std::size_t m = 0;
  std::string method = "rank_min";
  std::uint64_t trial = 0;
  std::size_t restarts = SolverParams{}.restarts;
  std::size_t max_iters = SolverParams{}.max_iters;
  bool wall_time = false;
};

int cmd_recover(const RecoverArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  check_dims(a.n, a.r);
  check_m(a.n, a.m);
  TrialSpec spec{a.n, a.r, a.m, *parse_method(a.method), g.seed, a.trial, {}};
  spec.solver.restarts = a.restarts;
  spec.solver.max_iters = a.max_iters;
  TrialOutcome o = run_trial(spec);
  if (!a.wall_time) o.wall_time = 0.0;
  write_csv(PhaseTable({TrialRecord::from(o)}), out);
  err << a.method << " n=" << a.n << " r=" << a.r << " m=" << a.m << ": "
      << (o.success ? "success" : "failure") << ", rel_error=" << num(o.rel_error)
      << ", residual=" << num(o.residual);
  if (!o.note.empty()) err << " (" << o.note << ")";
  err << '\n';
  return o.success ? kExitOk : kExitNegative;
}

// --- phase --------------------------------------------------------------------

struct PhaseArgs {
  std::vector<std::size_t> n;
  std::vector<std::size_t> r;
  std::vector<std::size_t> m;
  std::optional<std::size_t> m_min;
  std::optional<std::size_t> m_max;
  std::size_t m_step = 1;
  std::vector<std::string> methods{"rank_min"};
  std::size_t trials = 20;
  std::size_t restarts = SolverParams{}.restarts;
  std::size_t max_iters = SolverParams{}.max_iters;
  bool wall_time = false;
};

std::vector<std::pair<std::string, double>> threshold_rules(std::size_t n, std::size_t r) {
  const theory::ProblemDims d{static_cast<std::int64_t>(n), static_cast<std::int64_t>(r)};
  std::vector<std::pair<std::string, double>> rules;
  rules.emplace_back("weak", static_cast<double>(theory::weak_threshold(d)));
  if (d.strong_applicable())
    rules.emplace_back("strong", static_cast<double>(theory::strong_threshold(d)));
  rules.emplace_back("nuclear_ref", static_cast<double>(theory::nuclear_empirical_reference(d)));
  return rules;
}

int cmd_phase(const PhaseArgs& a, const Globals& g, std::ostream& out) {
  SweepConfig cfg;
  cfg.n_values = a.n;
  cfg.r_values = a.r;
  if (!a.m.empty()) {
    if (a.m_min || a.m_max) throw UsageError("use either --m or --m-min/--m-max");
    cfg.m_values = a.m;
  } else {
    if (!a.m_min || !a.m_max) throw UsageError("give --m or both --m-min and --m-max");
    if (*a.m_min > *a.m_max) throw UsageError("--m-min must not exceed --m-max");
    cfg.m_values = m_range(*a.m_min, *a.m_max, a.m_step);
  }
  for (const auto& name : a.methods) cfg.methods.push_back(*parse_method(name));
  cfg.trials_per_cell = a.trials;
  cfg.master_seed = g.seed;
  cfg.solver.restarts = a.restarts;
  cfg.solver.max_iters = a.max_iters;
  cfg.workers = resolve_threads(g);
  cfg.record_wall_time = a.wall_time;

  bool any_cell = false;
  for (std::size_t n : cfg.n_values)
    for (std::size_t r : cfg.r_values)
      for (std::size_t m : cfg.m_values) any_cell = any_cell || (r <= n && m <= n * n);
  if (!any_cell) throw UsageError("grid has no valid cell (need r <= n and m <= n^2)");

  const PhaseTable table = phase_sweep(cfg);

  const std::filesystem::path dir(g.out_dir);
  std::filesystem::create_directories(dir);
  {
    auto f = open_output(dir / "trials.csv");
    write_csv(table, f);
  }
  {
    auto f = open_output(dir / "summary.csv");
    write_summary_csv(table, f);
  }
  {
    auto f = open_output(dir / "crossings.csv");
    write_crossings_csv(table, f);
  }

  for (const auto& [key, crossing] : table.crossings()) {
    PhasePlot plot;
    plot.method = std::string(to_string(key.method));
    plot.n = key.n;
    plot.r = key.r;
    plot.rates = table.curve(key);
    plot.crossing = crossing;
    plot.rules = threshold_rules(key.n, key.r);
    const std::string name = "phase_" + plot.method + "_" + std::to_string(key.n) + "_" +
                             std::to_string(key.r) + ".svg";
    auto f = open_output(dir / name);
    f << render_phase_svg(plot);

    out << plot.method << " n=" << key.n << " r=" << key.r
        << ": m*=" << (crossing ? num(*crossing) : std::string("none"));
    for (const auto& [label, value] : plot.rules) out << ' ' << label << '=' << num(value);
    out << '\n';
  }
  out << "wrote " << table.records().size() << " trials to " << dir.string() << '\n';
  return kExitOk;
}

// --- unicity ------------------------------------------------------------------

struct UnicityArgs {
  std::size_t n = 0;
  std::size_t r = 0;
  std::size_t m = 0;
  std::optional<std::size_t> k;
  std::size_t restarts = SolverParams{}.restarts;
  std::uint64_t trial = 0;
};

int cmd_unicity(const UnicityArgs& a, const Globals& g, std::ostream& out) {
  check_dims(a.n, a.r);
  check_m(a.n, a.m);
  if (a.k && *a.k > a.n) throw UsageError("--k must not exceed --n");
  TrialSpec spec{a.n, a.r, a.m, Method::unicity_search, g.seed, a.trial, {}};
  spec.solver.restarts = a.restarts;
  spec.search_rank = a.k.value_or(0);
  const TrialOutcome o = run_trial(spec);
  if (o.note != "FOUND" && o.note != "NOT FOUND" && o.note != "INCONCLUSIVE")
    throw std::runtime_error(o.note);
  out << o.note << " objective=" << num(o.rel_error) << " k=" << o.rank_hat << '\n';
  return o.success ? kExitOk : kExitNegative;
}

// --- smallball ----------------------------------------------------------------

struct SmallBallArgs {
  std::size_t n = 4;
  double eps = 0.0;
  std::size_t trials = 100000;
};

int cmd_smallball(const SmallBallArgs& a, const Globals& g, std::ostream& out) {
  Rng rng(g.seed);
  const double p = theory::small_ball_estimate(static_cast<std::int64_t>(a.n), a.eps,
                                               static_cast<std::int64_t>(a.trials), rng);
  const double ref = theory::gaussian_small_ball(a.eps);
  const double se = std::sqrt(ref * (1.0 - ref) / static_cast<double>(a.trials));
  out << "estimate=" << num(p) << '\n';
  out << "reference=" << num(ref) << '\n';
  out << "std_error=" << num(se) << '\n';
  out << "ratio=" << num(p / a.eps) << '\n';
  return kExitOk;
}

const std::vector<std::string> kMethodNames{"rank_min", "nuclear_min", "unicity_search"};

const CLI::Validator kPositive(
    [](std::string& value) -> std::string {
      double v = 0.0;
      if (!CLI::detail::lexical_cast(value, v)) return "not a number: " + value;
      return v > 0.0 ? std::string() : "must be positive, got " + value;
    },
    "POSITIVE");

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-rank matrix recovery experiments", "ulab"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (ULAB_THREADS overrides)")
      ->check(kPositive);
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();

  ThresholdsArgs ta;
  auto* thresholds = app.add_subcommand("thresholds", "Print measurement thresholds");
  thresholds->add_option("--n", ta.n, "Side length")->required()->check(kPositive);
  thresholds->add_option("--r", ta.r, "Rank")->required()->check(kPositive);

  RecoverArgs ra;
  auto* recover = app.add_subcommand("recover", "Run one seeded recovery trial");
  recover->add_option("--n", ra.n, "Side length")->required()->check(kPositive);
  recover->add_option("--r", ra.r, "Rank of the ground truth")->required()->check(kPositive);
  recover->add_option("--m", ra.m, "Number of measurements")->required();
  recover->add_option("--method", ra.method)->check(CLI::IsMember(kMethodNames))->capture_default_str();
  recover->add_option("--trial", ra.trial, "Trial index")->capture_default_str();
  recover->add_option("--restarts", ra.restarts)->check(kPositive)->capture_default_str();
  recover->add_option("--max-iters", ra.max_iters)->check(kPositive)->capture_default_str();
  recover->add_flag("--wall-time", ra.wall_time, "Record wall time in the CSV row");

  PhaseArgs pa;
  auto* phase = app.add_subcommand("phase", "Sweep a grid and write CSVs and SVG plots");
  phase->add_option("--n", pa.n, "Side lengths")->required()->delimiter(',')->check(kPositive);
  phase->add_option("--r", pa.r, "Ranks")->required()->delimiter(',')->check(kPositive);
  phase->add_option("--m", pa.m, "Measurement counts")->delimiter(',');
  phase->add_option("--m-min", pa.m_min);
  phase->add_option("--m-max", pa.m_max);
  phase->add_option("--m-step", pa.m_step)->check(kPositive)->capture_default_str();
  phase->add_option("--method", pa.methods, "Methods")
      ->delimiter(',')
      ->check(CLI::IsMember(kMethodNames))
      ->capture_default_str();
  phase->add_option("--trials", pa.trials, "Trials per cell")->check(kPositive)->capture_default_str();
  phase->add_option("--restarts", pa.restarts)->check(kPositive)->capture_default_str();
  phase->add_option("--max-iters", pa.max_iters)->check(kPositive)->capture_default_str();
  phase->add_flag("--wall-time", pa.wall_time, "Record wall times in trials.csv");

  UnicityArgs ua;
  auto* unicity = app.add_subcommand("unicity", "Search for low-rank null-space elements");
  unicity->add_option("--n", ua.n, "Side length")->required()->check(kPositive);
  unicity->add_option("--r", ua.r, "Rank; the search uses 2r")->required()->check(kPositive);
  unicity->add_option("--m", ua.m, "Number of measurements")->required();
  unicity->add_option("--k", ua.k, "Override the search rank")->check(kPositive);
  unicity->add_option("--restarts", ua.restarts)->check(kPositive)->capture_default_str();
  unicity->add_option("--trial", ua.trial, "Trial index")->capture_default_str();

  SmallBallArgs sa;
  auto* smallball = app.add_subcommand("smallball", "Estimate P(|<A, X>| < eps)");
  smallball->add_option("--n", sa.n, "Side length")->check(kPositive)->capture_default_str();
  smallball->add_option("--eps", sa.eps, "Ball radius")->required()->check(kPositive);
  smallball->add_option("--trials", sa.trials)->check(kPositive)->capture_default_str();

  auto usage = [&](const std::string& message) {
    err << "error: " << message << "\n\n";
    const auto chosen = app.get_subcommands();
    err << (chosen.empty() ? app.help() : chosen.front()->help());
    return kExitUsage;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const auto chosen = app.get_subcommands();
    out << (chosen.empty() ? app.help() : chosen.front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return usage(e.what());
  }

  try {
    if (thresholds->parsed()) return cmd_thresholds(ta, out, err);
    if (recover->parsed()) return cmd_recover(ra, g, out, err);
    if (phase->parsed()) return cmd_phase(pa, g, out);
    if (unicity->parsed()) return cmd_unicity(ua, g, out);
    if (smallball->parsed()) return cmd_smallball(sa, g, out);
  } catch (const UsageError& e) {
    return usage(e.what());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return usage("no subcommand");
}

}  // namespace ulab::cli
