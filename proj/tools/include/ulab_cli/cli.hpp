#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ulab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNegative = 2;

/// Entry point of the `ulab` tool. Reports go to `out`, usage text and
/// diagnostics to `err`; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct PhasePlot {
  std::string method;
  std::size_t n = 0;
  std::size_t r = 0;
  std::vector<std::pair<double, double>> rates;  ///< (m, success rate), sorted by m
  std::optional<double> crossing;
  /// Labelled vertical rules, e.g. {"weak", 20}.
  std::vector<std::pair<std::string, double>> rules;
};

/// Standalone SVG of one success-rate curve.
std::string render_phase_svg(const PhasePlot& plot);

}  // namespace ulab::cli
