#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ulab_cli/cli.hpp"

namespace ulab::cli {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 64;
constexpr double kRight = 24;
constexpr double kTop = 40;
constexpr double kBottom = 56;

const char* rule_color(const std::string& label) {
  if (label == "weak") return "#2a9d8f";
  if (label == "strong") return "#e76f51";
  return "#6c757d";
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Tick spacing from {1, 2, 5} x 10^k giving at most ~10 ticks.
double tick_step(double span) {
  const double raw = span / 10.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 5.0})
    if (f * mag >= raw) return f * mag;
  return 10.0 * mag;
}

}  // namespace

std::string render_phase_svg(const PhasePlot& plot) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& [m, rate] : plot.rates) lo = std::min(lo, m), hi = std::max(hi, m);
  for (const auto& rule : plot.rules) lo = std::min(lo, rule.second), hi = std::max(hi, rule.second);
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  if (hi - lo < 1.0) lo -= 0.5, hi += 0.5;
  const double pad = 0.04 * (hi - lo);
  lo -= pad;
  hi += pad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double m) { return kLeft + (m - lo) / (hi - lo) * pw; };
  auto sy = [&](double rate) { return kTop + (1.0 - rate) * ph; };

  std::ostringstream o;
  o << std::fixed << std::setprecision(2);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
    << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(plot.method) << ", n=" << plot.n << ", r=" << plot.r << "</text>\n";

  // Axes and ticks.
  o << "<g stroke=\"black\" fill=\"none\">\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw
    << "\" y2=\"" << kTop + ph << "\"/>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
    << kTop + ph << "\"/>\n</g>\n";
  const double step = tick_step(hi - lo);
  for (double t = std::ceil(lo / step) * step; t <= hi; t += step) {
    o << "<line x1=\"" << sx(t) << "\" y1=\"" << kTop + ph << "\" x2=\"" << sx(t) << "\" y2=\""
      << kTop + ph + 5 << "\" stroke=\"black\"/>";
    o << "<text x=\"" << sx(t) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
      << std::defaultfloat << std::setprecision(6) << t << std::fixed << std::setprecision(2)
      << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double rate = i / 4.0;
    o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << sy(rate) << "\" x2=\"" << kLeft
      << "\" y2=\"" << sy(rate) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << kLeft - 8 << "\" y=\"" << sy(rate) + 4 << "\" text-anchor=\"end\">"
      << rate << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 14
    << "\" text-anchor=\"middle\">measurements m</text>\n";
  o << "<text transform=\"translate(16," << kTop + ph / 2
    << ") rotate(-90)\" text-anchor=\"middle\">success rate</text>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << sy(0.5) << "\" x2=\"" << kLeft + pw
    << "\" y2=\"" << sy(0.5) << "\" stroke=\"#cccccc\" stroke-dasharray=\"2,3\"/>\n";

  for (std::size_t i = 0; i < plot.rules.size(); ++i) {
    const auto& [label, m] = plot.rules[i];
    o << "<line x1=\"" << sx(m) << "\" y1=\"" << kTop << "\" x2=\"" << sx(m) << "\" y2=\""
      << kTop + ph << "\" stroke=\"" << rule_color(label) << "\" stroke-dasharray=\"6,4\"/>";
    const bool flip = sx(m) > kLeft + 0.75 * pw;
    o << "<text x=\"" << sx(m) + (flip ? -3 : 3) << "\" y=\""
      << kTop + 12 + 14 * static_cast<double>(i) << "\" text-anchor=\""
      << (flip ? "end" : "start") << "\" fill=\"" << rule_color(label) << "\">" << escape(label) << " " << std::defaultfloat
      << std::setprecision(6) << m << std::fixed << std::setprecision(2) << "</text>\n";
  }

  if (!plot.rates.empty()) {
    o << "<polyline fill=\"none\" stroke=\"#264653\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < plot.rates.size(); ++i)
      o << (i ? " " : "") << sx(plot.rates[i].first) << ',' << sy(plot.rates[i].second);
    o << "\"/>\n";
    for (const auto& [m, rate] : plot.rates)
      o << "<circle cx=\"" << sx(m) << "\" cy=\"" << sy(rate) << "\" r=\"3\" fill=\"#264653\"/>\n";
  }
  if (plot.crossing) {
    o << "<circle cx=\"" << sx(*plot.crossing) << "\" cy=\"" << sy(0.5)
      << "\" r=\"5\" fill=\"none\" stroke=\"#d62828\" stroke-width=\"2\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace ulab::cli
