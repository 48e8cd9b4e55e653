#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ulab/harness.hpp"
#include "ulab/theory.hpp"

namespace ulab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <class T>
T parse_integer(std::string_view field, const char* name, std::size_t line) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw ParseError(std::string("bad integer in column ") + name, line);
  }
  return value;
}

double parse_real(std::string_view field, const char* name, std::size_t line) {
  if (field == "inf") return std::numeric_limits<double>::infinity();
  if (field == "-inf") return -std::numeric_limits<double>::infinity();
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw ParseError(std::string("bad number in column ") + name, line);
  }
  return value;
}

}  // namespace

void write_csv(const PhaseTable& table, std::ostream& out) {
  out << kTrialsHeader << '\n';
  for (const TrialRecord& r : table.records()) {
    out << to_string(r.method) << ',' << r.n << ',' << r.r << ',' << r.m << ',' << r.trial
        << ',' << r.seed << ',' << (r.success ? 1 : 0) << ',' << format_double(r.rel_error)
        << ',' << format_double(r.residual) << ',' << format_double(r.wall_time_s) << '\n';
  }
}

void write_csv(const PhaseTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  write_csv(table, out);
}

PhaseTable read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("missing header", line_no);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrialsHeader) throw ParseError("unexpected header", line_no);

  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 10) {
      throw ParseError("expected 10 fields, got " + std::to_string(f.size()), line_no);
    }
    TrialRecord rec;
    const auto method = parse_method(f[0]);
    if (!method) throw ParseError("unknown method '" + std::string(f[0]) + "'", line_no);
    rec.method = *method;
    rec.n = parse_integer<std::size_t>(f[1], "n", line_no);
    rec.r = parse_integer<std::size_t>(f[2], "r", line_no);
    rec.m = parse_integer<std::size_t>(f[3], "m", line_no);
    rec.trial = parse_integer<std::uint64_t>(f[4], "trial", line_no);
    rec.seed = parse_integer<std::uint64_t>(f[5], "seed", line_no);
    const int success = parse_integer<int>(f[6], "success", line_no);
    if (success != 0 && success != 1) throw ParseError("success must be 0 or 1", line_no);
    rec.success = success == 1;
    rec.rel_error = parse_real(f[7], "rel_error", line_no);
    rec.residual = parse_real(f[8], "residual", line_no);
    rec.wall_time_s = parse_real(f[9], "wall_time_s", line_no);
    records.push_back(rec);
  }
  return PhaseTable(std::move(records));
}

PhaseTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  return read_csv(in);
}

void write_summary_csv(const PhaseTable& table, std::ostream& out) {
  out << kSummaryHeader << '\n';
  for (const auto& [key, counts] : table.cells()) {
    out << to_string(key.method) << ',' << key.n << ',' << key.r << ',' << key.m << ','
        << counts.trials << ',' << counts.successes << ',' << format_double(counts.rate())
        << '\n';
  }
}

void write_crossings_csv(const PhaseTable& table, std::ostream& out) {
  out << kCrossingsHeader << '\n';
  for (const auto& [key, crossing] : table.crossings()) {
    const theory::ProblemDims dims{static_cast<std::int64_t>(key.n),
                                   static_cast<std::int64_t>(key.r)};
    out << to_string(key.method) << ',' << key.n << ',' << key.r << ',';
    if (crossing) out << format_double(*crossing);
    out << ',' << theory::weak_threshold(dims) << ',';
    if (dims.strong_applicable()) out << theory::strong_threshold(dims);
    out << ',' << theory::nuclear_empirical_reference(dims) << '\n';
  }
}

}  // namespace ulab
