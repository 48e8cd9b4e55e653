#pragma once

#include <stdexcept>
#include <string>

namespace ulab {

/// An iterative kernel hit its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A factorization met a (numerically) rank-deficient matrix where full rank
/// was required. Callers usually resample or restart.
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file, with the offending line when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_{line} {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ulab
