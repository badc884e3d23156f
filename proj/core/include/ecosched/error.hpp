#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ecosched {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed workload, trace or plan document. `line()` is 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A syntactically valid workload that breaks one or more invariants.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> violations_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised when no mode of an application carries a usable profiling signal.
class PredictionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a metric or arithmetic helper.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The simulator was asked to do something impossible (infeasible launch,
/// idle node with waiting jobs). Indicates a policy bug, not bad input.
class EngineFault : public Error {
 public:
  using Error::Error;
};

class ReplayError : public Error {
 public:
  using Error::Error;
};

}  // namespace ecosched
