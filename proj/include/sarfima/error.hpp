#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sarfima {

/// Broad failure class. Maps one-to-one onto the CLI exit codes.
enum class ErrorKind { usage = 1, data = 2, numerical = 3 };

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::data: return "data";
    case ErrorKind::numerical: return "numerical";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Bad input: malformed files, too-short series, out-of-range arguments.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

/// One violated model condition. `code` is stable and machine-readable,
/// `message` is the human form (e.g. "|d+D| >= 1/2").
struct Violation {
  std::string code;
  std::string message;
  bool operator==(const Violation&) const = default;
};

class ModelError : public DataError {
 public:
  explicit ModelError(std::vector<Violation> violations)
      : DataError(join(violations)), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<Violation>& vs) {
    std::string out = "invalid model:";
    for (const auto& v : vs) out += " [" + v.code + "] " + v.message + ";";
    return out;
  }
  std::vector<Violation> violations_;
};

/// Optimizer ran out of iterations. Carries the best point found so far.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best, double best_value)
      : NumericalError(what), best_(std::move(best)), best_value_(best_value) {}
  const std::vector<double>& best_so_far() const noexcept { return best_; }
  double best_value() const noexcept { return best_value_; }

 private:
  std::vector<double> best_;
  double best_value_;
};

/// Wraps a failure from one pipeline stage, keeping the original kind.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), "stage '" + stage + "': " + cause.what()), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace sarfima
