#pragma once

#include <stdexcept>
#include <string>

namespace hyperdiff {

/// Error categories; the numeric values double as CLI exit codes.
enum class ErrorKind : int {
  config = 2,
  precondition = 3,
  cap_exhausted = 4,
  invariant = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct PreconditionError : Error {
  explicit PreconditionError(const std::string& what)
      : Error(ErrorKind::precondition, what) {}
};

/// A bounded search ran out of candidates. Signals the sweep bound, not a
/// mathematical refutation.
struct CapExhausted : Error {
  explicit CapExhausted(const std::string& what)
      : Error(ErrorKind::cap_exhausted, what) {}
};

struct InvariantViolation : Error {
  explicit InvariantViolation(const std::string& what)
      : Error(ErrorKind::invariant, what) {}
};

}  // namespace hyperdiff
