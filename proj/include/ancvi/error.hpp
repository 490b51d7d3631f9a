#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ancvi {

enum class ErrorCode {
  NonStochasticRow,
  NonFiniteEntry,
  BadGamma,
  BadBranching,
  BadSize,
  KindMismatch,
  DimensionMismatch,
  NoConvergence,
  ConfigMismatch,
  MissingIterates,
  GammaMismatch,
  SpanViolated,
  HorizonExceeded,
  NotMonotoneStart,
  ValidationFailed,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code. All library failures go through
/// this type so callers (the CLI in particular) can map them to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ancvi
