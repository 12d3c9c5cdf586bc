#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace prandtl {

/// Machine-readable failure categories. The CLI maps each one to an exit
/// code and reports the name in its JSON diagnostic.
enum class ErrorCode {
  InvalidArgument,
  NoBracket,
  StepTooLarge,
  Underflow,
  NonMonotone,
  NonMonotoneStream,
  OutOfRange,
  SolveFailed,
  GuardViolation,
  BadProfile,
  NoConvergence,
  ZeroVector,
  DegenerateWall,
  RangeMismatch,
  TooFewStations,
  NoisyFloor,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace prandtl
