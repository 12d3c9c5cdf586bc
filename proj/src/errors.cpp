#include "prandtl/errors.hpp"

namespace prandtl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::Underflow: return "Underflow";
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::NonMonotoneStream: return "NonMonotoneStream";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::SolveFailed: return "SolveFailed";
    case ErrorCode::GuardViolation: return "GuardViolation";
    case ErrorCode::BadProfile: return "BadProfile";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DegenerateWall: return "DegenerateWall";
    case ErrorCode::RangeMismatch: return "RangeMismatch";
    case ErrorCode::TooFewStations: return "TooFewStations";
    case ErrorCode::NoisyFloor: return "NoisyFloor";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace prandtl
