#pragma once

#include <stdexcept>
#include <string>

namespace orbitlab {

enum class ErrorCode {
  ConfigError,
  DimensionMismatch,
  NotPowerBounded,
  TolAmbiguous,
  SylvesterIllConditioned,
  UnsupportedDiagonal,
  HorizonExceeded,
  NoSeparation,
  ProjectionUnavailable,
  Exhausted,
  BpViolation,
  Internal,
};

const char* error_code_name(ErrorCode code);

/// Domain error carrying a stable code that the CLI maps to exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError: return "CONFIG_ERROR";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::NotPowerBounded: return "NOT_POWER_BOUNDED";
    case ErrorCode::TolAmbiguous: return "TOL_AMBIGUOUS";
    case ErrorCode::SylvesterIllConditioned: return "SYLVESTER_ILL_CONDITIONED";
    case ErrorCode::UnsupportedDiagonal: return "UNSUPPORTED_DIAGONAL";
    case ErrorCode::HorizonExceeded: return "HORIZON_EXCEEDED";
    case ErrorCode::NoSeparation: return "NO_SEPARATION";
    case ErrorCode::ProjectionUnavailable: return "PROJECTION_UNAVAILABLE";
    case ErrorCode::Exhausted: return "EXHAUSTED";
    case ErrorCode::BpViolation: return "BP_VIOLATION";
    case ErrorCode::Internal: return "INTERNAL";
  }
  return "UNKNOWN";
}

}  // namespace orbitlab
