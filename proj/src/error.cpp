#include "splitlangevin/error.hpp"

namespace splitlangevin {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonIntegralGrid: return "NonIntegralGrid";
    case ErrorCode::NonIntegralRatio: return "NonIntegralRatio";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::NonPositiveError: return "NonPositiveError";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UnknownExperiment: return "UnknownExperiment";
  }
  return "Unknown";
}

}  // namespace splitlangevin
