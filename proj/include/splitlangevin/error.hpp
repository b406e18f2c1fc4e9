#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace splitlangevin {

enum class ErrorCode {
  InvalidArgument,
  NonConvergence,
  SingularJacobian,
  GridMismatch,
  NonIntegralGrid,
  NonIntegralRatio,
  EmptyWindow,
  DegenerateRange,
  NonPositiveError,
  QuadratureFailure,
  ConfigError,
  UnknownExperiment,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library. Failures raised inside a trajectory
/// or an ensemble carry the step and path index where they happened.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  std::optional<std::int64_t> step() const noexcept { return step_; }
  std::optional<std::int64_t> path() const noexcept { return path_; }

  Error& at_step(std::int64_t n) {
    step_ = n;
    return *this;
  }
  Error& at_path(std::int64_t k) {
    path_ = k;
    return *this;
  }

 private:
  ErrorCode code_;
  std::optional<std::int64_t> step_;
  std::optional<std::int64_t> path_;
};

}  // namespace splitlangevin
