#pragma once

#include <array>
#include <cmath>
#include <string>

#include "splitlangevin/error.hpp"
#include "splitlangevin/model.hpp"

namespace splitlangevin {

struct SolverSettings {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  int max_iter = 50;
  /// Retry with damped fixed-point iteration when Newton stagnates.
  bool fallback = true;

  void validate() const;
};

using Residual2 = std::array<double, 2>;
/// Row-major 2x2 matrix {{a, b}, {c, d}}.
using Jacobian2 = std::array<std::array<double, 2>, 2>;

struct NewtonResult {
  State root;
  int iterations = 0;
  bool used_fallback = false;
};

namespace detail {

inline double norm(const Residual2& r) { return std::hypot(r[0], r[1]); }

inline double tolerance(const SolverSettings& set, const State& guess) {
  return set.abs_tol + set.rel_tol * std::hypot(guess.p, guess.q);
}

// x <- x - omega F(x); valid for residuals of the form x - G(x).
template <class ResidualFn>
bool damped_fixed_point(ResidualFn&& residual, State& x, double tol, int budget) {
  constexpr double omega = 0.5;
  for (int k = 0; k < budget; ++k) {
    const Residual2 r = residual(x);
    if (!std::isfinite(r[0]) || !std::isfinite(r[1])) return false;
    if (norm(r) <= tol) return true;
    x.p -= omega * r[0];
    x.q -= omega * r[1];
  }
  return norm(residual(x)) <= tol;
}

}  // namespace detail

/// Newton iteration for a 2x2 nonlinear system. Converged when
/// |F(x)| <= abs_tol + rel_tol |guess|. `jacobian` must be the exact
/// derivative of `residual`.
///
/// Throws Error(NonConvergence) when the budget is exhausted and
/// Error(SingularJacobian) when a Newton matrix cannot be inverted; with
/// `fallback` set, both first retry a damped fixed-point iteration from the
/// original guess.
template <class ResidualFn, class JacobianFn>
NewtonResult newton_solve_2d(ResidualFn&& residual, JacobianFn&& jacobian, State guess,
                             const SolverSettings& set) {
  if (set.max_iter < 1) {
    throw Error(ErrorCode::NonConvergence, "newton: iteration budget is zero");
  }
  const double tol = detail::tolerance(set, guess);
  State x = guess;
  ErrorCode failure = ErrorCode::NonConvergence;
  double last = 0.0;
  for (int it = 0; it <= set.max_iter; ++it) {
    const Residual2 r = residual(x);
    last = detail::norm(r);
    if (!std::isfinite(last)) break;
    if (last <= tol) return {x, it, false};
    if (it == set.max_iter) break;
    const Jacobian2 J = jacobian(x);
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    const double scale = std::abs(J[0][0] * J[1][1]) + std::abs(J[0][1] * J[1][0]);
    if (!(std::abs(det) > 1e-14 * scale) || !std::isfinite(det)) {
      failure = ErrorCode::SingularJacobian;
      break;
    }
    x.p -= (J[1][1] * r[0] - J[0][1] * r[1]) / det;
    x.q -= (J[0][0] * r[1] - J[1][0] * r[0]) / det;
  }
  if (set.fallback) {
    State y = guess;
    if (detail::damped_fixed_point(residual, y, tol, 20 * set.max_iter)) {
      return {y, set.max_iter, true};
    }
  }
  throw Error(failure, std::string("newton: ") + to_string(failure) +
                           " after " + std::to_string(set.max_iter) +
                           " iterations, residual " + std::to_string(last));
}

}  // namespace splitlangevin
