#include "splitlangevin/stochflow.hpp"

#include <cmath>
#include <string>

#include "splitlangevin/error.hpp"

namespace splitlangevin {

OUIncrement OUIncrement::make(double tau, const PhysParams& prm) {
  if (!(tau >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "step size must be non-negative");
  }
  const double ups = prm.upsilon();
  // -expm1(-x) = 1 - e^{-x} without cancellation for small steps
  const double var = -std::expm1(-ups * tau) / ups;
  return {std::exp(-0.5 * ups * tau), prm.sigma() * std::sqrt(var), tau};
}

State ou_substep_exact(const State& s, const OUIncrement& inc, double z) {
  return {inc.decay * s.p + inc.noise_std * z, inc.decay * s.q};
}

State ou_substep_exact(const State& s, double tau, const PhysParams& prm, double z) {
  return ou_substep_exact(s, OUIncrement::make(tau, prm), z);
}

double ou_convolution(const BrownianWindow& window, const PhysParams& prm) {
  const std::size_t n = window.increments.size();
  const double half = 0.5 * prm.upsilon();
  // weight of cell k: exp(-half (n - k - 1/2) dt), built backwards from the
  // last cell.
  const double ratio = std::exp(-half * window.dt);
  double weight = std::exp(-0.25 * prm.upsilon() * window.dt);
  double acc = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    acc += weight * window.increments[k];
    weight *= ratio;
  }
  return prm.sigma() * acc;
}

State ou_substep_coupled(const State& s, double tau, const BrownianWindow& window,
                         const PhysParams& prm) {
  const std::size_t n = window.increments.size();
  if (n == 0 || !(window.dt > 0.0)) {
    throw Error(ErrorCode::GridMismatch, "empty Brownian window");
  }
  if (std::abs(static_cast<double>(n) * window.dt - tau) > 1e-9 * tau) {
    throw Error(ErrorCode::GridMismatch,
                "window of " + std::to_string(n) + " cells of " + std::to_string(window.dt) +
                    " does not span step " + std::to_string(tau));
  }
  const double decay = std::exp(-0.5 * prm.upsilon() * tau);
  return {decay * s.p + ou_convolution(window, prm), decay * s.q};
}

State naive_substep_exact(const State& s, double tau, const PhysParams& prm, double z) {
  if (!(tau >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "step size must be non-negative");
  }
  const double ups = prm.upsilon();
  const double sd = prm.sigma() * std::sqrt(-std::expm1(-2.0 * ups * tau) / (2.0 * ups));
  return {std::exp(-ups * tau) * s.p + sd * z, s.q};
}

}  // namespace splitlangevin
