#pragma once

#include <span>

#include "splitlangevin/model.hpp"

namespace splitlangevin {

/// Exact one-step coefficients of the linear stochastic subsystem
///   dP = -(upsilon/2) P dt + sigma dW,  dQ = -(upsilon/2) Q dt.
struct OUIncrement {
  double decay;      // exp(-upsilon tau / 2)
  double noise_std;  // sigma sqrt((1 - exp(-upsilon tau)) / upsilon)
  double tau;

  static OUIncrement make(double tau, const PhysParams& prm);
};

/// Fine Brownian increments covering one coarse step; `dt` is the uniform
/// fine spacing.
struct BrownianWindow {
  std::span<const double> increments;
  double dt;
};

/// Distribution-exact sub-step driven by a standard normal draw z.
State ou_substep_exact(const State& s, double tau, const PhysParams& prm, double z);
State ou_substep_exact(const State& s, const OUIncrement& inc, double z);

/// Sub-step driven by a fine Brownian path. The stochastic convolution is
/// evaluated with midpoint weights exp(-(upsilon/2)(t_{n+1} - m_k)).
/// Throws Error(GridMismatch) unless window.increments.size() * window.dt
/// equals tau.
State ou_substep_coupled(const State& s, double tau, const BrownianWindow& window,
                         const PhysParams& prm);

/// Sigma * sum_k w_k dW_k with the midpoint weights above.
double ou_convolution(const BrownianWindow& window, const PhysParams& prm);

/// Sub-step of the classical splitting: full-rate OU in p, q frozen. Kept
/// only for the dissipation comparison.
State naive_substep_exact(const State& s, double tau, const PhysParams& prm, double z);

}  // namespace splitlangevin
