#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "splitlangevin/detflow.hpp"
#include "splitlangevin/model.hpp"
#include "splitlangevin/newton.hpp"
#include "splitlangevin/random.hpp"
#include "splitlangevin/stochflow.hpp"

namespace splitlangevin {

enum class Composition { LieTrotter, Strang };

struct SchemeSpec {
  MapKind map_kind = MapKind::AVF;
  Composition composition = Composition::LieTrotter;
  SolverSettings solver{};

  /// "SAVF", "SDG", "SPAVF", "SSE", with a "Strang-" prefix for Strang.
  std::string name() const;
};

/// Inverse of SchemeSpec::name(); also accepts the bare map names.
SchemeSpec parse_scheme(const std::string& name);

/// Standard normal draw for the distribution-exact stochastic sub-step.
struct NormalDraw {
  double z;
};

using StepNoise = std::variant<NormalDraw, BrownianWindow>;

/// Stochastic sub-step applied to the conservative map output.
State lie_trotter_step(const State& s, double tau, const PhysParams& prm,
                       const SchemeSpec& spec, const StepNoise& noise);

/// Half conservative step, full stochastic step, half conservative step.
State strang_step(const State& s, double tau, const PhysParams& prm, const SchemeSpec& spec,
                  const StepNoise& noise);

/// Dispatches on spec.composition.
State scheme_step(const State& s, double tau, const PhysParams& prm, const SchemeSpec& spec,
                  const StepNoise& noise);

/// Number of steps N with N tau == T; throws Error(InvalidArgument) otherwise.
std::int64_t step_count(double T, double tau);

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  SchemeSpec scheme;
  std::uint64_t seed = 0;
  double tau = 0.0;
};

/// Evolves with exact stochastic sub-steps drawn from NormalStream(seed).
/// A solver failure is rethrown with the failing step index attached.
Trajectory simulate(const State& initial, double T, double tau, const PhysParams& prm,
                    const SchemeSpec& spec, std::uint64_t seed);

/// Streaming form of simulate: calls observer(n, state) for n = 0..n_steps.
template <class Observer>
State propagate(const State& initial, std::int64_t n_steps, double tau, const PhysParams& prm,
                const SchemeSpec& spec, NormalStream& normals, Observer&& observer) {
  State x = initial;
  observer(std::int64_t{0}, x);
  for (std::int64_t n = 0; n < n_steps; ++n) {
    try {
      x = scheme_step(x, tau, prm, spec, NormalDraw{normals()});
    } catch (Error& e) {
      e.at_step(n);
      throw;
    }
    observer(n + 1, x);
  }
  return x;
}

/// Evolves on a fine Brownian path; each step of size tau consumes
/// tau / fine_dt consecutive increments. observer(n, state) as above.
template <class Observer>
State propagate_coupled(const State& initial, double tau, std::span<const double> increments,
                        double fine_dt, const PhysParams& prm, const SchemeSpec& spec,
                        Observer&& observer) {
  const auto per_step = static_cast<std::size_t>(std::llround(tau / fine_dt));
  if (per_step == 0 || increments.size() % per_step != 0) {
    throw Error(ErrorCode::GridMismatch, "coarse step does not tile the fine grid");
  }
  const auto n_steps = static_cast<std::int64_t>(increments.size() / per_step);
  State x = initial;
  observer(std::int64_t{0}, x);
  for (std::int64_t n = 0; n < n_steps; ++n) {
    const BrownianWindow window{increments.subspan(static_cast<std::size_t>(n) * per_step, per_step),
                                fine_dt};
    try {
      x = scheme_step(x, tau, prm, spec, window);
    } catch (Error& e) {
      e.at_step(n);
      throw;
    }
    observer(n + 1, x);
  }
  return x;
}

inline State propagate_coupled(const State& initial, double tau,
                               std::span<const double> increments, double fine_dt,
                               const PhysParams& prm, const SchemeSpec& spec) {
  return propagate_coupled(initial, tau, increments, fine_dt, prm, spec,
                           [](std::int64_t, const State&) {});
}

struct ConsistencyResiduals {
  double rA;  // |(upsilon/2) P + U'(Q) + A / tau|,  A = P_bar - P
  double rB;  // |P + (upsilon/2) Q - B / tau|,     B = Q_bar - Q
};

ConsistencyResiduals consistency_residuals(MapKind kind, const State& s, double tau,
                                           const PhysParams& prm,
                                           const SolverSettings& set = {});

}  // namespace splitlangevin
