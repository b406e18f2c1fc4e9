#include "splitlangevin/splitting.hpp"

#include <cmath>
#include <string>

#include "splitlangevin/error.hpp"

namespace splitlangevin {

namespace {

State stochastic_substep(const State& s, double tau, const PhysParams& prm,
                         const StepNoise& noise) {
  if (const auto* draw = std::get_if<NormalDraw>(&noise)) {
    return ou_substep_exact(s, tau, prm, draw->z);
  }
  return ou_substep_coupled(s, tau, std::get<BrownianWindow>(noise), prm);
}

}  // namespace

std::string SchemeSpec::name() const {
  std::string base;
  switch (map_kind) {
    case MapKind::AVF: base = "SAVF"; break;
    case MapKind::DG: base = "SDG"; break;
    case MapKind::PAVF: base = "SPAVF"; break;
    case MapKind::SymplecticEuler: base = "SSE"; break;
  }
  return composition == Composition::Strang ? "Strang-" + base : base;
}

SchemeSpec parse_scheme(const std::string& name) {
  SchemeSpec spec;
  std::string rest = name;
  if (rest.rfind("Strang-", 0) == 0 || rest.rfind("strang-", 0) == 0) {
    spec.composition = Composition::Strang;
    rest = rest.substr(7);
  }
  if (rest == "SAVF") {
    spec.map_kind = MapKind::AVF;
  } else if (rest == "SDG") {
    spec.map_kind = MapKind::DG;
  } else if (rest == "SPAVF") {
    spec.map_kind = MapKind::PAVF;
  } else if (rest == "SSE") {
    spec.map_kind = MapKind::SymplecticEuler;
  } else {
    spec.map_kind = parse_map_kind(rest);
  }
  return spec;
}

State lie_trotter_step(const State& s, double tau, const PhysParams& prm,
                       const SchemeSpec& spec, const StepNoise& noise) {
  const State mid = conservative_step(spec.map_kind, s, tau, prm, spec.solver);
  return stochastic_substep(mid, tau, prm, noise);
}

State strang_step(const State& s, double tau, const PhysParams& prm, const SchemeSpec& spec,
                  const StepNoise& noise) {
  const double half = 0.5 * tau;
  const State first = conservative_step(spec.map_kind, s, half, prm, spec.solver);
  const State noisy = stochastic_substep(first, tau, prm, noise);
  return conservative_step(spec.map_kind, noisy, half, prm, spec.solver);
}

State scheme_step(const State& s, double tau, const PhysParams& prm, const SchemeSpec& spec,
                  const StepNoise& noise) {
  return spec.composition == Composition::Strang ? strang_step(s, tau, prm, spec, noise)
                                                 : lie_trotter_step(s, tau, prm, spec, noise);
}

std::int64_t step_count(double T, double tau) {
  if (!(T >= 0.0) || !(tau > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be >= 0 and step > 0");
  }
  const double ratio = T / tau;
  const auto n = static_cast<std::int64_t>(std::llround(ratio));
  if (std::abs(static_cast<double>(n) - ratio) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(ErrorCode::InvalidArgument,
                "horizon " + std::to_string(T) + " is not a multiple of step " +
                    std::to_string(tau));
  }
  return n;
}

Trajectory simulate(const State& initial, double T, double tau, const PhysParams& prm,
                    const SchemeSpec& spec, std::uint64_t seed) {
  const std::int64_t n = step_count(T, tau);
  Trajectory traj;
  traj.scheme = spec;
  traj.seed = seed;
  traj.tau = tau;
  traj.times.reserve(static_cast<std::size_t>(n) + 1);
  traj.states.reserve(static_cast<std::size_t>(n) + 1);
  NormalStream normals(seed);
  propagate(initial, n, tau, prm, spec, normals, [&](std::int64_t k, const State& x) {
    traj.times.push_back(static_cast<double>(k) * tau);
    traj.states.push_back(x);
  });
  return traj;
}

ConsistencyResiduals consistency_residuals(MapKind kind, const State& s, double tau,
                                           const PhysParams& prm, const SolverSettings& set) {
  if (!(tau > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "consistency residuals need tau > 0");
  }
  const State out = conservative_step(kind, s, tau, prm, set);
  const double half = 0.5 * prm.upsilon();
  const double A = out.p - s.p;
  const double B = out.q - s.q;
  return {std::abs(half * s.p + prm.potential().grad(s.q) + A / tau),
          std::abs(s.p + half * s.q - B / tau)};
}

}  // namespace splitlangevin
