#include "splitlangevin/detflow.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "splitlangevin/error.hpp"

namespace splitlangevin {

namespace {

constexpr double kDegenerateDisplacement = 1e-28;

State euler_predictor(const State& s, double tau, const PhysParams& prm) {
  const State f = deterministic_field(s, prm);
  return {s.p + tau * f.p, s.q + tau * f.q};
}

NewtonResult solve_avf(const State& s, double tau, const PhysParams& prm,
                       const SolverSettings& set) {
  const Potential& pot = prm.potential();
  const double a = 0.25 * tau * prm.upsilon();
  const auto residual = [&](const State& x) -> Residual2 {
    return {x.p - s.p + a * (x.p + s.p) + tau * pot.avg_grad(s.q, x.q),
            x.q - s.q - 0.5 * tau * (x.p + s.p) - a * (x.q + s.q)};
  };
  const auto jacobian = [&](const State& x) -> Jacobian2 {
    return {{{1.0 + a, tau * pot.avg_grad_db(s.q, x.q)}, {-0.5 * tau, 1.0 - a}}};
  };
  return newton_solve_2d(residual, jacobian, euler_predictor(s, tau, prm), set);
}

NewtonResult solve_pavf(const State& s, double tau, const PhysParams& prm,
                        const SolverSettings& set) {
  const Potential& pot = prm.potential();
  const double a = 0.5 * tau * prm.upsilon();
  const auto residual = [&](const State& x) -> Residual2 {
    return {x.p - s.p + a * x.p + tau * pot.avg_grad(s.q, x.q),
            x.q - s.q - 0.5 * tau * (x.p + s.p) - a * s.q};
  };
  const auto jacobian = [&](const State& x) -> Jacobian2 {
    return {{{1.0 + a, tau * pot.avg_grad_db(s.q, x.q)}, {-0.5 * tau, 1.0}}};
  };
  return newton_solve_2d(residual, jacobian, euler_predictor(s, tau, prm), set);
}

// For H = p^2/2 + (upsilon/2) p q + U(q) the quadratic part has an exact
// midpoint gradient, so the Gonzalez correction reduces to
//   k delta,  k = delta_q * defect(q, q_hat) / |delta|^2.
NewtonResult solve_dg(const State& s, double tau, const PhysParams& prm,
                      const SolverSettings& set) {
  const Potential& pot = prm.potential();
  const double ups = prm.upsilon();
  const auto residual = [&](const State& x) -> Residual2 {
    const double dp = x.p - s.p;
    const double dq = x.q - s.q;
    const double mp = 0.5 * (x.p + s.p);
    const double mq = 0.5 * (x.q + s.q);
    const double dd = dp * dp + dq * dq;
    const double k = dd < kDegenerateDisplacement ? 0.0 : dq * pot.midpoint_defect(s.q, x.q) / dd;
    const double grad_p = mp + 0.5 * ups * mq + k * dp;
    const double grad_q = pot.grad(mq) + 0.5 * ups * mp + k * dq;
    return {dp + tau * grad_q, dq - tau * grad_p};
  };
  const auto jacobian = [&](const State& x) -> Jacobian2 {
    const double dp = x.p - s.p;
    const double dq = x.q - s.q;
    const double mq = 0.5 * (x.q + s.q);
    const double dd = dp * dp + dq * dq;
    double k = 0.0;
    double k_p = 0.0;
    double k_q = 0.0;
    if (dd >= kDegenerateDisplacement) {
      const double d = pot.midpoint_defect(s.q, x.q);
      const double d_b = pot.midpoint_defect_db(s.q, x.q);
      k = dq * d / dd;
      k_p = -2.0 * dp * dq * d / (dd * dd);
      k_q = ((d + dq * d_b) * dd - 2.0 * dq * dq * d) / (dd * dd);
    }
    return {{{1.0 + tau * (0.25 * ups + dq * k_p), tau * (0.5 * pot.hess(mq) + k + dq * k_q)},
             {-tau * (0.5 + k + dp * k_p), 1.0 - tau * (0.25 * ups + dp * k_q)}}};
  };
  return newton_solve_2d(residual, jacobian, euler_predictor(s, tau, prm), set);
}

}  // namespace

std::string_view to_string(MapKind kind) noexcept {
  switch (kind) {
    case MapKind::AVF: return "AVF";
    case MapKind::DG: return "DG";
    case MapKind::PAVF: return "PAVF";
    case MapKind::SymplecticEuler: return "SymplecticEuler";
  }
  return "?";
}

MapKind parse_map_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "avf") return MapKind::AVF;
  if (lower == "dg") return MapKind::DG;
  if (lower == "pavf") return MapKind::PAVF;
  if (lower == "se" || lower == "symplecticeuler" || lower == "symplectic-euler") {
    return MapKind::SymplecticEuler;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown map kind '" + std::string(name) + "'");
}

bool conserves_energy(MapKind kind) noexcept { return kind != MapKind::SymplecticEuler; }

double avg_cubic(double a, double b) { return 0.25 * (a + b) * (a * a + b * b); }

State deterministic_field(const State& s, const PhysParams& prm) {
  const double half = 0.5 * prm.upsilon();
  return {-half * s.p - prm.potential().grad(s.q), s.p + half * s.q};
}

void check_step_size(double tau, const PhysParams& prm) {
  const double limit = std::min(1.0, 2.0 / prm.upsilon());
  if (!(tau >= 0.0) || !(tau < limit)) {
    throw Error(ErrorCode::InvalidArgument,
                "step size " + std::to_string(tau) + " outside [0, " +
                    std::to_string(limit) + ")");
  }
}

NewtonResult conservative_solve(MapKind kind, const State& s, double tau,
                                const PhysParams& prm, const SolverSettings& set) {
  check_step_size(tau, prm);
  if (tau == 0.0) return {s, 0, false};
  switch (kind) {
    case MapKind::AVF: return solve_avf(s, tau, prm, set);
    case MapKind::DG: return solve_dg(s, tau, prm, set);
    case MapKind::PAVF: return solve_pavf(s, tau, prm, set);
    case MapKind::SymplecticEuler: return {sympl_euler_step(s, tau, prm), 0, false};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown map kind");
}

State avf_step(const State& s, double tau, const PhysParams& prm, const SolverSettings& set) {
  return conservative_solve(MapKind::AVF, s, tau, prm, set).root;
}

State dg_step(const State& s, double tau, const PhysParams& prm, const SolverSettings& set) {
  return conservative_solve(MapKind::DG, s, tau, prm, set).root;
}

State pavf_step(const State& s, double tau, const PhysParams& prm, const SolverSettings& set) {
  return conservative_solve(MapKind::PAVF, s, tau, prm, set).root;
}

State sympl_euler_step(const State& s, double tau, const PhysParams& prm) {
  if (!(tau >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "step size must be non-negative");
  }
  const double half = 0.5 * prm.upsilon();
  const double p = (s.p - tau * prm.potential().grad(s.q)) / (1.0 + tau * half);
  return {p, s.q + tau * (p + half * s.q)};
}

State conservative_step(MapKind kind, const State& s, double tau, const PhysParams& prm,
                        const SolverSettings& set) {
  if (kind == MapKind::SymplecticEuler) return sympl_euler_step(s, tau, prm);
  return conservative_solve(kind, s, tau, prm, set).root;
}

double energy_residual(MapKind kind, const State& s, double tau, const PhysParams& prm,
                       const SolverSettings& set) {
  return energy_H(conservative_step(kind, s, tau, prm, set), prm) - energy_H(s, prm);
}

void SolverSettings::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "solver tolerances must be positive");
  }
  if (max_iter < 1) {
    throw Error(ErrorCode::InvalidArgument, "solver max_iter must be at least 1");
  }
}

}  // namespace splitlangevin
