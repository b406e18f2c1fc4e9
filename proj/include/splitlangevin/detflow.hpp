#pragma once

#include <string_view>

#include "splitlangevin/model.hpp"
#include "splitlangevin/newton.hpp"

namespace splitlangevin {

/// One-step maps for the deterministic subsystem
///   dP = -(upsilon/2) P dt - U'(Q) dt,  dQ = P dt + (upsilon/2) Q dt,
/// which is Hamiltonian with energy H = H0 + (upsilon/2) P Q.
/// AVF, DG and PAVF conserve H; SymplecticEuler conserves dp ^ dq.
enum class MapKind { AVF, DG, PAVF, SymplecticEuler };

std::string_view to_string(MapKind kind) noexcept;
/// Accepts "AVF", "DG", "PAVF", "SE"/"SymplecticEuler" (case-insensitive).
MapKind parse_map_kind(std::string_view name);

bool conserves_energy(MapKind kind) noexcept;

/// Closed form of int_0^1 (a + s (b - a))^3 ds.
double avg_cubic(double a, double b);

/// Vector field of the deterministic subsystem.
State deterministic_field(const State& s, const PhysParams& prm);

/// Throws Error(InvalidArgument) unless 0 <= tau < min(1, 2/upsilon).
void check_step_size(double tau, const PhysParams& prm);

State avf_step(const State& s, double tau, const PhysParams& prm,
               const SolverSettings& set = {});

/// Gonzalez discrete gradient, midpoint variant. The rank-one correction is
/// dropped when |delta|^2 < 1e-28.
State dg_step(const State& s, double tau, const PhysParams& prm,
              const SolverSettings& set = {});

State pavf_step(const State& s, double tau, const PhysParams& prm,
                const SolverSettings& set = {});

/// Closed form, no solver. Unit Jacobian determinant.
State sympl_euler_step(const State& s, double tau, const PhysParams& prm);

State conservative_step(MapKind kind, const State& s, double tau, const PhysParams& prm,
                        const SolverSettings& set = {});

/// Same as the step functions but also reports solver iterations.
NewtonResult conservative_solve(MapKind kind, const State& s, double tau,
                                const PhysParams& prm, const SolverSettings& set = {});

/// H(map(s)) - H(s).
double energy_residual(MapKind kind, const State& s, double tau, const PhysParams& prm,
                       const SolverSettings& set = {});

}  // namespace splitlangevin
