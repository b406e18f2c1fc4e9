"""Energy-conserving splitting integrators for the stochastic Langevin equation."""

from ._core import (
    PhysParams,
    SolverSettings,
    SplitLangevinError,
    State,
    conservative_step,
    distribution_distance,
    energy_constants,
    energy_H,
    energy_H0,
    energy_residual,
    experiment_names,
    fit_order,
    gibbs_log_density,
    gibbs_moments,
    jacobian_det,
    lyapunov_check,
    ou_substep,
    phase_area,
    run_experiment,
    scheme_step,
    simulate,
    strong_error,
    weak_error,
)

__all__ = [
    "PhysParams",
    "SolverSettings",
    "SplitLangevinError",
    "State",
    "conservative_step",
    "distribution_distance",
    "energy_constants",
    "energy_H",
    "energy_H0",
    "energy_residual",
    "experiment_names",
    "fit_order",
    "gibbs_log_density",
    "gibbs_moments",
    "jacobian_det",
    "lyapunov_check",
    "ou_substep",
    "phase_area",
    "run_experiment",
    "scheme_step",
    "simulate",
    "strong_error",
    "weak_error",
]
