"""Infringement dynamics toolkit (C++ core via pybind11)."""

from ._core import (
    Equilibrium,
    IntegratorConfig,
    InvalidInput,
    ModelParams,
    NumericalFailure,
    Regime,
    RegimeKind,
    Trajectory,
    __version__,
    classify_regime,
    closed_form,
    compare_levels,
    cost,
    equilibria,
    first_passage,
    fit,
    integrate,
    integrate_adaptive,
    optimize_schedule,
    optimize_static,
    rhs,
    sensitivity,
    settling_time,
    simulate_stochastic,
    step_rk4,
    synth,
)

__all__ = [
    "Equilibrium",
    "IntegratorConfig",
    "InvalidInput",
    "ModelParams",
    "NumericalFailure",
    "Regime",
    "RegimeKind",
    "Trajectory",
    "__version__",
    "classify_regime",
    "closed_form",
    "compare_levels",
    "cost",
    "equilibria",
    "first_passage",
    "fit",
    "integrate",
    "integrate_adaptive",
    "optimize_schedule",
    "optimize_static",
    "rhs",
    "sensitivity",
    "settling_time",
    "simulate_stochastic",
    "step_rk4",
    "synth",
]
