"""Winch-aware trajectory planning for a tethered end droid."""

from ._core import (
    CableProperties,
    CatenarySolution,
    PlanReport,
    Scenario,
    TetherplanError,
    cable_bounds,
    max_length,
    min_length,
    parameter_names,
    plan,
    run_checks,
    simulate_pickup,
    simulate_retrieval,
    solve_catenary,
    sweep,
)

__all__ = [
    "CableProperties",
    "CatenarySolution",
    "PlanReport",
    "Scenario",
    "TetherplanError",
    "cable_bounds",
    "max_length",
    "min_length",
    "parameter_names",
    "plan",
    "run_checks",
    "simulate_pickup",
    "simulate_retrieval",
    "solve_catenary",
    "sweep",
]
