"""Detection-time allocation for single radars and sensor fleets."""

from ._core import (
    CapacityError,
    NoAllocationError,
    ScenarioError,
    allocate,
    calibrate_scale,
    closed_form_allocate,
    detection_probability,
    format_csv,
    format_table,
    optimal_probability,
    plan_fleet,
    run_scenario,
    run_scenario_text,
    solve_gamma_s,
    time_constant,
    union_probability,
)

__all__ = [
    "CapacityError",
    "NoAllocationError",
    "ScenarioError",
    "allocate",
    "calibrate_scale",
    "closed_form_allocate",
    "detection_probability",
    "format_csv",
    "format_table",
    "optimal_probability",
    "plan_fleet",
    "run_scenario",
    "run_scenario_text",
    "solve_gamma_s",
    "time_constant",
    "union_probability",
]
