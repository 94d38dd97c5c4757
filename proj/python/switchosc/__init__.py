"""Switched-frequency oscillator: discontinuous and regularized dynamics."""

from ._core import (
    CapturedError,
    NoRootError,
    SolverError,
    branches,
    composite_map,
    exit_scaling_fit,
    find_nonsliding_period4,
    find_regularized_nonsliding_linear,
    find_sliding_period4_linear,
    find_sliding_period4_nonlinear,
    fold_point,
    forcing,
    measure_exit_point,
    next_crossing,
    regularized_poincare_linear,
    run_scenario,
    simulate,
    simulate_csv,
    solve_x0,
    svg_from_csv,
)

__version__ = "0.1.0"

__all__ = [
    "CapturedError",
    "NoRootError",
    "SolverError",
    "branches",
    "composite_map",
    "exit_scaling_fit",
    "find_nonsliding_period4",
    "find_regularized_nonsliding_linear",
    "find_sliding_period4_linear",
    "find_sliding_period4_nonlinear",
    "fold_point",
    "forcing",
    "measure_exit_point",
    "next_crossing",
    "regularized_poincare_linear",
    "run_scenario",
    "simulate",
    "simulate_csv",
    "solve_x0",
    "svg_from_csv",
]
