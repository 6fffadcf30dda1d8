"""Stoichiometric-window solving on a fixed schedule."""

from .newton import central_jacobian, damped_newton
from .solver import (
    SolverSchedule,
    WindowSolution,
    WindowSolveInput,
    solve_windows,
    window_residuals,
)

__all__ = [
    "central_jacobian",
    "damped_newton",
    "SolverSchedule",
    "WindowSolution",
    "WindowSolveInput",
    "solve_windows",
    "window_residuals",
]
