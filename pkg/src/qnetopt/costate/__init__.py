"""Costate equations and their solvers."""

from qnetopt.costate.models import CostateTrajectory, CostSpec, IhSolution
from qnetopt.costate.solver import (
    costate_rhs,
    solve_costate_fh,
    solve_costate_ih,
    switching_values,
    value_at,
)

__all__ = [
    "CostSpec",
    "CostateTrajectory",
    "IhSolution",
    "costate_rhs",
    "solve_costate_fh",
    "solve_costate_ih",
    "switching_values",
    "value_at",
]
