"""
LP and MILP solvers
"""

from .simplex import (
    FAILURE, INFEASIBLE, OPTIMAL, UNBOUNDED, BoundedSimplex, LpSolution, StandardForm,
    solve_form, solve_lp
)
from .branch_and_bound import TIME_LIMIT, BranchAndBound, MilpSolution, solve_milp

__all__ = [
    'OPTIMAL', 'INFEASIBLE', 'UNBOUNDED', 'FAILURE', 'TIME_LIMIT',
    'LpSolution', 'MilpSolution', 'StandardForm', 'BoundedSimplex', 'BranchAndBound',
    'solve_form', 'solve_lp', 'solve_milp',
]
