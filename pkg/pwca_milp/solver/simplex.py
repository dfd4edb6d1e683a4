"""
Bounded-variable revised simplex for LP relaxations
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from ..config import SolverConfig
from ..exceptions import SolverError
from ..milp.problem import EQ, GE, LE, MAXIMIZE, MilpProblem

OPTIMAL = 'optimal'
INFEASIBLE = 'infeasible'
UNBOUNDED = 'unbounded'
FAILURE = 'failure'

AT_LOWER = 0
AT_UPPER = 1
FREE = 2
BASIC = 3

PIVOT_TOLERANCE = 1e-11
DEGENERATE_STREAK = 50


@dataclass
class LpSolution:
    """Result of an LP solve"""
    status: str
    objective: float = math.nan
    values: Dict[str, float] = field(default_factory=dict)
    iterations: int = 0
    message: str = ''
    x: Optional[np.ndarray] = None

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL

    def __str__(self):
        if self.is_optimal:
            return f"LP optimal: objective={self.objective:.10g} ({self.iterations} iterations)"
        return f"LP {self.status}: {self.message}"


@dataclass
class StandardForm:
    """
    min c . x  s.t.  A x (<=, >=, =) b,  lower <= x <= upper

    `sign` is -1 for maximization problems, whose objective is negated.
    """
    names: List[str]
    c: np.ndarray
    A: sparse.csc_matrix
    relations: List[str]
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    binary: np.ndarray
    sign: float = 1.0

    @classmethod
    def from_problem(cls, problem: MilpProblem) -> 'StandardForm':
        problem.validate()
        names = problem.variable_names
        index = {name: j for j, name in enumerate(names)}
        rows, cols, data = [], [], []
        for i, constraint in enumerate(problem.constraints):
            for name, coef in constraint.coefs.items():
                rows.append(i)
                cols.append(index[name])
                data.append(coef)
        A = sparse.csc_matrix((data, (rows, cols)), shape=(len(problem.constraints), len(names)))

        sign = -1.0 if problem.sense == MAXIMIZE else 1.0
        c = np.zeros(len(names))
        for name, coef in problem.objective.items():
            c[index[name]] = sign * coef
        variables = problem.variables
        return cls(
            names=names,
            c=c,
            A=A,
            relations=[con.relation for con in problem.constraints],
            b=np.array([con.rhs for con in problem.constraints], dtype=float),
            lower=np.array([v.lower for v in variables], dtype=float),
            upper=np.array([v.upper for v in variables], dtype=float),
            binary=np.array([v.binary for v in variables], dtype=bool),
            sign=sign,
        )

    @property
    def shape(self):
        return self.A.shape


class BoundedSimplex:
    """
    Two-phase revised simplex over bounded variables

    Every row gets a slack s = b - A x with bounds [0, inf) for <=,
    (-inf, 0] for >= and [0, 0] for =. Phase 1 starts from an artificial
    basis and minimizes the sum of artificials; phase 2 keeps them at zero.
    The basis inverse is kept explicitly, updated by rank-1 pivots and
    recomputed every `refactor_interval` pivots. Pricing is Dantzig's rule,
    switching to Bland's rule during long degenerate streaks.
    """

    def __init__(self, form: StandardForm, config: Optional[SolverConfig] = None,
                 logger: Optional[logging.Logger] = None):
        self.form = form
        self.config = (config or SolverConfig()).validate()
        self.logger = logger or logging.getLogger(__name__)

    def solve(self, lower: Optional[np.ndarray] = None,
              upper: Optional[np.ndarray] = None) -> LpSolution:
        form = self.form
        lower = form.lower if lower is None else np.asarray(lower, dtype=float)
        upper = form.upper if upper is None else np.asarray(upper, dtype=float)
        if np.any(lower > upper):
            return LpSolution(INFEASIBLE, message="Variable bounds cross")

        m, n = form.shape
        if m == 0:
            return self._solve_bounds_only(lower, upper)
        slack_lower = np.array([0.0 if r == LE else (-np.inf if r == GE else 0.0)
                                for r in form.relations])
        slack_upper = np.array([np.inf if r == LE else 0.0 for r in form.relations])
        self.lower = np.concatenate([lower, slack_lower, np.zeros(m)])
        self.upper = np.concatenate([upper, slack_upper, np.full(m, np.inf)])

        x = np.zeros(n + m)
        status = np.full(n + m, FREE)
        finite_lower = np.isfinite(self.lower[:n + m])
        finite_upper = np.isfinite(self.upper[:n + m])
        x[finite_lower] = self.lower[:n + m][finite_lower]
        status[finite_lower] = AT_LOWER
        only_upper = ~finite_lower & finite_upper
        x[only_upper] = self.upper[:n + m][only_upper]
        status[only_upper] = AT_UPPER

        structural = sparse.hstack([form.A, sparse.identity(m, format='csc')], format='csc')
        residual = form.b - structural @ x
        signs = np.where(residual < 0, -1.0, 1.0)
        self.A = sparse.hstack([structural, sparse.diags(signs, format='csc')], format='csc')
        self.b = form.b
        self.x = np.concatenate([x, np.abs(residual)])
        self.status = np.concatenate([status, np.full(m, BASIC)])
        self.basis = np.arange(n + m, n + 2 * m)
        self.Binv = np.diag(signs)
        self.n_real = n + m
        self.iterations = 0

        phase1_cost = np.concatenate([np.zeros(n + m), np.ones(m)])
        outcome = self._iterate(phase1_cost)
        if outcome != OPTIMAL:
            return LpSolution(FAILURE, iterations=self.iterations,
                              message=f"Phase 1 ended with status {outcome}")
        infeasibility = float(np.sum(self.x[n + m:]))
        scale = max(1.0, float(np.max(np.abs(self.b)))) if m else 1.0
        if infeasibility > 1e2 * max(self.config.feasibility_tolerance, 1e-9) * scale:
            return LpSolution(INFEASIBLE, iterations=self.iterations,
                              message=f"Phase 1 infeasibility {infeasibility:.3g}")

        self.upper[n + m:] = 0.0
        self.x[n + m:] = np.where(self.status[n + m:] == BASIC, self.x[n + m:], 0.0)
        phase2_cost = np.concatenate([form.c, np.zeros(2 * m)])
        outcome = self._iterate(phase2_cost)
        if outcome == UNBOUNDED:
            return LpSolution(UNBOUNDED, iterations=self.iterations,
                              message="Objective is unbounded")
        if outcome != OPTIMAL:
            return LpSolution(FAILURE, iterations=self.iterations, message=outcome)

        values = np.clip(self.x[:n], lower, upper)
        objective = form.sign * float(form.c @ values)
        return LpSolution(
            OPTIMAL, objective, dict(zip(form.names, values.tolist())),
            self.iterations, x=values,
        )

    def _solve_bounds_only(self, lower: np.ndarray, upper: np.ndarray) -> LpSolution:
        c = self.form.c
        values = np.where(c > 0, lower, np.where(c < 0, upper, np.clip(0.0, lower, upper)))
        if not np.all(np.isfinite(values)):
            return LpSolution(UNBOUNDED, message="Objective is unbounded")
        objective = self.form.sign * float(c @ values)
        return LpSolution(OPTIMAL, objective, dict(zip(self.form.names, values.tolist())), x=values)

    def _refactor(self):
        B = self.A[:, self.basis].toarray()
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            raise SolverError("Basis matrix became singular")
        nonbasic = np.ones(self.x.size, dtype=bool)
        nonbasic[self.basis] = False
        columns = np.flatnonzero(nonbasic)
        rhs = self.b - self.A[:, columns] @ self.x[columns]
        self.x[self.basis] = self.Binv @ rhs

    def _iterate(self, cost: np.ndarray) -> str:
        config = self.config
        opt_tol = config.optimality_tolerance
        since_refactor = 0
        degenerate = 0
        bland = False

        while True:
            if self.iterations >= config.max_lp_iterations:
                return "iteration limit reached"
            if since_refactor >= config.refactor_interval:
                try:
                    self._refactor()
                except SolverError as e:
                    return str(e)
                since_refactor = 0

            y = cost[self.basis] @ self.Binv
            reduced = cost - self.A.T @ y
            movable = self.upper > self.lower
            can_increase = ((self.status == AT_LOWER) | (self.status == FREE)) & movable
            can_decrease = ((self.status == AT_UPPER) | (self.status == FREE)) & movable
            score = np.where(can_increase & (reduced < -opt_tol), -reduced, 0.0)
            score = np.maximum(score, np.where(can_decrease & (reduced > opt_tol), reduced, 0.0))
            candidates = np.flatnonzero(score > 0)
            if candidates.size == 0:
                return OPTIMAL
            entering = int(candidates[0]) if bland else int(np.argmax(score))
            direction = 1.0 if (can_increase[entering] and reduced[entering] < 0) else -1.0

            column = self.A[:, entering].toarray().reshape(-1)
            alpha = self.Binv @ column
            delta = direction * alpha
            x_basic = self.x[self.basis]
            lower_b = self.lower[self.basis]
            upper_b = self.upper[self.basis]

            limits = np.full(delta.size, np.inf)
            down = (delta > PIVOT_TOLERANCE) & np.isfinite(lower_b)
            up = (delta < -PIVOT_TOLERANCE) & np.isfinite(upper_b)
            limits[down] = (x_basic[down] - lower_b[down]) / delta[down]
            limits[up] = (upper_b[up] - x_basic[up]) / -delta[up]
            limits = np.maximum(limits, 0.0)

            theta = float(limits.min()) if limits.size else np.inf
            flip = self.upper[entering] - self.lower[entering]
            if not np.isfinite(theta) and not np.isfinite(flip):
                return UNBOUNDED

            self.iterations += 1
            if flip <= theta:
                self.x[self.basis] = x_basic - flip * delta
                if direction > 0:
                    self.x[entering] = self.upper[entering]
                    self.status[entering] = AT_UPPER
                else:
                    self.x[entering] = self.lower[entering]
                    self.status[entering] = AT_LOWER
                degenerate, bland = 0, False
                continue

            ties = np.flatnonzero(limits <= theta + PIVOT_TOLERANCE)
            if bland:
                row = int(ties[np.argmin(self.basis[ties])])
            else:
                row = int(ties[np.argmax(np.abs(delta[ties]))])

            leaving = int(self.basis[row])
            self.x[self.basis] = x_basic - theta * delta
            self.x[entering] = self.x[entering] + direction * theta
            if delta[row] > 0:
                self.x[leaving] = self.lower[leaving]
                self.status[leaving] = AT_LOWER
            else:
                self.x[leaving] = self.upper[leaving]
                self.status[leaving] = AT_UPPER

            pivot = alpha[row]
            pivot_row = self.Binv[row] / pivot
            self.Binv -= np.outer(alpha, pivot_row)
            self.Binv[row] = pivot_row
            self.basis[row] = entering
            self.status[entering] = BASIC
            since_refactor += 1

            if theta <= config.feasibility_tolerance:
                degenerate += 1
                if degenerate > DEGENERATE_STREAK and not bland:
                    self.logger.debug("Degenerate streak, switching to Bland's rule")
                    bland = True
            else:
                degenerate, bland = 0, False


def _solve_highs(form: StandardForm, lower: np.ndarray, upper: np.ndarray) -> LpSolution:
    relations = np.array(form.relations)
    A = form.A.tocsr()
    le, ge, eq = relations == LE, relations == GE, relations == EQ
    A_ub = sparse.vstack([A[le], -A[ge]], format='csr')
    b_ub = np.concatenate([form.b[le], -form.b[ge]])
    bounds = [(None if not np.isfinite(lo) else lo, None if not np.isfinite(hi) else hi)
              for lo, hi in zip(lower, upper)]
    result = linprog(
        form.c,
        A_ub=A_ub if A_ub.shape[0] else None, b_ub=b_ub if b_ub.size else None,
        A_eq=A[eq] if eq.any() else None, b_eq=form.b[eq] if eq.any() else None,
        bounds=bounds, method='highs',
    )
    if result.status == 0:
        values = np.clip(result.x, lower, upper)
        return LpSolution(OPTIMAL, form.sign * float(form.c @ values),
                          dict(zip(form.names, values.tolist())),
                          int(getattr(result, 'nit', 0)), x=values)
    status = {2: INFEASIBLE, 3: UNBOUNDED}.get(result.status, FAILURE)
    return LpSolution(status, message=str(result.message))


def solve_form(form: StandardForm, config: Optional[SolverConfig] = None,
               lower: Optional[np.ndarray] = None, upper: Optional[np.ndarray] = None,
               logger: Optional[logging.Logger] = None) -> LpSolution:
    """Solve the relaxation of `form` with optional bound overrides"""
    config = (config or SolverConfig()).validate()
    lower = form.lower if lower is None else lower
    upper = form.upper if upper is None else upper
    if config.lp_backend == 'highs':
        if np.any(lower > upper):
            return LpSolution(INFEASIBLE, message="Variable bounds cross")
        return _solve_highs(form, lower, upper)
    try:
        return BoundedSimplex(form, config, logger).solve(lower, upper)
    except SolverError as e:
        return LpSolution(FAILURE, message=str(e))


def solve_lp(problem: MilpProblem, config: Optional[SolverConfig] = None,
             logger: Optional[logging.Logger] = None) -> LpSolution:
    """
    Solve the LP relaxation of a problem (binaries relaxed to [0, 1])

    Returns:
        LpSolution with status optimal, infeasible, unbounded or failure
    """
    return solve_form(StandardForm.from_problem(problem), config, logger=logger)
