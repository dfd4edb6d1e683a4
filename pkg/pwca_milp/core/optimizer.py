"""
Derivative-free minimization used by both fitters
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize as scipy_minimize

from ..config import OptimizerOptions
from ..exceptions import InvalidStartError

Objective = Callable[[np.ndarray], float]


@dataclass
class OptimizeOutcome:
    """Result of a minimize() call"""
    x: np.ndarray
    fun: float
    converged: bool
    evaluations: int = 0
    iterations: int = 0
    restarts_used: int = 0

    def __iter__(self):
        # unpacks as (x_best, f_best, converged)
        return iter((self.x, self.fun, self.converged))

    def __str__(self):
        state = "converged" if self.converged else "stopped at iteration limit"
        return (f"Minimization {state}: f={self.fun:.6g} "
                f"({self.iterations} iterations, {self.evaluations} evaluations)")


def initial_simplex(x0: np.ndarray, step: float) -> np.ndarray:
    """Simplex around x0: each vertex moves one coordinate by step * |x_i| (step if x_i = 0)"""
    x0 = np.asarray(x0, dtype=float)
    simplex = np.tile(x0, (x0.size + 1, 1))
    for i, value in enumerate(x0):
        simplex[i + 1, i] = value + (step * value if value != 0.0 else step)
    return simplex


def minimize(objective: Objective, x0: np.ndarray,
             options: Optional[OptimizerOptions] = None,
             logger: Optional[logging.Logger] = None) -> OptimizeOutcome:
    """
    Minimize `objective` with adaptive Nelder-Mead plus restarts

    Non-finite objective values met during the search count as +inf.

    Args:
        objective: Function of a 1-D parameter vector
        x0: Starting point
        options: Search options (defaults if None)
        logger: Optional logger

    Returns:
        OptimizeOutcome with x_best, f_best and the convergence flag

    Raises:
        InvalidStartError: If the objective is not finite at x0
    """
    options = (options or OptimizerOptions()).validate()
    logger = logger or logging.getLogger(__name__)
    x0 = np.array(x0, dtype=float).reshape(-1)

    evaluations = 0

    def guarded(x: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        try:
            value = float(objective(x))
        except (ArithmeticError, ValueError):
            return np.inf
        return value if np.isfinite(value) else np.inf

    f0 = guarded(x0)
    if not np.isfinite(f0):
        raise InvalidStartError("Objective is not finite at the starting point")
    if x0.size == 0:
        return OptimizeOutcome(x0, f0, True, evaluations)

    budget = options.iterations_for(x0.size)
    best_x, best_f = x0.copy(), f0
    converged = False
    iterations = 0
    rng = np.random.default_rng(options.seed) if options.seed is not None else None

    for attempt in range(options.restarts):
        start = best_x.copy()
        if attempt > 0 and rng is not None:
            start = start + rng.normal(scale=options.initial_step, size=start.size) * \
                np.maximum(np.abs(start), 1.0)
        result = scipy_minimize(
            guarded, start, method='Nelder-Mead',
            options={
                'adaptive': True,
                'initial_simplex': initial_simplex(start, options.initial_step),
                'xatol': options.x_tolerance,
                'fatol': options.f_tolerance,
                'maxiter': budget,
                'maxfev': 2 * budget + x0.size + 1,
            },
        )
        iterations += int(result.nit)
        gain = best_f - float(result.fun)
        if gain > 0:
            best_x, best_f = np.array(result.x, dtype=float), float(result.fun)
        converged = bool(result.success)
        logger.debug(f"Nelder-Mead pass {attempt + 1}/{options.restarts}: "
                     f"f={result.fun:.6g}, nit={result.nit}, success={result.success}")
        if attempt > 0 and gain <= options.f_tolerance:
            break

    return OptimizeOutcome(best_x, best_f, converged, evaluations, iterations, attempt)
