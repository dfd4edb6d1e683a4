"""
Big-M constants for piecewise-convex and convex translations

Rows are written for p = [1, x_1, ..., x_{n-1}, y]. For a minimization a
plane contributes a . p >= 0 (y above the plane), for a maximization
-a . p >= 0, so each M bounds sigma * a . p from below with sigma = +1 (min)
or -1 (max).
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ..config import SolverConfig
from ..core.convex_fit import CONVEX, ConvexModel
from ..core.dataset import Box, Dataset, grid_points
from ..core.geometry import Hyperplane
from ..core.pwca import PwcaModel
from ..core.triangulation import Triangulation
from ..exceptions import TranslationError, UnboundedBigMError
from .problem import GE, LE, MINIMIZE, Constraint, MilpProblem, Variable, check_sense

Y_MARGIN = 0.05
SAMPLE_GRID = 21

logger = logging.getLogger(__name__)


def sense_sign(sense: str) -> float:
    return 1.0 if check_sense(sense) == MINIMIZE else -1.0


def uses_selection(orientation: str, sense: str) -> bool:
    """True when the rows need per-plane selection binaries"""
    return (orientation == CONVEX) != (check_sense(sense) == MINIMIZE)


@dataclass
class BigMSet:
    """
    m_t_plus / m_t_minus bound the interface expression over the box.
    m_i_minus / m_i_plus bound sigma * a . p of the lower / upper planes
    over the opposite region (over the whole box for selection rows).
    """
    m_t_plus: float
    m_t_minus: float
    m_i_minus: np.ndarray
    m_i_plus: np.ndarray
    selection: bool = False

    def __post_init__(self):
        self.m_i_minus = np.asarray(self.m_i_minus, dtype=float)
        self.m_i_plus = np.asarray(self.m_i_plus, dtype=float)
        if self.m_t_plus < 0 or self.m_t_minus > 0:
            raise TranslationError("Interface big-M values must satisfy M_t+ >= 0 >= M_t-")
        if np.any(self.m_i_minus > 0) or np.any(self.m_i_plus > 0):
            raise TranslationError("Plane big-M values must be <= 0")


def _check_box(box: Box, dimension: int):
    if box.dimension != dimension:
        raise TranslationError(
            f"Box has {box.dimension} coordinates, the model needs {dimension} (inputs and y)"
        )
    if not box.is_finite:
        raise UnboundedBigMError(f"Big-M values need a finite box, got {box}")


def box_extremes(plane: Hyperplane, box: Box):
    """(min, max) of [1, p] . a over the box, attained at corners"""
    a = plane.coefs
    low = a[1:] * box.lower
    high = a[1:] * box.upper
    return float(a[0] + np.minimum(low, high).sum()), float(a[0] + np.maximum(low, high).sum())


def region_minimum(coefs: np.ndarray, box: Box, interface: Hyperplane, upper_side: bool,
                   config: Optional[SolverConfig] = None) -> float:
    """
    Minimum of [1, p] . coefs over the box intersected with one side of the interface

    Returns 0 when that side does not meet the box, and never more than 0.
    """
    names = [f"p{j}" for j in range(1, box.dimension + 1)]
    problem = MilpProblem(name='big_m')
    for name, lo, hi in zip(names, box.lower, box.upper):
        problem.add_variable(Variable(name, float(lo), float(hi)))
    side = dict(zip(names, interface.coefs[1:]))
    relation = GE if upper_side else LE
    problem.add_constraint(Constraint('side', side, relation, -interface.coefs[0]))
    problem.set_objective(dict(zip(names, coefs[1:])), MINIMIZE)

    # deferred import, the solver package imports milp.problem
    from ..solver.simplex import INFEASIBLE, solve_lp

    solution = solve_lp(problem, config)
    if solution.status == INFEASIBLE:
        return 0.0
    if not solution.is_optimal:
        raise TranslationError(f"Big-M LP ended with status {solution.status}: {solution.message}")
    return min(float(coefs[0]) + solution.objective, 0.0)


def big_m_values(model: PwcaModel, box: Box, sense: str = MINIMIZE,
                 config: Optional[SolverConfig] = None) -> BigMSet:
    """
    Big-M constants of a piecewise-convex model over an (x, y) box

    Raises:
        UnboundedBigMError: If a box bound is infinite
    """
    _check_box(box, model.dimension)
    sigma = sense_sign(sense)
    m_t_minus, m_t_plus = box_extremes(model.interface, box)
    m_t_minus, m_t_plus = min(m_t_minus, 0.0), max(m_t_plus, 0.0)

    selection = uses_selection(model.orientation, sense)
    if selection:
        m_minus = [min(box_extremes(Hyperplane(sigma * p.coefs), box)[0], 0.0) for p in model.lower]
        m_plus = [min(box_extremes(Hyperplane(sigma * p.coefs), box)[0], 0.0) for p in model.upper]
    else:
        m_minus = [region_minimum(sigma * p.coefs, box, model.interface, True, config)
                   for p in model.lower]
        m_plus = [region_minimum(sigma * p.coefs, box, model.interface, False, config)
                  for p in model.upper]
    result = BigMSet(m_t_plus, m_t_minus, np.array(m_minus), np.array(m_plus), selection)
    logger.debug(f"Big-M: M_t=({m_t_minus:.6g}, {m_t_plus:.6g}), "
                 f"M_i-={result.m_i_minus}, M_i+={result.m_i_plus}")
    return result


def convex_big_m(model: ConvexModel, box: Box, sense: str = MINIMIZE) -> np.ndarray:
    """Per-plane lower bounds of sigma * a . p over the box (<= 0)"""
    _check_box(box, model.dimension)
    sigma = sense_sign(sense)
    return np.array([min(box_extremes(Hyperplane(sigma * p.coefs), box)[0], 0.0)
                     for p in model.planes])


def translation_box(model: Union[ConvexModel, PwcaModel, Triangulation],
                    x_box: Box, y_values: Optional[Sequence[float]] = None,
                    margin: float = Y_MARGIN) -> Box:
    """
    (x, y) box used for the model variables of a translation

    The y range covers `y_values` (typically the dataset outputs) and the
    model estimates on a sample grid of the x box, widened by `margin` times
    the range on each side.
    """
    if isinstance(model, Triangulation):
        if model.values is None:
            raise TranslationError("Triangulation has no vertex values")
        estimates = np.asarray(model.values)
    else:
        samples = np.vstack([x_box.corners(), grid_points(x_box, SAMPLE_GRID)])
        estimates = model.predict(samples)
    values = estimates if y_values is None else np.concatenate(
        [estimates, np.asarray(y_values, dtype=float).reshape(-1)]
    )
    y_lo, y_hi = float(np.min(values)), float(np.max(values))
    pad = margin * max(y_hi - y_lo, 1e-9)
    return x_box.product(Box(np.array([y_lo - pad]), np.array([y_hi + pad])))


def dataset_translation_box(model, data: Dataset, margin: float = Y_MARGIN) -> Box:
    return translation_box(model, data.x_box, data.y, margin)
