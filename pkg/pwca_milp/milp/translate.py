"""
Constraint blocks for convex and piecewise-convex models

For a minimization over y (maximization with sigma = -1) the blocks are:

piecewise-convex, pure (convex+min, concave+max), one toggle t:
    a_ifc . p <= M_t+ t                 (t = 0 on the lower side)
    a_ifc . p >= M_t- (1 - t)
    sigma a-_i . p >= M-_i t            lower planes
    sigma a+_i . p >= M+_i (1 - t)      upper planes

piecewise-convex with selection (concave+min, convex+max): the toggle plus
one binary b_i per plane pair with sum(b) = 1; plane i of the active side is
enforced only when b_i = 1.

convex: sigma a_i . p >= 0 for every plane, or with selection binaries
sigma a_i . p >= M_i (1 - b_i) and sum(b) = 1.
"""
import logging
from typing import Dict, List, Optional

import numpy as np

from ..config import SolverConfig
from ..core.convex_fit import ConvexModel
from ..core.dataset import Box
from ..core.geometry import Hyperplane
from ..core.pwca import PwcaModel
from ..exceptions import TranslationError
from .big_m import BigMSet, big_m_values, convex_big_m, sense_sign, uses_selection
from .problem import (
    EQ, GE, LE, MINIMIZE, Constraint, ConstraintBlock, VarNames, Variable, block_variables
)

logger = logging.getLogger(__name__)


def _names_for(names: Optional[VarNames], dimension: int) -> VarNames:
    names = names or VarNames.default(dimension - 1)
    if len(names.inputs) != dimension - 1:
        raise TranslationError(
            f"Model has {dimension - 1} inputs but {len(names.inputs)} input names were given"
        )
    return names


def plane_terms(plane: Hyperplane, names: VarNames, sigma: float = 1.0) -> Dict[str, float]:
    """sigma * a . [x, y] without the constant, keyed by variable name"""
    coefs = sigma * plane.coefs
    return {v: float(c) for v, c in zip(names.model_variables, coefs[1:]) if c != 0.0}


def _with(terms: Dict[str, float], name: str, coef: float) -> Dict[str, float]:
    result = dict(terms)
    if coef != 0.0:
        result[name] = result.get(name, 0.0) + float(coef)
    return result


def translate_pwca(model: PwcaModel, box: Box, names: Optional[VarNames] = None,
                   sense: str = MINIMIZE, big_m: Optional[BigMSet] = None,
                   config: Optional[SolverConfig] = None) -> ConstraintBlock:
    """
    Block representing y >= (<=) PwCA(x) inside a minimization (maximization)

    Pure blocks hold one binary and N_hyp + 2 rows; selection blocks add
    N_hyp / 2 binaries and a selection row.

    Args:
        model: Fitted model
        box: Bounds of (x_1, ..., x_{n-1}, y)
        names: Variable names (x1.., y by default)
        sense: 'min' or 'max' of the surrounding problem
        big_m: Precomputed constants (computed from the box if None)
    """
    names = _names_for(names, model.dimension)
    if not model.is_vertical:
        logger.warning(f"{model} has an interface that depends on y; the block may pick "
                       f"the other side where predict() finds both or neither consistent")
    sigma = sense_sign(sense)
    big_m = big_m or big_m_values(model, box, sense, config)
    t = names.aux('t')

    variables = block_variables(names, box.lower, box.upper) + [Variable(t, binary=True)]
    a_ifc = model.interface
    ifc = plane_terms(a_ifc, names)
    constraints = [
        Constraint(names.aux('ifc_up'), _with(ifc, t, -big_m.m_t_plus), LE, -a_ifc.offset),
        Constraint(names.aux('ifc_lo'), _with(ifc, t, big_m.m_t_minus), GE,
                   big_m.m_t_minus - a_ifc.offset),
    ]

    if not big_m.selection:
        for i, (plane, m) in enumerate(zip(model.lower, big_m.m_i_minus), start=1):
            constraints.append(Constraint(
                names.aux(f'lo{i}'), _with(plane_terms(plane, names, sigma), t, -m), GE,
                -sigma * plane.offset,
            ))
        for i, (plane, m) in enumerate(zip(model.upper, big_m.m_i_plus), start=1):
            constraints.append(Constraint(
                names.aux(f'up{i}'), _with(plane_terms(plane, names, sigma), t, m), GE,
                m - sigma * plane.offset,
            ))
        return ConstraintBlock(names, variables, constraints, kind='pwca')

    selectors = [names.aux(f'b{i}') for i in range(1, model.n_pairs + 1)]
    variables += [Variable(b, binary=True) for b in selectors]
    for i, (plane, m, b) in enumerate(zip(model.lower, big_m.m_i_minus, selectors), start=1):
        # sigma a . p >= M (1 + t - b)
        terms = _with(_with(plane_terms(plane, names, sigma), t, -m), b, m)
        constraints.append(Constraint(names.aux(f'lo{i}'), terms, GE, m - sigma * plane.offset))
    for i, (plane, m, b) in enumerate(zip(model.upper, big_m.m_i_plus, selectors), start=1):
        # sigma a . p >= M (2 - t - b)
        terms = _with(_with(plane_terms(plane, names, sigma), t, m), b, m)
        constraints.append(Constraint(names.aux(f'up{i}'), terms, GE,
                                      2 * m - sigma * plane.offset))
    constraints.append(Constraint(names.aux('select'), {b: 1.0 for b in selectors}, EQ, 1.0))
    return ConstraintBlock(names, variables, constraints, kind='pwca-selection')


def translate_convex(model: ConvexModel, sense: str, box: Box,
                     names: Optional[VarNames] = None) -> ConstraintBlock:
    """
    Block representing y >= (<=) the convex (concave) model

    Convex+min and concave+max need no auxiliary variables and one row per
    plane; the other combinations add one binary per plane and a selection row.
    """
    names = _names_for(names, model.dimension)
    sigma = sense_sign(sense)
    variables = block_variables(names, box.lower, box.upper)
    constraints: List[Constraint] = []

    if not uses_selection(model.orientation, sense):
        for i, plane in enumerate(model.planes, start=1):
            constraints.append(Constraint(names.aux(f'pl{i}'), plane_terms(plane, names, sigma),
                                          GE, -sigma * plane.offset))
        return ConstraintBlock(names, variables, constraints, kind='convex')

    m_values = convex_big_m(model, box, sense)
    selectors = [names.aux(f'b{i}') for i in range(1, model.n_hyp + 1)]
    variables += [Variable(b, binary=True) for b in selectors]
    for i, (plane, m, b) in enumerate(zip(model.planes, m_values, selectors), start=1):
        terms = _with(plane_terms(plane, names, sigma), b, m)
        constraints.append(Constraint(names.aux(f'pl{i}'), terms, GE, m - sigma * plane.offset))
    constraints.append(Constraint(names.aux('select'), {b: 1.0 for b in selectors}, EQ, 1.0))
    return ConstraintBlock(names, variables, constraints, kind='convex-selection')


def region_toggle(model: PwcaModel, x: np.ndarray) -> float:
    """Toggle value (0 lower, 1 upper) the model's resolution rule picks at x"""
    _, upper = model.predict_with_side(np.atleast_2d(x))
    return float(upper[0])
