"""
MILP formulations of a triangulated piecewise-linear function

CC  (convex combination): lambda per vertex, one binary per simplex,
    lambda_v <= sum of the binaries of the simplices containing v
    (omitted for a vertex that lies in every simplex).
MC  (multiple choice): one copy of x and one binary per simplex, each copy
    kept inside its simplex scaled by the binary.
Log (logarithmic convex combination): lambda per vertex, a Gray-coded
    SOS2 branching per grid axis and, in 2-D, one binary choosing the
    triangle inside a cell of a J1 grid.

With V vertices, S simplices, d inputs and a grid of k_1 x ... cells:

    formulation  binaries                        continuous  rows
    CC           S                               V           d + 3 + V - (vertices in all simplices)
    MC           S                               S * d       d + 2 + S * (d + 1)
    Log (2-D)    ceil(log2 k1) + ceil(log2 k2) + 1  V        d + 2 + 2 * binaries
    Log (1-D)    ceil(log2 k)                    V           d + 2 + 2 * binaries

The 2 x 2 J1 grid (9 vertices, 8 triangles) gives CC 8/9/13, MC 8/16/28 and
Log 3/9/10.
"""
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.dataset import Box
from ..core.triangulation import J1, Triangulation
from ..exceptions import FormulationError, TranslationError
from .big_m import sense_sign
from .problem import (
    EQ, GE, LE, MINIMIZE, Constraint, ConstraintBlock, VarNames, Variable, block_variables
)

CC = 'CC'
MC = 'MC'
LOG = 'Log'
FORMULATIONS = (CC, MC, LOG)


def check_formulation(formulation: str) -> str:
    for known in FORMULATIONS:
        if formulation.lower() == known.lower():
            return known
    raise FormulationError(f"Unknown formulation {formulation!r}, expected one of {FORMULATIONS}")


def gray_code(index: int, bits: int) -> Tuple[int, ...]:
    """Reflected binary code of `index`, most significant bit first"""
    code = index ^ (index >> 1)
    return tuple((code >> (bits - 1 - b)) & 1 for b in range(bits))


def sos2_branching_sets(segments: int) -> List[Tuple[List[int], List[int]]]:
    """
    (ones, zeros) node sets per Gray-code bit for an SOS2 over `segments` + 1 nodes

    A node is in `ones` (`zeros`) when every segment touching it has the bit
    set (cleared).
    """
    bits = math.ceil(math.log2(segments)) if segments > 1 else 0
    codes = [gray_code(s, bits) for s in range(segments)]
    result = []
    for b in range(bits):
        ones, zeros = [], []
        for node in range(segments + 1):
            touching = [codes[s][b] for s in (node - 1, node) if 0 <= s < segments]
            if all(c == 1 for c in touching):
                ones.append(node)
            elif all(c == 0 for c in touching):
                zeros.append(node)
        result.append((ones, zeros))
    return result


def _model_box(tri: Triangulation, y_bounds: Optional[Tuple[float, float]]) -> Box:
    if y_bounds is None:
        values = tri.values
        span = max(float(values.max() - values.min()), 1e-9)
        y_bounds = (float(values.min()) - 0.05 * span, float(values.max()) + 0.05 * span)
    return tri.box.product(Box(np.array([y_bounds[0]]), np.array([y_bounds[1]])))


def _lambda_rows(tri: Triangulation, names: VarNames, lambdas: Sequence[str],
                 sigma: float) -> List[Constraint]:
    """Convexity, input and output rows of the lambda formulations"""
    rows = [Constraint(names.aux('convexity'), {lam: 1.0 for lam in lambdas}, EQ, 1.0)]
    for j, x in enumerate(names.inputs):
        terms = {x: 1.0}
        terms.update({lam: -float(v) for lam, v in zip(lambdas, tri.vertices[:, j]) if v != 0.0})
        rows.append(Constraint(names.aux(f'input{j + 1}'), terms, EQ, 0.0))
    terms = {names.output: sigma}
    terms.update({lam: -sigma * float(f) for lam, f in zip(lambdas, tri.values) if f != 0.0})
    rows.append(Constraint(names.aux('output'), terms, GE, 0.0))
    return rows


def _convex_combination(tri: Triangulation, names: VarNames, sigma: float):
    lambdas = [names.aux(f'lam{v + 1}') for v in range(tri.n_vertices)]
    selectors = [names.aux(f'z{s + 1}') for s in range(tri.n_simplices)]
    variables = [Variable(lam, 0.0, 1.0) for lam in lambdas]
    variables += [Variable(z, binary=True) for z in selectors]
    rows = _lambda_rows(tri, names, lambdas, sigma)
    rows.append(Constraint(names.aux('select'), {z: 1.0 for z in selectors}, EQ, 1.0))

    containing: Dict[int, List[int]] = {v: [] for v in range(tri.n_vertices)}
    for s, simplex in enumerate(tri.simplices):
        for v in simplex:
            containing[int(v)].append(s)
    for v, simplices in containing.items():
        if len(simplices) == tri.n_simplices:
            continue
        terms = {lambdas[v]: 1.0}
        terms.update({selectors[s]: -1.0 for s in simplices})
        rows.append(Constraint(names.aux(f'link{v + 1}'), terms, LE, 0.0))
    return variables, rows


def _multiple_choice(tri: Triangulation, names: VarNames, sigma: float):
    d = tri.dimension
    maps = tri.barycentric_maps
    selectors = [names.aux(f'z{s + 1}') for s in range(tri.n_simplices)]
    copies = [[names.aux(f'u{j + 1}_{s + 1}') for j in range(d)] for s in range(tri.n_simplices)]

    variables = []
    for s in range(tri.n_simplices):
        for j in range(d):
            lo = min(float(tri.box.lower[j]), 0.0)
            hi = max(float(tri.box.upper[j]), 0.0)
            variables.append(Variable(copies[s][j], lo, hi))
    variables += [Variable(z, binary=True) for z in selectors]

    rows = [Constraint(names.aux('select'), {z: 1.0 for z in selectors}, EQ, 1.0)]
    for j, x in enumerate(names.inputs):
        terms = {x: 1.0}
        terms.update({copies[s][j]: -1.0 for s in range(tri.n_simplices)})
        rows.append(Constraint(names.aux(f'input{j + 1}'), terms, EQ, 0.0))

    # f on simplex s: values[simplex] @ maps[s] @ [x, 1]
    output = {names.output: sigma}
    for s, simplex in enumerate(tri.simplices):
        affine = tri.values[simplex] @ maps[s]
        for j in range(d):
            if affine[j] != 0.0:
                output[copies[s][j]] = -sigma * float(affine[j])
        if affine[d] != 0.0:
            output[selectors[s]] = -sigma * float(affine[d])
    rows.append(Constraint(names.aux('output'), output, GE, 0.0))

    for s in range(tri.n_simplices):
        for k in range(d + 1):
            terms = {copies[s][j]: float(maps[s][k, j]) for j in range(d) if maps[s][k, j] != 0.0}
            terms[selectors[s]] = float(maps[s][k, d])
            rows.append(Constraint(names.aux(f'cell{s + 1}_{k + 1}'), terms, GE, 0.0))
    return variables, rows


def _logarithmic(tri: Triangulation, names: VarNames, sigma: float):
    d = tri.dimension
    if d == 2 and tri.scheme != J1:
        raise FormulationError(
            f"The Log formulation needs a J1 grid triangulation, got scheme {tri.scheme!r}"
        )
    if d > 2:
        raise FormulationError("The Log formulation supports 1 or 2 inputs")
    if tri.n_vertices != int(np.prod(np.array(tri.segments) + 1)):
        raise FormulationError("The Log formulation needs a plain grid without extra vertices")

    lambdas = [names.aux(f'lam{v + 1}') for v in range(tri.n_vertices)]
    variables = [Variable(lam, 0.0, 1.0) for lam in lambdas]
    rows = _lambda_rows(tri, names, lambdas, sigma)
    grid = [tri.grid_index(v) for v in range(tri.n_vertices)]

    def add_pair(label: str, ones: List[Tuple[int, ...]], zeros: List[Tuple[int, ...]]):
        w = names.aux(label)
        variables.append(Variable(w, binary=True))
        one_terms = {lam: 1.0 for lam, node in zip(lambdas, grid) if node in ones}
        zero_terms = {lam: 1.0 for lam, node in zip(lambdas, grid) if node in zeros}
        rows.append(Constraint(names.aux(f'{label}_one'), _with_binary(one_terms, w, -1.0), LE, 0.0))
        rows.append(Constraint(names.aux(f'{label}_zero'), _with_binary(zero_terms, w, 1.0), LE, 1.0))

    for axis, k in enumerate(tri.segments):
        for bit, (ones, zeros) in enumerate(sos2_branching_sets(k), start=1):
            add_pair(
                f'w{axis + 1}_{bit}',
                [node for node in grid if node[axis] in ones],
                [node for node in grid if node[axis] in zeros],
            )
    if d == 2:
        add_pair(
            'w_tri',
            [node for node in grid if node[0] % 2 == 0 and node[1] % 2 == 1],
            [node for node in grid if node[0] % 2 == 1 and node[1] % 2 == 0],
        )
    return variables, rows


def _with_binary(terms: Dict[str, float], binary: str, coef: float) -> Dict[str, float]:
    result = dict(terms)
    result[binary] = coef
    return result


def translate_simplex(tri: Triangulation, formulation: str = LOG,
                      names: Optional[VarNames] = None, sense: str = MINIMIZE,
                      y_bounds: Optional[Tuple[float, float]] = None) -> ConstraintBlock:
    """
    Block representing y >= (<=) the interpolant inside a minimization (maximization)

    Args:
        tri: Triangulation with vertex values
        formulation: 'CC', 'MC' or 'Log'
        names: Variable names (x1.., y by default)
        sense: 'min' or 'max' of the surrounding problem
        y_bounds: Bounds of y (vertex value range widened by 5% if None)

    Raises:
        FormulationError: For Log on anything but a J1 or 1-D grid
    """
    formulation = check_formulation(formulation)
    if not tri.has_values:
        raise TranslationError("Triangulation has no vertex values")
    names = names or VarNames.default(tri.dimension)
    if len(names.inputs) != tri.dimension:
        raise TranslationError(
            f"Triangulation has {tri.dimension} inputs but {len(names.inputs)} names were given"
        )
    sigma = sense_sign(sense)
    box = _model_box(tri, y_bounds)

    build = {CC: _convex_combination, MC: _multiple_choice, LOG: _logarithmic}[formulation]
    aux_variables, rows = build(tri, names, sigma)
    variables = block_variables(names, box.lower, box.upper) + aux_variables
    return ConstraintBlock(names, variables, rows, kind=f'simplex-{formulation}')
