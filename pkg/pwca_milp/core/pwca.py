"""
Piecewise-convex approximation: model, evaluation, starting values and fitting
"""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import FitConfig, FitResult, OptimizerOptions
from ..exceptions import (
    BandTooNarrowError, DegenerateModelError, DegeneratePlaneError, FitError,
    ParameterError, UnderdeterminedError
)
from ..filters import InterfaceBandFilter
from .convex_fit import (
    CONCAVE, CONVEX, ConvexModel, check_orientation, fit_convex, planes_matrix
)
from .dataset import Dataset
from .geometry import (
    VERTICAL_TOLERANCE, Basis, Hyperplane, RotationParams, alignment_angles,
    basic_rotation_planes, convex_to_params, interface_angles, interface_planes,
    params_to_hyperplanes, rotate, trace_transformations
)
from .optimizer import minimize

LOWER = 'lower'
UPPER = 'upper'

__all__ = [
    'LOWER', 'UPPER', 'PwcaModel', 'RotationParams', 'PwcaFitter',
    'evaluate_pwca', 'fit_pwca', 'initial_guess', 'default_interface_sweep',
    'sweep_candidates', 'params_from_convex', 'extend_pairs',
]


def check_plane_count(n_hyp: int) -> int:
    if n_hyp < 2 or n_hyp % 2:
        raise ParameterError(f"Piecewise-convex models need an even plane count >= 2, got {n_hyp}")
    return n_hyp // 2


@dataclass(frozen=True)
class PwcaModel:
    """
    Two convex plane families joined at one interface

    lower[i] and upper[i] meet on the interface. `params` records the
    rotation parameters the planes were generated from, if any.
    """
    lower: Tuple[Hyperplane, ...]
    upper: Tuple[Hyperplane, ...]
    interface: Hyperplane
    params: Optional[RotationParams] = None
    orientation: str = CONVEX

    def __post_init__(self):
        lower, upper = tuple(self.lower), tuple(self.upper)
        check_orientation(self.orientation)
        if not lower or len(lower) != len(upper):
            raise ParameterError(
                f"Need the same nonzero number of lower and upper planes, "
                f"got {len(lower)} and {len(upper)}"
            )
        n = self.interface.dimension
        for i, plane in enumerate(lower + upper):
            if plane.dimension != n:
                raise ParameterError(f"Plane {i} does not match the interface dimension {n}")
            if plane.coefs[-1] <= 0:
                raise ParameterError(f"Plane {i} must have a_n > 0")
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'upper', upper)

    @classmethod
    def from_params(cls, params: RotationParams, orientation: str = CONVEX) -> 'PwcaModel':
        """Model generated by rotation parameters; concave models are mirrored in y"""
        lower, upper, interface = params_to_hyperplanes(params)
        model = cls(tuple(lower), tuple(upper), interface, params, CONVEX)
        return model.mirrored() if check_orientation(orientation) == CONCAVE else model

    @property
    def dimension(self) -> int:
        return self.interface.dimension

    @property
    def n_pairs(self) -> int:
        return len(self.lower)

    @property
    def n_hyp(self) -> int:
        return 2 * self.n_pairs

    @property
    def is_vertical(self) -> bool:
        """True when the interface does not depend on y"""
        return abs(self.interface.coefs[-1]) <= VERTICAL_TOLERANCE

    def side_values(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(y_minus, y_plus) candidate estimates at every row of x"""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        reduce = np.max if self.orientation == CONVEX else np.min
        values = []
        for planes in (self.lower, self.upper):
            intercepts, slopes = planes_matrix(planes)
            values.append(reduce(intercepts + x @ slopes.T, axis=1))
        return values[0], values[1]

    def predict_with_side(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Estimates and a boolean "upper side" flag per row of x

        A candidate is consistent when its own point (x, y) lies in its
        region ([1, x, y] . a_ifc <= 0 below, > 0 above). Of two consistent
        candidates the one closer to the interface wins; if neither is
        consistent the smaller violation wins.
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y_minus, y_plus = self.side_values(x)
        a = self.interface.coefs
        base = a[0] + x @ a[1:-1]
        r_minus = base + a[-1] * y_minus
        r_plus = base + a[-1] * y_plus
        ok_minus = r_minus <= 0
        ok_plus = r_plus > 0
        upper = np.where(
            ok_minus & ok_plus, np.abs(r_plus) < np.abs(r_minus),
            np.where(ok_minus, False, np.where(ok_plus, True, -r_plus < r_minus)),
        )
        return np.where(upper, y_plus, y_minus), upper

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.predict_with_side(x)[0]

    def region_mask(self, points: np.ndarray) -> np.ndarray:
        """True where [1, x, y] . a_ifc > 0 (the upper region) for rows [x, y]"""
        return self.interface.residual(np.atleast_2d(points)) > 0

    def mirrored(self) -> 'PwcaModel':
        """Model of -y: convex becomes concave and vice versa"""
        flipped = CONCAVE if self.orientation == CONVEX else CONVEX
        return PwcaModel(
            tuple(p.mirrored() for p in self.lower),
            tuple(p.mirrored() for p in self.upper),
            self.interface.flipped_y(),
            self.params,
            flipped,
        )

    def as_convex_models(self) -> Tuple[ConvexModel, ConvexModel]:
        return ConvexModel(self.lower, self.orientation), ConvexModel(self.upper, self.orientation)

    def __str__(self):
        return f"PwcaModel({self.orientation}, {self.n_hyp} planes, n={self.dimension})"


def evaluate_pwca(model: PwcaModel, x: np.ndarray):
    """
    Estimate and side at one point, or arrays of both for an (N, n-1) input

    Returns:
        (y, 'lower' | 'upper') for a single x
    """
    x = np.asarray(x, dtype=float)
    y, upper = model.predict_with_side(x)
    if x.ndim <= 1:
        return float(y[0]), UPPER if upper[0] else LOWER
    return y, np.where(upper, UPPER, LOWER)


def _degenerate_pair(params: RotationParams) -> int:
    trace = trace_transformations(params)
    for i, (lower, upper) in enumerate(zip(trace.lower_normals, trace.upper_normals)):
        if abs(lower[-1]) <= VERTICAL_TOLERANCE or abs(upper[-1]) <= VERTICAL_TOLERANCE:
            return i
    return -1


class PwcaFitter:
    """
    Least-squares fit of a convex piecewise model over rotation parameters

    Shifts enter the search divided by the domain diameter. All r1 angles are
    searched unless `config.vertical_interface` is set; then only the planes
    (1, k), k < n, move and the interface keeps a_n = 0 from a vertical start.
    """

    def __init__(self, data: Dataset, n_hyp: int, config: Optional[FitConfig] = None,
                 logger: Optional[logging.Logger] = None):
        self.n_pairs = check_plane_count(n_hyp)
        required = n_hyp * (data.dimension + 1)
        if data.size < required:
            raise UnderdeterminedError(
                f"{n_hyp} planes in n={data.dimension} need at least {required} points, "
                f"got {data.size}"
            )
        self.data = data
        self.n_hyp = n_hyp
        self.n = data.dimension
        self.config = (config or FitConfig()).validate()
        self.logger = logger or logging.getLogger(__name__)

        self.diameter = data.diameter
        self.corners = data.x_box.corners()
        self.y_top = data.y_max
        self.y_half = data.y_range / 2.0 or 1.0
        scaled_range = 2.0 if data.y_range > 0 else 0.0
        self.penalty_weight = self.config.penalty_scale * data.size * scaled_range ** 2

        planes = basic_rotation_planes(self.n)
        if self.config.vertical_interface:
            self.free_r1 = [i for i, (j, k) in enumerate(planes) if j == 1 and k < self.n]
        else:
            self.free_r1 = list(range(len(planes)))

    def pack(self, params: RotationParams) -> np.ndarray:
        per_pair = np.column_stack([
            params.r2, params.s2 / self.diameter, params.r3_minus, params.r3_plus,
        ])
        return np.concatenate([
            params.r1[self.free_r1], [params.s1 / self.diameter], per_pair.reshape(-1),
        ])

    def unpack(self, vector: np.ndarray, template: RotationParams) -> RotationParams:
        r1 = template.r1.copy()
        count = len(self.free_r1)
        r1[self.free_r1] = vector[:count]
        s1 = vector[count] * self.diameter
        per_pair = vector[count + 1:].reshape(self.n_pairs, -1)
        r2_count = template.r2.shape[1]
        return RotationParams(
            r1=r1, s1=s1,
            r2=per_pair[:, :r2_count],
            s2=per_pair[:, r2_count] * self.diameter,
            r3_minus=per_pair[:, r2_count + 1],
            r3_plus=per_pair[:, r2_count + 2],
        )

    def terms(self, params: RotationParams) -> Tuple[float, float]:
        """(SSE, penalty) in data units"""
        model = PwcaModel.from_params(params)
        sse = float(np.sum((model.predict(self.data.x) - self.data.y) ** 2))
        if self.penalty_weight == 0.0:
            return sse, 0.0
        intercepts, slopes = planes_matrix(model.lower + model.upper)
        values = intercepts + self.corners @ slopes.T
        shortfall = np.maximum(self.y_top - values, 0.0).min(axis=0)
        return sse, self.penalty_weight * float(np.sum(shortfall ** 2))

    def scaled_objective(self, params: RotationParams) -> float:
        try:
            sse, penalty = self.terms(params)
        except (DegeneratePlaneError, ParameterError):
            return math.inf
        return (sse + penalty) / self.y_half ** 2

    def fit(self, init: RotationParams, options: Optional[OptimizerOptions] = None,
            seed: Optional[int] = None) -> FitResult:
        """
        Run the search from `init`

        Raises:
            DegenerateModelError: If a plane pair is degenerate at the optimum
        """
        if init.dimension != self.n or init.n_pairs != self.n_pairs:
            raise ParameterError(
                f"Initial parameters are sized for n={init.dimension} with "
                f"{init.n_hyp} planes, expected n={self.n} with {self.n_hyp}"
            )
        start_time = time.time()
        options = options or self.config.optimizer
        if seed is not None and options.seed is None:
            options = replace(options, seed=seed)

        outcome = minimize(lambda v: self.scaled_objective(self.unpack(v, init)),
                           self.pack(init), options, self.logger)
        params = self.unpack(outcome.x, init)
        try:
            model = PwcaModel.from_params(params)
        except DegeneratePlaneError as e:
            raise DegenerateModelError(str(e), pair_index=_degenerate_pair(params)) from e

        sse, penalty = self.terms(params)
        result = FitResult(
            model=model,
            rmse=float(np.sqrt(sse / self.data.size)),
            sse=sse,
            penalty=penalty,
            converged=outcome.converged,
            evaluations=outcome.evaluations,
            duration_seconds=time.time() - start_time,
            stats={'objective_scaled': outcome.fun},
        )
        self.logger.info(f"{self.n_hyp}-plane piecewise fit: {result}")
        return result


def _working_data(data: Dataset, orientation: str) -> Dataset:
    # concave models are convex models of -y
    return data.negated() if check_orientation(orientation) == CONCAVE else data


def section_heights(u: np.ndarray, v: np.ndarray, distance: np.ndarray) -> np.ndarray:
    """
    Heights of band samples carried onto the interface

    v is regressed on [1, u, min(d, 0), max(d, 0)] and the two side trends
    in the signed distance d are subtracted, so samples off the interface
    do not lift the section.
    """
    below = np.minimum(distance, 0.0)
    above = np.maximum(distance, 0.0)
    design = np.column_stack([np.ones(distance.size), u, below, above])
    coef, *_ = np.linalg.lstsq(design, v, rcond=None)
    return v - coef[-2] * below - coef[-1] * above


def _initial_guess(data: Dataset, n_hyp: int, r1: np.ndarray, s1: float, band_width: float,
                   config: FitConfig, seed: Optional[int], logger: logging.Logger
                   ) -> RotationParams:
    pairs = check_plane_count(n_hyp)
    n = data.dimension
    r1 = np.asarray(r1, dtype=float)
    basis = rotate(Basis.identity(n), r1, basic_rotation_planes(n))
    x1 = basis.vector(1)
    origin = x1 * s1

    band = InterfaceBandFilter(x1, s1, band_width * data.diameter)
    mask = band.build(data)
    needed = pairs * n
    if int(mask.sum()) < needed:
        raise BandTooNarrowError(
            f"{band} selects {int(mask.sum())} points, need at least {needed}"
        )
    logger.debug(f"{band} selects {int(mask.sum())} of {data.size} points")

    relative = data.points[mask] - origin
    distance = relative @ x1
    projected = relative - np.outer(distance, x1)
    u = projected @ basis.vectors[:, 1:n - 1]
    v = section_heights(u, projected @ basis.vector(n), distance)

    if n == 2:
        r2 = np.zeros((pairs, 0))
        s2 = np.full(pairs, float(np.mean(v)))
    else:
        try:
            section = Dataset(u, v)
            inner = fit_convex(section, pairs, CONVEX, config, seed, logger=logger)
        except (ParameterError, UnderdeterminedError) as e:
            raise BandTooNarrowError(f"Cannot fit the interface section: {e}") from e
        intercepts, slopes = planes_matrix(inner.model.planes)
        r2_rows, s2 = [], []
        for c0, c in zip(intercepts, slopes):
            norm = math.sqrt(1.0 + float(c @ c))
            coords = np.zeros(n)
            coords[1:n - 1] = -c / norm
            coords[n - 1] = 1.0 / norm
            r2_rows.append(alignment_angles(coords, n, range(2, n), interface_planes(n)))
            s2.append(c0 / norm)
        r2 = np.array(r2_rows)
        s2 = np.array(s2)

    params = RotationParams(r1=r1, s1=s1, r2=r2, s2=s2,
                            r3_minus=np.zeros(pairs), r3_plus=np.zeros(pairs))

    # tilt angles only, everything else frozen
    fitter = PwcaFitter(data, n_hyp, config, logger)

    def tilt_objective(angles: np.ndarray) -> float:
        return fitter.scaled_objective(params.replace(r3_minus=angles[:pairs],
                                                      r3_plus=angles[pairs:]))

    outcome = minimize(tilt_objective, np.zeros(2 * pairs), config.optimizer, logger)
    return params.replace(r3_minus=outcome.x[:pairs], r3_plus=outcome.x[pairs:])


def initial_guess(data: Dataset, n_hyp: int, r1: np.ndarray, s1: float,
                  band_width: Optional[float] = None, orientation: str = CONVEX,
                  config: Optional[FitConfig] = None, seed: Optional[int] = None,
                  logger: Optional[logging.Logger] = None) -> RotationParams:
    """
    Starting values from a guessed interface

    Samples within `band_width` (a fraction of the domain diameter) of the
    interface are projected onto it, a convex model with n_hyp/2 pieces is
    fitted to the projected section to place the pair intersections, and the
    tilt angles are then optimized with everything else held fixed.

    Raises:
        BandTooNarrowError: If the band holds fewer than (n_hyp/2) * n samples
    """
    config = (config or FitConfig()).validate()
    logger = logger or logging.getLogger(__name__)
    band_width = config.band_width if band_width is None else band_width
    return _initial_guess(_working_data(data, orientation), n_hyp, r1, s1, band_width,
                          config, seed, logger)


def sweep_candidates(data: Dataset, shifts: Sequence[float] = (0.25, 0.5, 0.75)
                     ) -> List[Tuple[np.ndarray, float]]:
    """
    Candidate interfaces as (unit normal in (x, y) space, shift) pairs

    Normals are the input axes plus the normals of the two diagonals of the
    (x1, x2) face; shifts are fractions of the domain's extent along the normal.
    """
    box = data.x_box
    m = data.n_inputs
    directions = [np.eye(m)[j] for j in range(m)]
    if m >= 2:
        w1, w2 = box.widths[0], box.widths[1]
        for sign in (1.0, -1.0):
            d = np.zeros(m)
            d[0], d[1] = w2, sign * w1
            directions.append(d / np.linalg.norm(d))

    corners = box.corners()
    candidates = []
    for d in directions:
        reach = corners @ d
        low, high = float(reach.min()), float(reach.max())
        for fraction in shifts:
            candidates.append((np.append(d, 0.0), low + fraction * (high - low)))
    return candidates


def _sweep(data: Dataset, n_hyp: int, config: FitConfig, seed: Optional[int],
           logger: logging.Logger) -> RotationParams:
    check_plane_count(n_hyp)
    candidates = sweep_candidates(data, config.sweep_shifts)
    fitter = PwcaFitter(data, n_hyp, config, logger)

    def run(candidate):
        normal, s1 = candidate
        try:
            start = _initial_guess(data, n_hyp, interface_angles(normal), s1,
                                   config.band_width, config, seed, logger)
            budget = config.sweep_iterations_per_param * fitter.pack(start).size
            short = OptimizerOptions(max_iterations=budget, restarts=1,
                                     x_tolerance=config.optimizer.x_tolerance,
                                     f_tolerance=config.optimizer.f_tolerance)
            result = fitter.fit(start, short)
        except FitError as e:
            logger.warning(f"Interface candidate normal={normal.tolist()}, s1={s1:.6g} "
                           f"failed: {e}")
            return None
        return result

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(run, candidates))
    else:
        results = [run(c) for c in candidates]

    best_index, best = -1, None
    for i, result in enumerate(results):
        if result is not None and (best is None or result.rmse < best.rmse):
            best_index, best = i, result
    if best is None:
        raise FitError("No interface candidate produced a valid starting point")
    normal, s1 = candidates[best_index]
    logger.info(f"Interface sweep picked normal={normal.tolist()}, s1={s1:.6g} "
                f"(short-fit rmse {best.rmse:.6g})")
    return best.model.params


def default_interface_sweep(data: Dataset, n_hyp: int, orientation: str = CONVEX,
                            config: Optional[FitConfig] = None, seed: Optional[int] = None,
                            logger: Optional[logging.Logger] = None) -> RotationParams:
    """
    Starting parameters from the best of a fixed set of interface candidates

    Each candidate runs initial_guess plus a short fit; candidates run in a
    thread pool when config.workers > 1.
    """
    config = (config or FitConfig()).validate()
    logger = logger or logging.getLogger(__name__)
    return _sweep(_working_data(data, orientation), n_hyp, config, seed, logger)


def fit_pwca(data: Dataset, n_hyp: int, init: Optional[RotationParams] = None,
             orientation: str = CONVEX, config: Optional[FitConfig] = None,
             seed: Optional[int] = None,
             logger: Optional[logging.Logger] = None) -> FitResult:
    """
    Fit a piecewise-convex (or piecewise-concave) model with `n_hyp` planes

    Args:
        data: Samples to approximate
        n_hyp: Even number of planes
        init: Starting rotation parameters (default_interface_sweep if None)
        orientation: 'convex' or 'concave'
        config: Fit options (defaults if None)
        seed: Seed forwarded to the sub-fits and optimizer restarts
        logger: Optional logger

    Returns:
        FitResult whose rmse excludes the corner penalty; unpacks as (model, rmse)

    Raises:
        ParameterError: If n_hyp is odd
        DegenerateModelError: If a pair is degenerate at the optimum
    """
    check_plane_count(n_hyp)
    config = (config or FitConfig()).validate()
    logger = logger or logging.getLogger(__name__)
    work = _working_data(data, orientation)
    if init is None:
        init = _sweep(work, n_hyp, config, seed, logger)
    result = PwcaFitter(work, n_hyp, config, logger).fit(init, seed=seed)
    if orientation == CONCAVE:
        result.model = result.model.mirrored()
    return result


def extend_pairs(params: RotationParams, n_hyp: int) -> RotationParams:
    """
    Parameters with `n_hyp` planes generating the same model as `params`

    Added pairs repeat the existing pairs cyclically, so the fit can only
    improve on the smaller model when started from the result.
    """
    pairs = check_plane_count(n_hyp)
    if pairs < params.n_pairs:
        raise ParameterError(f"Cannot shrink {params.n_hyp} planes to {n_hyp}")
    index = np.arange(pairs) % params.n_pairs
    return params.replace(
        r2=params.r2[index], s2=params.s2[index],
        r3_minus=params.r3_minus[index], r3_plus=params.r3_plus[index],
    )


def params_from_convex(model: ConvexModel, normal: np.ndarray, s1: float) -> RotationParams:
    """Rotation parameters of a piecewise model with both sides equal to `model`"""
    if model.orientation == CONCAVE:
        model = model.mirrored()
    return convex_to_params(model.planes, normal, s1)
