"""
Simple convex / concave approximation by a max (min) of hyperplanes
"""
import logging
import time
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..config import FitConfig, FitResult
from ..exceptions import DegeneratePlaneError, ParameterError, UnderdeterminedError
from .dataset import Box, Dataset, grid_points
from .geometry import VERTICAL_TOLERANCE, Hyperplane
from .optimizer import minimize

CONVEX = 'convex'
CONCAVE = 'concave'
ORIENTATIONS = (CONVEX, CONCAVE)

MAX_DOMINATION_POINTS = 1_000_000


def check_orientation(orientation: str) -> str:
    if orientation not in ORIENTATIONS:
        raise ParameterError(f"Orientation must be one of {ORIENTATIONS}, got {orientation!r}")
    return orientation


def plane_value(plane: Hyperplane, x: np.ndarray):
    """
    y on the plane above x, the root of [1, x, y] . a = 0

    Args:
        plane: Plane with a_n != 0
        x: One (n-1)-vector or an (N, n-1) array

    Returns:
        float for a single x, np.ndarray for an array

    Raises:
        DegeneratePlaneError: If the plane is vertical in y
    """
    a = plane.coefs
    if abs(a[-1]) <= VERTICAL_TOLERANCE:
        raise DegeneratePlaneError("Cannot evaluate a plane that is vertical in y")
    x = np.asarray(x, dtype=float)
    values = -(a[0] + x @ a[1:-1]) / a[-1]
    return float(values) if np.ndim(values) == 0 else values


def planes_matrix(planes: Sequence[Hyperplane]) -> Tuple[np.ndarray, np.ndarray]:
    """(intercepts, slopes) with y_i(x) = intercepts[i] + slopes[i] . x"""
    coefs = np.array([p.coefs for p in planes], dtype=float)
    if np.any(np.abs(coefs[:, -1]) <= VERTICAL_TOLERANCE):
        raise DegeneratePlaneError("Cannot evaluate a plane that is vertical in y")
    return -coefs[:, 0] / coefs[:, -1], -coefs[:, 1:-1] / coefs[:, -1:]


def plane_from_slopes(intercept: float, slopes: np.ndarray) -> Hyperplane:
    """Normalized plane y = intercept + slopes . x"""
    coefs = np.concatenate([[-intercept], -np.asarray(slopes, dtype=float), [1.0]])
    return Hyperplane(coefs / np.linalg.norm(coefs[1:]))


@dataclass(frozen=True)
class ConvexModel:
    """Max (convex) or min (concave) of hyperplanes"""
    planes: Tuple[Hyperplane, ...]
    orientation: str = CONVEX

    def __post_init__(self):
        planes = tuple(self.planes)
        if not planes:
            raise ParameterError("A convex model needs at least one plane")
        check_orientation(self.orientation)
        n = planes[0].dimension
        for i, plane in enumerate(planes):
            if plane.dimension != n:
                raise ParameterError(f"Plane {i} has dimension {plane.dimension}, expected {n}")
            if plane.coefs[-1] <= 0:
                raise ParameterError(f"Plane {i} must have a_n > 0")
        object.__setattr__(self, 'planes', planes)

    @property
    def dimension(self) -> int:
        return self.planes[0].dimension

    @property
    def n_hyp(self) -> int:
        return len(self.planes)

    def plane_values(self, x: np.ndarray) -> np.ndarray:
        """(N, n_hyp) matrix of every plane's value at every row of x"""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        intercepts, slopes = planes_matrix(self.planes)
        return intercepts + x @ slopes.T

    def predict(self, x: np.ndarray) -> np.ndarray:
        values = self.plane_values(x)
        return values.max(axis=1) if self.orientation == CONVEX else values.min(axis=1)

    def active_counts(self, x: np.ndarray) -> np.ndarray:
        """How often each plane attains the max (min) over the rows of x"""
        values = self.plane_values(x)
        winner = values.argmax(axis=1) if self.orientation == CONVEX else values.argmin(axis=1)
        return np.bincount(winner, minlength=self.n_hyp)

    def mirrored(self) -> 'ConvexModel':
        """Model of -y: a convex model becomes concave and vice versa"""
        flipped = CONCAVE if self.orientation == CONVEX else CONVEX
        return ConvexModel(tuple(p.mirrored() for p in self.planes), flipped)

    def __str__(self):
        return f"ConvexModel({self.orientation}, {self.n_hyp} planes, n={self.dimension})"


def evaluate_convex(model: ConvexModel, x: np.ndarray):
    """Model estimate at one point (float) or at every row of an array"""
    x = np.asarray(x, dtype=float)
    values = model.predict(x)
    return float(values[0]) if x.ndim <= 1 else values


class _Scaling:
    """Maps x to [-1, 1] per input and y to [-1, 1]"""

    def __init__(self, x_box: Box, y_min: float, y_max: float):
        self.x_center = x_box.center
        self.x_half = x_box.widths / 2.0
        self.y_center = (y_min + y_max) / 2.0
        self.y_half = (y_max - y_min) / 2.0 or 1.0

    def x(self, x: np.ndarray) -> np.ndarray:
        return (x - self.x_center) / self.x_half

    def y(self, y: np.ndarray) -> np.ndarray:
        return (y - self.y_center) / self.y_half

    def to_planes(self, params: np.ndarray) -> Tuple[Hyperplane, ...]:
        planes = []
        for row in params:
            b0, b = row[0], row[1:]
            slopes = self.y_half * b / self.x_half
            intercept = self.y_center + self.y_half * (b0 - b @ (self.x_center / self.x_half))
            planes.append(plane_from_slopes(intercept, slopes))
        return tuple(planes)

    def from_planes(self, planes: Sequence[Hyperplane]) -> np.ndarray:
        intercepts, slopes = planes_matrix(planes)
        b = slopes * self.x_half / self.y_half
        b0 = (intercepts - self.y_center + slopes @ self.x_center) / self.y_half
        return np.column_stack([b0, b])


class ConvexFitter:
    """
    Least-squares fit of a max of hyperplanes with the corner penalty

    The search runs in scaled coordinates (inputs and y mapped to [-1, 1]),
    each plane parameterized as y = b_0 + b . x.
    """

    def __init__(self, data: Dataset, n_hyp: int, config: Optional[FitConfig] = None,
                 logger: Optional[logging.Logger] = None):
        if n_hyp < 1:
            raise ParameterError(f"Plane count must be >= 1, got {n_hyp}")
        required = n_hyp * (data.dimension + 1)
        if data.size < required:
            raise UnderdeterminedError(
                f"{n_hyp} planes in n={data.dimension} need at least {required} points, "
                f"got {data.size}"
            )
        self.data = data
        self.n_hyp = n_hyp
        self.config = (config or FitConfig()).validate()
        self.logger = logger or logging.getLogger(__name__)

        self.scaling = _Scaling(data.x_box, data.y_min, data.y_max)
        self.xs = self.scaling.x(data.x)
        self.ys = self.scaling.y(data.y)
        self.design = np.column_stack([np.ones(data.size), self.xs])
        self.corners = np.column_stack([
            np.ones(2 ** data.n_inputs),
            Box(-np.ones(data.n_inputs), np.ones(data.n_inputs)).corners(),
        ])
        self.y_top = float(self.ys.max())
        # scaled y-range is 2 unless the data is constant
        y_range = float(self.ys.max() - self.ys.min())
        self.penalty_weight = self.config.penalty_scale * data.size * y_range ** 2

    def terms(self, params: np.ndarray) -> Tuple[float, float]:
        """(SSE, penalty) in scaled units"""
        params = params.reshape(self.n_hyp, -1)
        estimate = (self.design @ params.T).max(axis=1)
        sse = float(np.sum((estimate - self.ys) ** 2))
        if self.penalty_weight == 0.0:
            return sse, 0.0
        shortfall = np.maximum(self.y_top - self.corners @ params.T, 0.0).min(axis=0)
        return sse, self.penalty_weight * float(np.sum(shortfall ** 2))

    def objective(self, params: np.ndarray) -> float:
        sse, penalty = self.terms(params)
        return sse + penalty

    def least_squares_start(self, rng: np.random.Generator) -> np.ndarray:
        coef, *_ = np.linalg.lstsq(self.design, self.ys, rcond=None)
        params = np.tile(coef, (self.n_hyp, 1))
        scale = 0.1 * max(float(self.ys.max() - self.ys.min()), 1e-12)
        params[:, 1:] += rng.normal(scale=scale, size=params[:, 1:].shape)
        return params

    def warm_start(self, model: ConvexModel) -> np.ndarray:
        if model.dimension != self.data.dimension:
            raise ParameterError("Initial model dimension does not match the data")
        if model.n_hyp > self.n_hyp:
            raise ParameterError(
                f"Initial model has {model.n_hyp} planes, more than the requested {self.n_hyp}"
            )
        params = self.scaling.from_planes(model.planes)
        counts = model.active_counts(self.data.x)
        busiest = params[int(np.argmax(counts))]
        extra = np.tile(busiest, (self.n_hyp - model.n_hyp, 1))
        return np.vstack([params, extra])

    def dominated_planes(self, params: np.ndarray) -> np.ndarray:
        """Indices of planes that never win on the domination grid"""
        per_dim = self.config.domination_grid
        cap = int(MAX_DOMINATION_POINTS ** (1.0 / self.data.n_inputs))
        per_dim = max(2, min(per_dim, cap))
        grid = grid_points(Box(-np.ones(self.data.n_inputs), np.ones(self.data.n_inputs)),
                           per_dim)
        values = np.column_stack([np.ones(len(grid)), grid]) @ params.reshape(self.n_hyp, -1).T
        top = values.max(axis=1, keepdims=True)
        winners = values >= top - 1e-12
        unique = winners & (winners.sum(axis=1, keepdims=True) == 1)
        return np.flatnonzero(~unique.any(axis=0))

    def reseed(self, params: np.ndarray, dominated: np.ndarray,
               rng: np.random.Generator) -> np.ndarray:
        """Move dominated planes onto the most under-estimated samples"""
        params = params.reshape(self.n_hyp, -1).copy()
        estimate = (self.design @ params.T).max(axis=1)
        order = np.argsort(estimate - self.ys)
        coef, *_ = np.linalg.lstsq(self.design, self.ys, rcond=None)
        for plane, sample in zip(dominated, order):
            slopes = coef[1:] + rng.normal(scale=0.1, size=coef.size - 1)
            params[plane, 1:] = slopes
            params[plane, 0] = self.ys[sample] - self.xs[sample] @ slopes
        return params

    def fit(self, init: Optional[ConvexModel] = None, seed: Optional[int] = None) -> FitResult:
        start_time = time.time()
        rng = np.random.default_rng(seed)
        params = self.warm_start(init) if init is not None else self.least_squares_start(rng)

        self.logger.info(f"Fitting {self.n_hyp} planes to {self.data.size} points "
                         f"(n={self.data.dimension})")
        options = self.config.optimizer
        outcome = minimize(self.objective, params.reshape(-1), options, self.logger)
        best = outcome
        evaluations = outcome.evaluations
        refits = 0

        while refits < self.config.max_refits and self.n_hyp > 1:
            dominated = self.dominated_planes(best.x)
            if dominated.size == 0:
                break
            refits += 1
            self.logger.warning(f"Planes {dominated.tolist()} are dominated, "
                                f"re-seeding (refit {refits}/{self.config.max_refits})")
            candidate = minimize(self.objective,
                                 self.reseed(best.x, dominated, rng).reshape(-1),
                                 options, self.logger)
            evaluations += candidate.evaluations
            if candidate.fun < best.fun:
                best = candidate

        sse_scaled, penalty_scaled = self.terms(best.x)
        planes = self.scaling.to_planes(best.x.reshape(self.n_hyp, -1))
        model = ConvexModel(planes, CONVEX)
        sse = float(np.sum((model.predict(self.data.x) - self.data.y) ** 2))
        result = FitResult(
            model=model,
            rmse=float(np.sqrt(sse / self.data.size)),
            sse=sse,
            penalty=penalty_scaled * self.scaling.y_half ** 2,
            converged=best.converged,
            evaluations=evaluations,
            refits=refits,
            duration_seconds=time.time() - start_time,
            stats={'objective_scaled': best.fun, 'sse_scaled': sse_scaled},
        )
        self.logger.info(str(result))
        return result


def fit_convex(data: Dataset, n_hyp: int, orientation: str = CONVEX,
               config: Optional[FitConfig] = None, seed: Optional[int] = None,
               init: Optional[ConvexModel] = None,
               logger: Optional[logging.Logger] = None) -> FitResult:
    """
    Fit a max (convex) or min (concave) of `n_hyp` hyperplanes to the data

    Args:
        data: Samples to approximate
        n_hyp: Number of planes
        orientation: 'convex' or 'concave'
        config: Fit options (defaults if None)
        seed: Seed for the random start and re-seeding
        init: Optional starting model with at most `n_hyp` planes
        logger: Optional logger

    Returns:
        FitResult whose rmse excludes the corner penalty; unpacks as (model, rmse)

    Raises:
        UnderdeterminedError: If data.size < n_hyp * (n + 1)
    """
    check_orientation(orientation)
    if orientation == CONCAVE:
        if init is not None:
            init = init.mirrored()
        result = ConvexFitter(data.negated(), n_hyp, config, logger).fit(init, seed)
        result.model = result.model.mirrored()
        return result
    return ConvexFitter(data, n_hyp, config, logger).fit(init, seed)
