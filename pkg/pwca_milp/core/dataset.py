"""
Point-cloud datasets and axis-aligned boxes
"""
import itertools
import os
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import pandas as pd

from ..exceptions import DataFormatError, ParameterError

CSV_FLOAT_FORMAT = '%.17g'


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lower, upper] in any number of dimensions"""
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.array(self.lower, dtype=float).reshape(-1)
        upper = np.array(self.upper, dtype=float).reshape(-1)
        if lower.shape != upper.shape:
            raise ParameterError("Box bounds must have the same length")
        if np.any(lower > upper):
            raise ParameterError(f"Box lower bound exceeds upper bound: {lower} > {upper}")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'upper', upper)

    @property
    def dimension(self) -> int:
        return self.lower.size

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def center(self) -> np.ndarray:
        return (self.lower + self.upper) / 2.0

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.widths))

    @property
    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))

    def corners(self) -> np.ndarray:
        """All 2^d corners, one per row"""
        return np.array(list(itertools.product(*zip(self.lower, self.upper))), dtype=float)

    def contains(self, points: np.ndarray, tolerance: float = 0.0) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all((points >= self.lower - tolerance) & (points <= self.upper + tolerance), axis=1)

    def expanded(self, fraction: float) -> 'Box':
        """Box grown by `fraction` of its width on each side"""
        margin = self.widths * fraction
        return Box(self.lower - margin, self.upper + margin)

    def product(self, other: 'Box') -> 'Box':
        return Box(np.concatenate([self.lower, other.lower]),
                   np.concatenate([self.upper, other.upper]))

    def __str__(self):
        ranges = ', '.join(f"[{lo:.6g}, {hi:.6g}]" for lo, hi in zip(self.lower, self.upper))
        return f"Box({ranges})"


@dataclass(frozen=True)
class Dataset:
    """
    Samples (x, y) of a function of n-1 inputs

    x has shape (N, n-1), y shape (N,). `x_box` defaults to the bounding box
    of the samples and must be non-degenerate in every input.
    """
    x: np.ndarray
    y: np.ndarray
    x_box: Optional[Box] = None

    def __post_init__(self):
        y = np.array(self.y, dtype=float).reshape(-1)
        x = np.array(self.x, dtype=float)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2 or x.shape[0] != y.size:
            raise ParameterError(f"x of shape {x.shape} does not match {y.size} y values")
        if y.size < 1:
            raise ParameterError("Dataset needs at least one point")
        if x.shape[1] < 1:
            raise ParameterError("Dataset needs at least one input column")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ParameterError("Dataset contains non-finite values")

        box = self.x_box
        if box is None:
            box = Box(x.min(axis=0), x.max(axis=0))
        elif box.dimension != x.shape[1]:
            raise ParameterError("Dataset box does not match the number of inputs")
        if np.any(box.widths <= 0):
            raise ParameterError(f"Dataset domain is degenerate: {box}")
        if not np.all(box.contains(x, tolerance=1e-12)):
            raise ParameterError("Dataset points lie outside the given box")

        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, 'x', x)
        object.__setattr__(self, 'y', y)
        object.__setattr__(self, 'x_box', box)

    @property
    def size(self) -> int:
        return self.y.size

    @property
    def n_inputs(self) -> int:
        return self.x.shape[1]

    @property
    def dimension(self) -> int:
        """n, the input count plus one for y"""
        return self.n_inputs + 1

    @property
    def points(self) -> np.ndarray:
        """Samples as (N, n) rows [x, y]"""
        return np.column_stack([self.x, self.y])

    @property
    def y_min(self) -> float:
        return float(self.y.min())

    @property
    def y_max(self) -> float:
        return float(self.y.max())

    @property
    def y_range(self) -> float:
        return self.y_max - self.y_min

    @property
    def y_box(self) -> Box:
        return Box([self.y_min], [self.y_max])

    @property
    def box(self) -> Box:
        """Box over [x, y]"""
        return self.x_box.product(self.y_box)

    @property
    def diameter(self) -> float:
        return self.box.diameter

    def negated(self) -> 'Dataset':
        return Dataset(self.x, -self.y, self.x_box)

    def subset(self, mask: np.ndarray) -> 'Dataset':
        mask = np.asarray(mask, dtype=bool)
        if not mask.any():
            raise ParameterError("Subset selects no points")
        return Dataset(self.x[mask], self.y[mask], self.x_box)

    def rmse(self, estimates: np.ndarray) -> float:
        estimates = np.asarray(estimates, dtype=float).reshape(-1)
        return float(np.sqrt(np.mean((estimates - self.y) ** 2)))

    def to_frame(self) -> pd.DataFrame:
        columns = {f"x{j + 1}": self.x[:, j] for j in range(self.n_inputs)}
        columns['y'] = self.y
        return pd.DataFrame(columns)

    def to_csv(self, path: Union[str, os.PathLike]) -> str:
        """Write `x1,...,x{n-1},y` CSV at full precision"""
        self.to_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
        return str(path)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> 'Dataset':
        columns = [str(c).strip() for c in frame.columns]
        inputs = [f"x{j + 1}" for j in range(len(columns) - 1)]
        if len(columns) < 2 or columns != inputs + ['y']:
            raise DataFormatError(
                f"Expected header x1,...,x{{n-1}},y, got {','.join(columns)}"
            )
        try:
            values = frame.to_numpy(dtype=float)
        except (TypeError, ValueError) as e:
            raise DataFormatError(f"Dataset contains non-numeric values: {e}")
        if values.shape[0] == 0:
            raise DataFormatError("Dataset has no rows")
        if not np.all(np.isfinite(values)):
            raise DataFormatError("Dataset contains missing or non-finite values")
        try:
            return cls(values[:, :-1], values[:, -1])
        except ParameterError as e:
            raise DataFormatError(str(e))

    @classmethod
    def from_csv(cls, path: Union[str, os.PathLike]) -> 'Dataset':
        try:
            frame = pd.read_csv(path)
        except FileNotFoundError:
            raise DataFormatError(f"Dataset file not found: {path}")
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise DataFormatError(f"Cannot parse dataset {path}: {e}")
        return cls.from_frame(frame)

    def __str__(self):
        return f"Dataset({self.size} points, {self.n_inputs} inputs, x in {self.x_box})"


def grid_points(box: Box, per_dimension: int) -> np.ndarray:
    """Row-major grid with `per_dimension` points per axis, endpoints included"""
    if per_dimension < 2:
        raise ParameterError("A grid needs at least 2 points per dimension")
    axes = [np.linspace(lo, hi, per_dimension) for lo, hi in zip(box.lower, box.upper)]
    mesh = np.meshgrid(*axes, indexing='ij')
    return np.column_stack([m.reshape(-1) for m in mesh])
