"""
Common pre-built filters for sample selection
"""
from typing import Optional, Sequence

import numpy as np

from ..core.dataset import Box, Dataset
from ..exceptions import ParameterError
from .base import PointFilter


class InterfaceBandFilter(PointFilter):
    """
    Samples within a slab around a hyperplane of (x, y) space

    Example:
        band = InterfaceBandFilter(normal=[1, 0, 0], offset=0.5, half_width=0.1)
        mask = band.build(data)
        # |p . normal - offset| <= half_width for every selected p = [x, y]
    """

    def __init__(self, normal: Sequence[float], offset: float, half_width: float):
        """
        Args:
            normal: Unit normal of the hyperplane in (x, y) space
            offset: Signed distance of the hyperplane from the origin
            half_width: Maximum distance of a selected sample
        """
        normal = np.asarray(normal, dtype=float)
        length = float(np.linalg.norm(normal))
        if length == 0.0:
            raise ParameterError("Band normal must be nonzero")
        if half_width < 0:
            raise ParameterError("Band half-width must be >= 0")
        self.normal = normal / length
        self.offset = float(offset) / length
        self.half_width = float(half_width)

    def distances(self, data: Dataset) -> np.ndarray:
        return data.points @ self.normal - self.offset

    def build(self, data: Dataset, **params) -> np.ndarray:
        if not self.validate(data):
            raise ParameterError(
                f"Band normal has {self.normal.size} entries for n={data.dimension}"
            )
        return np.abs(self.distances(data)) <= self.half_width

    def validate(self, data: Dataset, **params) -> bool:
        return self.normal.size == data.dimension

    def __str__(self):
        return (f"InterfaceBandFilter(normal={np.array2string(self.normal, precision=4)}, "
                f"offset={self.offset:.6g}, half_width={self.half_width:.6g})")


class BoxFilter(PointFilter):
    """
    Samples whose inputs lie in a box

    Example:
        crop = BoxFilter([0.0, 0.0], [0.5, 1.0])
        left_half = crop.apply(data)
    """

    def __init__(self, lower: Sequence[float], upper: Sequence[float], inclusive: bool = True):
        """
        Args:
            lower: Lower bound per input
            upper: Upper bound per input
            inclusive: Keep samples on the boundary (default: True)
        """
        self.box = Box(lower, upper)
        self.inclusive = inclusive

    def build(self, data: Dataset, **params) -> np.ndarray:
        if not self.validate(data):
            raise ParameterError(
                f"Box has {self.box.dimension} bounds for {data.n_inputs} inputs"
            )
        if self.inclusive:
            return self.box.contains(data.x)
        return np.all((data.x > self.box.lower) & (data.x < self.box.upper), axis=1)

    def validate(self, data: Dataset, **params) -> bool:
        return self.box.dimension == data.n_inputs

    def __str__(self):
        return f"BoxFilter({self.box})"


def crop_filter(lower: Optional[Sequence[float]], upper: Optional[Sequence[float]],
                data: Dataset) -> PointFilter:
    """BoxFilter with missing bounds taken from the dataset's box"""
    lo = data.x_box.lower if lower is None else lower
    hi = data.x_box.upper if upper is None else upper
    return BoxFilter(lo, hi)
