"""
Grid triangulations and their piecewise-linear interpolants

Vertices of a 2-D grid with k1 x k2 cells are numbered v = i * (k2 + 1) + j,
cells c = i * k2 + j; centre vertices of the union-jack scheme follow the grid
vertices in cell order. Simplices are stored cell by cell.
"""
import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.interpolate import LinearNDInterpolator
from scipy.sparse.linalg import spsolve

from ..exceptions import DomainError, ExtrapolationError, ParameterError, TriangulationError
from .dataset import Box, Dataset

DIAGONAL = 'diagonal'
J1 = 'j1'
UNION_JACK = 'union-jack'
SCHEMES = (DIAGONAL, J1, UNION_JACK)

INTERPOLATE = 'interpolate'
LEAST_SQUARES = 'least-squares'
FIT_MODES = (INTERPOLATE, LEAST_SQUARES)

LOCATE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Triangulation:
    """Simplicial grid over a box, optionally carrying vertex y-values"""
    vertices: np.ndarray
    simplices: np.ndarray
    box: Box
    segments: Tuple[int, ...]
    scheme: str
    values: Optional[np.ndarray] = None

    def __post_init__(self):
        vertices = np.array(self.vertices, dtype=float)
        if vertices.ndim == 1:
            vertices = vertices.reshape(-1, 1)
        simplices = np.array(self.simplices, dtype=int)
        d = vertices.shape[1]
        if simplices.ndim != 2 or simplices.shape[1] != d + 1:
            raise TriangulationError(f"Simplices must have {d + 1} vertices each")
        if simplices.size and (simplices.min() < 0 or simplices.max() >= len(vertices)):
            raise TriangulationError("Simplex refers to an unknown vertex")
        if self.scheme not in SCHEMES:
            raise ParameterError(f"Unknown triangulation scheme {self.scheme!r}")
        if len(self.segments) != d or self.box.dimension != d:
            raise TriangulationError("Segment counts and box must match the vertex dimension")

        # barycentric maps: lambda = inverse @ [x, 1]
        lifted = np.concatenate(
            [vertices[simplices].transpose(0, 2, 1), np.ones((len(simplices), 1, d + 1))], axis=1
        )
        volumes = np.abs(np.linalg.det(lifted))
        if np.any(volumes <= 1e-14 * np.prod(self.box.widths / np.array(self.segments))):
            raise TriangulationError("Triangulation contains a degenerate simplex")
        inverses = np.linalg.inv(lifted)

        values = None
        if self.values is not None:
            values = np.array(self.values, dtype=float).reshape(-1)
            if values.size != len(vertices):
                raise TriangulationError(f"Expected {len(vertices)} vertex values, got {values.size}")
            if not np.all(np.isfinite(values)):
                raise TriangulationError("Vertex values must be finite")
            values.setflags(write=False)

        for array in (vertices, simplices, inverses):
            array.setflags(write=False)
        object.__setattr__(self, 'vertices', vertices)
        object.__setattr__(self, 'simplices', simplices)
        object.__setattr__(self, 'segments', tuple(int(k) for k in self.segments))
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, '_inverses', inverses)

    @property
    def dimension(self) -> int:
        """Number of inputs"""
        return self.vertices.shape[1]

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_simplices(self) -> int:
        return len(self.simplices)

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.segments))

    @property
    def per_cell(self) -> int:
        return self.n_simplices // self.n_cells

    @property
    def has_values(self) -> bool:
        return self.values is not None

    @property
    def barycentric_maps(self) -> np.ndarray:
        """(S, d+1, d+1) matrices with lambda = maps[s] @ [x, 1]"""
        return self._inverses

    def grid_index(self, vertex: int) -> Tuple[int, ...]:
        """Grid node of a vertex number (inverse of grid_vertex)"""
        if self.dimension == 1:
            return (int(vertex),)
        if vertex >= int(np.prod(np.array(self.segments) + 1)):
            raise TriangulationError(f"Vertex {vertex} is not a grid node")
        return tuple(int(v) for v in divmod(int(vertex), self.segments[1] + 1))

    def grid_vertex(self, *index: int) -> int:
        """Vertex number of grid node (i, j) (or (i,) in 1-D)"""
        if len(index) == 1:
            return int(index[0])
        i, j = index
        return int(i * (self.segments[1] + 1) + j)

    def with_values(self, values: np.ndarray) -> 'Triangulation':
        return replace(self, values=values)

    def barycentric(self, simplex: int, x: np.ndarray) -> np.ndarray:
        return self._inverses[simplex] @ np.append(np.asarray(x, dtype=float), 1.0)

    def locate(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Containing simplex and barycentric weights for every row of x

        Raises:
            DomainError: If a point lies outside the box
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.dimension:
            raise ParameterError(f"Expected points with {self.dimension} inputs")
        inside = self.box.contains(x, tolerance=LOCATE_TOLERANCE)
        if not np.all(inside):
            bad = x[~inside][0]
            raise DomainError(f"Point {bad.tolist()} lies outside {self.box}")

        segments = np.array(self.segments)
        steps = self.box.widths / segments
        cell_index = np.clip(np.floor((x - self.box.lower) / steps).astype(int), 0, segments - 1)
        cells = np.ravel_multi_index(tuple(cell_index.T), self.segments)

        lifted = np.column_stack([x, np.ones(len(x))])
        best_simplex = np.zeros(len(x), dtype=int)
        best_weights = np.zeros((len(x), self.dimension + 1))
        best_score = np.full(len(x), -np.inf)
        for offset in range(self.per_cell):
            simplex = cells * self.per_cell + offset
            weights = np.einsum('nij,nj->ni', self._inverses[simplex], lifted)
            score = weights.min(axis=1)
            better = score > best_score
            best_simplex[better] = simplex[better]
            best_weights[better] = weights[better]
            best_score[better] = score[better]
        return best_simplex, best_weights

    def basis_matrix(self, x: np.ndarray) -> sparse.csr_matrix:
        """Sparse (N, n_vertices) matrix of hat-function values"""
        simplex, weights = self.locate(x)
        rows = np.repeat(np.arange(len(simplex)), self.dimension + 1)
        cols = self.simplices[simplex].reshape(-1)
        return sparse.csr_matrix((weights.reshape(-1), (rows, cols)),
                                 shape=(len(simplex), self.n_vertices))

    def predict(self, x: np.ndarray) -> np.ndarray:
        if self.values is None:
            raise TriangulationError("Triangulation has no vertex values")
        simplex, weights = self.locate(x)
        return np.sum(weights * self.values[self.simplices[simplex]], axis=1)

    def __str__(self):
        grid = 'x'.join(str(k) for k in self.segments)
        return f"Triangulation({self.scheme}, {grid} cells, {self.n_simplices} simplices)"


def _cell_triangles(scheme: str, i: int, j: int, v00: int, v10: int, v01: int, v11: int,
                    centre: int):
    if scheme == UNION_JACK:
        return [(v00, v10, centre), (v10, v11, centre), (v11, v01, centre), (v01, v00, centre)]
    if scheme == J1 and (i + j) % 2:
        return [(v00, v10, v01), (v10, v11, v01)]
    return [(v00, v10, v11), (v00, v11, v01)]


def build_grid_triangulation(box: Box, segments: Sequence[int],
                             scheme: str = DIAGONAL) -> Triangulation:
    """
    Triangulate a 1-D or 2-D box on a regular grid

    Args:
        box: Domain of the inputs
        segments: Cells per dimension
        scheme: 'diagonal' (2 triangles per cell, same diagonal everywhere),
            'j1' (2 per cell, diagonals alternating like a chessboard) or
            'union-jack' (4 per cell around a centre vertex); ignored in 1-D

    Raises:
        TriangulationError: On unsupported dimensions or an odd union-jack grid
    """
    segments = tuple(int(k) for k in segments)
    if scheme not in SCHEMES:
        raise ParameterError(f"Unknown triangulation scheme {scheme!r}, expected one of {SCHEMES}")
    if len(segments) != box.dimension:
        raise ParameterError(f"Need one segment count per input, got {segments} for {box}")
    if any(k < 1 for k in segments):
        raise ParameterError("Segment counts must be >= 1")
    if np.any(box.widths <= 0) or not box.is_finite:
        raise ParameterError(f"Cannot triangulate the degenerate box {box}")

    if box.dimension == 1:
        k = segments[0]
        vertices = np.linspace(box.lower[0], box.upper[0], k + 1).reshape(-1, 1)
        simplices = np.column_stack([np.arange(k), np.arange(1, k + 1)])
        return Triangulation(vertices, simplices, box, segments, scheme)

    if box.dimension != 2:
        raise TriangulationError(f"Grid triangulation supports 1 or 2 inputs, got {box.dimension}")
    k1, k2 = segments
    if scheme == UNION_JACK and (k1 % 2 or k2 % 2):
        raise TriangulationError(f"The union-jack scheme needs even cell counts, got {k1}x{k2}")

    xs = np.linspace(box.lower[0], box.upper[0], k1 + 1)
    ys = np.linspace(box.lower[1], box.upper[1], k2 + 1)
    vertices = [(x, y) for x in xs for y in ys]
    simplices = []
    for i in range(k1):
        for j in range(k2):
            v00 = i * (k2 + 1) + j
            v01 = v00 + 1
            v10 = v00 + k2 + 1
            v11 = v10 + 1
            centre = -1
            if scheme == UNION_JACK:
                centre = len(vertices)
                vertices.append(((xs[i] + xs[i + 1]) / 2, (ys[j] + ys[j + 1]) / 2))
            simplices.extend(_cell_triangles(scheme, i, j, v00, v10, v01, v11, centre))
    return Triangulation(np.array(vertices), np.array(simplices), box, segments, scheme)


def fit_vertex_values(tri: Triangulation, data: Dataset, mode: str = LEAST_SQUARES,
                      logger: Optional[logging.Logger] = None) -> Triangulation:
    """
    Set vertex values from data

    'interpolate' samples the piecewise-linear interpolant of the data at the
    vertices; 'least-squares' minimizes the interpolant's SSE over the data
    through the sparse normal equations of the hat-function basis.

    Raises:
        ExtrapolationError: If a vertex lies outside the data's coverage
    """
    logger = logger or logging.getLogger(__name__)
    if mode not in FIT_MODES:
        raise ParameterError(f"Unknown fit mode {mode!r}, expected one of {FIT_MODES}")
    if data.n_inputs != tri.dimension:
        raise ParameterError("Dataset and triangulation differ in input count")

    if mode == INTERPOLATE:
        if tri.dimension == 1:
            order = np.argsort(data.x[:, 0])
            xs, ys = data.x[order, 0], data.y[order]
            outside = (tri.vertices[:, 0] < xs[0]) | (tri.vertices[:, 0] > xs[-1])
            if outside.any():
                raise ExtrapolationError(
                    f"Vertices {np.flatnonzero(outside).tolist()} lie outside the data range"
                )
            values = np.interp(tri.vertices[:, 0], xs, ys)
        else:
            values = LinearNDInterpolator(data.x, data.y)(tri.vertices)
            missing = ~np.isfinite(values)
            if missing.any():
                raise ExtrapolationError(
                    f"Vertices {np.flatnonzero(missing).tolist()} lie outside the data hull"
                )
        return tri.with_values(values)

    basis = tri.basis_matrix(data.x).tocsc()
    normal = (basis.T @ basis).tocsc()
    uncovered = np.flatnonzero(np.asarray(basis.sum(axis=0)).reshape(-1) <= 0)
    if uncovered.size:
        raise ExtrapolationError(
            f"Vertices {uncovered.tolist()} have no data in their support"
        )
    values = np.asarray(spsolve(normal, basis.T @ data.y)).reshape(-1)
    if not np.all(np.isfinite(values)):
        raise ExtrapolationError("Vertex values are not determined by the data")
    fitted = tri.with_values(values)
    logger.info(f"Least-squares vertex fit on {tri}: rmse={triangulation_rmse(fitted, data):.6g}")
    return fitted


def evaluate_simplex(tri: Triangulation, x: np.ndarray):
    """
    Interpolated value at one point (float) or at every row of an array

    Raises:
        DomainError: If a point lies outside the triangulated box
    """
    x = np.asarray(x, dtype=float)
    values = tri.predict(x.reshape(1, -1) if x.ndim <= 1 else x)
    return float(values[0]) if x.ndim <= 1 else values


def triangulation_rmse(tri: Triangulation, data: Dataset) -> float:
    return data.rmse(tri.predict(data.x))
