"""
Rotation and shift machinery that turns rotation parameters into hyperplanes

Conventions:
    - Dimensions are counted as n = (number of inputs) + 1; the last axis is y.
    - Rotation planes are 1-based index pairs (j, k), j < k, in lexicographic order.
    - A basic rotation R(j, k, angle) has R[j,j] = cos, R[j,k] = -sin,
      R[k,j] = sin, R[k,k] = cos and is applied to a basis as B @ R, so the
      new x_j is cos * x_j + sin * x_k.
    - Hyperplane coefficients a = [a_0, a_1, ..., a_n] satisfy [1, p] . a = 0.
"""
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import (
    DegeneratePlaneError, InvalidDimensionError, ParameterError
)

Plane = Tuple[int, int]

ORTHONORMAL_TOLERANCE = 1e-10
VERTICAL_TOLERANCE = 1e-12


def _frozen(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


def basic_rotation_planes(n: int) -> List[Plane]:
    """
    All basic rotation planes of n-space in lexicographic order

    Raises:
        InvalidDimensionError: If n < 2
    """
    if n < 2:
        raise InvalidDimensionError(f"Rotations need at least 2 dimensions, got {n}")
    return list(combinations(range(1, n + 1), 2))


def interface_planes(n: int) -> List[Plane]:
    """Planes spanned by pairs of x_2 ... x_{n-1}, y (the second transformation)"""
    if n < 2:
        raise InvalidDimensionError(f"Rotations need at least 2 dimensions, got {n}")
    return list(combinations(range(2, n + 1), 2))


def rotation_matrix(n: int, plane: Plane, angle: float) -> np.ndarray:
    """Basic rotation by `angle` radians in the (j, k) plane of n-space"""
    j, k = plane
    if not (1 <= j < k <= n):
        raise ParameterError(f"Invalid rotation plane {plane} for n={n}")
    rot = np.eye(n)
    c, s = math.cos(angle), math.sin(angle)
    rot[j - 1, j - 1] = c
    rot[j - 1, k - 1] = -s
    rot[k - 1, j - 1] = s
    rot[k - 1, k - 1] = c
    return rot


def compose_rotations(n: int, angles: Sequence[float], planes: Sequence[Plane]) -> np.ndarray:
    """Product R_1 @ R_2 @ ... of basic rotations in the listed order"""
    if len(angles) != len(planes):
        raise ParameterError(
            f"Got {len(angles)} angles for {len(planes)} rotation planes"
        )
    result = np.eye(n)
    for angle, plane in zip(angles, planes):
        if angle != 0.0:
            result = result @ rotation_matrix(n, plane, float(angle))
    return result


@dataclass(frozen=True)
class Basis:
    """Orthonormal basis [x_1, ..., x_{n-1}, y] (columns) anchored at an origin"""
    vectors: np.ndarray
    origin: np.ndarray

    def __post_init__(self):
        vectors = np.array(self.vectors, dtype=float)
        origin = np.array(self.origin, dtype=float)
        if vectors.ndim != 2 or vectors.shape[0] != vectors.shape[1]:
            raise ParameterError(f"Basis must be square, got shape {vectors.shape}")
        if origin.shape != (vectors.shape[0],):
            raise ParameterError("Basis origin does not match basis dimension")
        vectors.setflags(write=False)
        origin.setflags(write=False)
        object.__setattr__(self, 'vectors', vectors)
        object.__setattr__(self, 'origin', origin)

    @classmethod
    def identity(cls, n: int) -> 'Basis':
        if n < 2:
            raise InvalidDimensionError(f"Basis needs at least 2 dimensions, got {n}")
        return cls(np.eye(n), np.zeros(n))

    @property
    def dimension(self) -> int:
        return self.vectors.shape[0]

    def vector(self, index: int) -> np.ndarray:
        """1-based basis vector (index n is y)"""
        return self.vectors[:, index - 1].copy()

    def shifted(self, direction: np.ndarray, distance: float) -> 'Basis':
        return Basis(self.vectors, self.origin + np.asarray(direction) * distance)

    def is_orthonormal(self, tolerance: float = ORTHONORMAL_TOLERANCE) -> bool:
        gram = self.vectors.T @ self.vectors
        return bool(np.allclose(gram, np.eye(self.dimension), atol=tolerance, rtol=0.0))

    def is_proper(self, tolerance: float = ORTHONORMAL_TOLERANCE) -> bool:
        return abs(np.linalg.det(self.vectors) - 1.0) <= tolerance


@dataclass(frozen=True)
class Hyperplane:
    """Plane {p : [1, p] . coefs = 0} with a unit-norm normal part"""
    coefs: np.ndarray

    def __post_init__(self):
        coefs = np.array(self.coefs, dtype=float)
        if coefs.ndim != 1 or coefs.size < 3:
            raise ParameterError(f"Hyperplane needs at least 3 coefficients, got {coefs.shape}")
        coefs.setflags(write=False)
        object.__setattr__(self, 'coefs', coefs)

    @property
    def dimension(self) -> int:
        return self.coefs.size - 1

    @property
    def offset(self) -> float:
        return float(self.coefs[0])

    @property
    def normal(self) -> np.ndarray:
        return self.coefs[1:].copy()

    def residual(self, points: np.ndarray) -> np.ndarray:
        """[1, p] . a for one point or an (N, n) array of points"""
        points = np.asarray(points, dtype=float)
        return self.coefs[0] + points @ self.coefs[1:]

    def negated(self) -> 'Hyperplane':
        return Hyperplane(-self.coefs)

    def mirrored(self) -> 'Hyperplane':
        """Image of the plane under y -> -y, rescaled so that a_n keeps its sign"""
        return Hyperplane(np.concatenate([-self.coefs[:-1], self.coefs[-1:]]))

    def flipped_y(self) -> 'Hyperplane':
        """Image of the plane under y -> -y without sign normalization"""
        return Hyperplane(np.concatenate([self.coefs[:-1], -self.coefs[-1:]]))

    def __str__(self):
        return f"Hyperplane({np.array2string(self.coefs, precision=6)})"


def rotate(basis: Basis, angles: Sequence[float], planes: Sequence[Plane]) -> Basis:
    """
    Apply basic rotations to a basis

    Args:
        basis: Basis to rotate
        angles: Rotation angles in radians, one per plane
        planes: Rotation planes, applied in the listed order

    Returns:
        Basis: vectors @ R_1 @ R_2 @ ..., same origin

    Raises:
        ParameterError: If angles and planes differ in length
    """
    rot = compose_rotations(basis.dimension, angles, planes)
    return Basis(basis.vectors @ rot, basis.origin)


def plane_coefficients(normal: np.ndarray, origin: np.ndarray,
                       model_plane: bool = True) -> Hyperplane:
    """
    Coefficients of the plane through `origin` with the given normal

    Args:
        normal: Plane normal (any nonzero length)
        origin: A point on the plane
        model_plane: Normalize the sign so that a_n > 0 (approximation planes);
            the interface keeps the orientation of its normal

    Raises:
        DegeneratePlaneError: On a zero normal, or a model plane that is vertical in y
    """
    normal = np.asarray(normal, dtype=float)
    origin = np.asarray(origin, dtype=float)
    if normal.shape != origin.shape:
        raise ParameterError("Normal and origin must have the same dimension")
    length = float(np.linalg.norm(normal))
    if not np.isfinite(length) or length == 0.0:
        raise DegeneratePlaneError("Plane normal is zero")
    coefs = np.concatenate([[-float(origin @ normal)], normal]) / length
    if model_plane:
        if abs(coefs[-1]) <= VERTICAL_TOLERANCE:
            raise DegeneratePlaneError("Model plane is vertical in y (a_n = 0)")
        if coefs[-1] < 0:
            coefs = -coefs
    return Hyperplane(coefs)


@dataclass(frozen=True)
class RotationParams:
    """
    Generator of a piecewise-convex model

    r1 holds one angle per basic rotation plane of n-space, r2 one row of
    angles per pair (planes among x_2 ... x_{n-1}, y); s1 and s2 are shifts in
    model units; r3_minus / r3_plus rotate each pair's planes in the x_1-y plane.
    """
    r1: np.ndarray
    s1: float
    r2: np.ndarray
    s2: np.ndarray
    r3_minus: np.ndarray
    r3_plus: np.ndarray

    def __post_init__(self):
        r1 = _frozen(self.r1).reshape(-1)
        s2 = _frozen(self.s2).reshape(-1)
        pairs = s2.size
        if pairs < 1:
            raise ParameterError("RotationParams needs at least one plane pair")
        r3_minus = _frozen(self.r3_minus).reshape(-1)
        r3_plus = _frozen(self.r3_plus).reshape(-1)
        if r3_minus.size != pairs or r3_plus.size != pairs:
            raise ParameterError("r3 angles must have one entry per pair")

        n = _dimension_from_angle_count(r1.size)
        expected = len(interface_planes(n))
        r2 = np.array(self.r2, dtype=float)
        if r2.size == 0 and expected == 0:
            r2 = np.zeros((pairs, 0))
        elif r2.size != pairs * expected:
            raise ParameterError(
                f"r2 must hold {expected} angles per pair for n={n}, got shape {r2.shape}"
            )
        else:
            r2 = r2.reshape(pairs, expected)
        r2.setflags(write=False)

        object.__setattr__(self, 'r1', r1)
        object.__setattr__(self, 's1', float(self.s1))
        object.__setattr__(self, 'r2', r2)
        object.__setattr__(self, 's2', s2)
        object.__setattr__(self, 'r3_minus', r3_minus)
        object.__setattr__(self, 'r3_plus', r3_plus)

    @property
    def dimension(self) -> int:
        return _dimension_from_angle_count(self.r1.size)

    @property
    def n_pairs(self) -> int:
        return self.s2.size

    @property
    def n_hyp(self) -> int:
        return 2 * self.n_pairs

    @classmethod
    def zeros(cls, n: int, n_hyp: int) -> 'RotationParams':
        if n_hyp < 2 or n_hyp % 2:
            raise ParameterError(f"Plane count must be even and >= 2, got {n_hyp}")
        pairs = n_hyp // 2
        return cls(
            r1=np.zeros(len(basic_rotation_planes(n))),
            s1=0.0,
            r2=np.zeros((pairs, len(interface_planes(n)))),
            s2=np.zeros(pairs),
            r3_minus=np.zeros(pairs),
            r3_plus=np.zeros(pairs),
        )

    def replace(self, **changes) -> 'RotationParams':
        values = {
            'r1': self.r1, 's1': self.s1, 'r2': self.r2, 's2': self.s2,
            'r3_minus': self.r3_minus, 'r3_plus': self.r3_plus,
        }
        values.update(changes)
        return RotationParams(**values)


def _dimension_from_angle_count(count: int) -> int:
    # count = n (n - 1) / 2
    n = int(round((1 + math.sqrt(1 + 8 * count)) / 2))
    if n < 2 or n * (n - 1) // 2 != count:
        raise ParameterError(f"{count} angles do not match any C(n, 2)")
    return n


@dataclass(frozen=True)
class TransformTrace:
    """Intermediate results of the three transformations"""
    interface_basis: Basis
    pair_bases: List[Basis] = field(default_factory=list)
    lower_normals: List[np.ndarray] = field(default_factory=list)
    upper_normals: List[np.ndarray] = field(default_factory=list)

    @property
    def pair_origins(self) -> List[np.ndarray]:
        return [basis.origin for basis in self.pair_bases]


def trace_transformations(params: RotationParams, n: Optional[int] = None) -> TransformTrace:
    """Run the three transformations and keep every intermediate basis"""
    n = params.dimension if n is None else n
    if n != params.dimension:
        raise ParameterError(
            f"RotationParams are sized for n={params.dimension}, not n={n}"
        )

    # Transformation 1: rotate, then shift along the new x_1
    basis = rotate(Basis.identity(n), params.r1, basic_rotation_planes(n))
    basis = basis.shifted(basis.vector(1), params.s1)

    pair_planes = interface_planes(n)
    trace = TransformTrace(interface_basis=basis)
    for i in range(params.n_pairs):
        # Transformation 2: rotate within the interface, shift along the new y
        pair_basis = rotate(basis, params.r2[i], pair_planes)
        pair_basis = pair_basis.shifted(pair_basis.vector(n), float(params.s2[i]))
        trace.pair_bases.append(pair_basis)

        # Transformation 3: tilt each side in the x_1-y plane
        for angle, normals in ((params.r3_minus[i], trace.lower_normals),
                               (params.r3_plus[i], trace.upper_normals)):
            tilted = rotate(pair_basis, [angle], [(1, n)])
            normals.append(tilted.vector(n))
    return trace


def params_to_hyperplanes(params: RotationParams, n: Optional[int] = None
                          ) -> Tuple[List[Hyperplane], List[Hyperplane], Hyperplane]:
    """
    Convert rotation parameters to plane coefficients

    Returns:
        (lower planes, upper planes, interface)

    Raises:
        DegeneratePlaneError: If a model plane ends up vertical in y
    """
    trace = trace_transformations(params, n)
    interface = plane_coefficients(trace.interface_basis.vector(1),
                                   trace.interface_basis.origin, model_plane=False)
    lower, upper = [], []
    for i, origin in enumerate(trace.pair_origins):
        try:
            lower.append(plane_coefficients(trace.lower_normals[i], origin))
            upper.append(plane_coefficients(trace.upper_normals[i], origin))
        except DegeneratePlaneError as e:
            raise DegeneratePlaneError(f"Pair {i}: {e}") from e
    return lower, upper, interface


def alignment_angles(target: np.ndarray, pivot: int, partners: Sequence[int],
                     planes: Sequence[Plane]) -> np.ndarray:
    """
    Angles that rotate basis vector `pivot` onto `target`

    Only the planes joining the pivot with one partner get a nonzero angle;
    every other plane in `planes` stays at zero. The chain is inverted one
    plane at a time, starting from the outermost rotation.

    Args:
        target: Unit vector in basis coordinates, zero outside pivot and partners
        pivot: 1-based index of the vector being aligned
        partners: 1-based indices the pivot may be mixed with
        planes: The ordered rotation planes the angles refer to

    Returns:
        np.ndarray: One angle per entry of `planes`
    """
    u = np.array(target, dtype=float)
    norm = float(np.linalg.norm(u))
    if norm == 0.0:
        raise ParameterError("Cannot align to a zero vector")
    u /= norm
    allowed = set(partners) | {pivot}
    stray = [i for i in range(1, u.size + 1) if i not in allowed and abs(u[i - 1]) > 1e-12]
    if stray:
        raise ParameterError(f"Target has components outside the rotation chain: {stray}")

    angles = np.zeros(len(planes))
    p = pivot - 1
    for index, (j, k) in enumerate(planes):
        if pivot not in (j, k):
            continue
        other = k if j == pivot else j
        if other not in partners:
            continue
        o = other - 1
        if j == pivot:
            theta = math.atan2(u[o], u[p])
        else:
            theta = math.atan2(-u[o], u[p])
        u[p] = math.hypot(u[o], u[p])
        u[o] = 0.0
        angles[index] = theta
    return angles


def interface_angles(normal: np.ndarray) -> np.ndarray:
    """First-transformation angles whose rotated x_1 equals `normal`"""
    normal = np.asarray(normal, dtype=float)
    n = normal.size
    return alignment_angles(normal, 1, range(2, n + 1), basic_rotation_planes(n))


def convex_to_params(planes: Sequence[Hyperplane], normal: np.ndarray, s1: float,
                     r1: Optional[np.ndarray] = None) -> RotationParams:
    """
    Embed planes into rotation parameters with identical sides

    Every plane i becomes pair i (lower_i = upper_i) around the interface with
    unit normal `normal` at signed distance `s1` from the origin.

    Args:
        planes: Model planes with a_n > 0
        normal: Interface normal in n-space
        s1: Interface shift
        r1: First-transformation angles (derived from `normal` if None)
    """
    normal = np.asarray(normal, dtype=float)
    n = normal.size
    if r1 is None:
        r1 = interface_angles(normal)
    basis = rotate(Basis.identity(n), r1, basic_rotation_planes(n))
    x1 = basis.vector(1)
    origin = x1 * s1
    pair_planes = interface_planes(n)

    r2, s2, r3 = [], [], []
    for i, plane in enumerate(planes):
        if plane.dimension != n:
            raise ParameterError("Plane dimension does not match the interface")
        m = plane.normal / np.linalg.norm(plane.normal)
        alpha = float(m @ x1)
        along = m - alpha * x1
        beta = float(np.linalg.norm(along))
        if beta <= VERTICAL_TOLERANCE:
            raise DegeneratePlaneError(f"Plane {i} is parallel to the interface")
        along /= beta
        coords = basis.vectors.T @ along
        coords[0] = 0.0
        angles = alignment_angles(coords, n, range(2, n), pair_planes)
        reached = compose_rotations(n, angles, pair_planes)[:, n - 1]
        if reached @ coords < 0:
            # no partner axes (n = 2): the chain can only reach +y
            along, beta = -along, -beta
        r2.append(angles)
        s2.append(-(plane.offset / np.linalg.norm(plane.normal) + float(m @ origin)) / beta)
        r3.append(math.atan2(-alpha, beta))

    return RotationParams(
        r1=r1, s1=s1,
        r2=np.array(r2).reshape(len(planes), len(pair_planes)),
        s2=np.array(s2), r3_minus=np.array(r3), r3_plus=np.array(r3),
    )
