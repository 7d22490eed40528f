"""
Reference convex bodies and their surface quadrature.

This module provides:
- Boundary patches (spherical and flat polar) with tensor-product
  Gauss-Legendre rules
- Shapes assembled from patches, with area, normal second moment
  ∫ ν⊗ν dσ, volume and point membership
- Affine placement of shapes (rotation, scale, translation)
- The catalogue: the unit ball, the quarter-ball wedges and the six
  assemblies whose moments span the symmetric 3x3 matrices

Conventions:
- Stored normals always point outward from the body
- Wedge "wedge±ij" is {|x| <= 1, ±x_i >= 0, x_j >= 0}; the minus family
  exists only for i < j
- Catalogue names: "ball", "wedge+12" ... "wedge-23", "assembly1" ... "assembly6"
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .qtensor import SymMatrix

logger = logging.getLogger("nematic-colloids.shapes")

DEFAULT_ORDER = 32
ORTHOGONALITY_TOLERANCE = 1e-10


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    if order < 2:
        raise ValueError(f"quadrature order must be >= 2, got {order}")
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def check_rotation(rotation: np.ndarray, proper: bool = False) -> np.ndarray:
    """Validate an orthogonal 3x3 matrix.

    Raises:
        ValueError: If the matrix is not orthogonal within 1e-10, or, when
                    `proper` is set, has determinant other than +1
    """
    r = np.asarray(rotation, dtype=float)
    if r.shape != (3, 3):
        raise ValueError(f"rotation must be 3x3, got shape {r.shape}")
    if np.max(np.abs(r.T @ r - np.eye(3))) > ORTHOGONALITY_TOLERANCE:
        raise ValueError("rotation matrix is not orthogonal")
    if proper and np.linalg.det(r) < 0.0:
        raise ValueError("rotation matrix has determinant -1")
    return r


@dataclass(frozen=True, eq=False)
class Placement:
    """The affine map p -> scale · R p + t."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    scale: float = 1.0
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        rotation = check_rotation(self.rotation).copy()
        translation = np.array(self.translation, dtype=float).reshape(3)
        if not self.scale > 0.0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        rotation.setflags(write=False)
        translation.setflags(write=False)
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)
        object.__setattr__(self, "scale", float(self.scale))

    def apply(self, points: np.ndarray) -> np.ndarray:
        return self.scale * np.asarray(points) @ self.rotation.T + self.translation

    def rotate(self, vectors: np.ndarray) -> np.ndarray:
        return np.asarray(vectors) @ self.rotation.T

    def invert(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points) - self.translation) @ self.rotation / self.scale

    def compose(self, inner: "Placement") -> "Placement":
        """Return self ∘ inner."""
        return Placement(
            rotation=self.rotation @ inner.rotation,
            scale=self.scale * inner.scale,
            translation=self.scale * self.rotation @ inner.translation + self.translation,
        )


@dataclass(frozen=True, eq=False)
class SurfaceNodes:
    """Quadrature nodes on a surface: points, outward unit normals, area weights."""

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray

    @classmethod
    def concatenate(cls, parts: Sequence["SurfaceNodes"]) -> "SurfaceNodes":
        return cls(
            points=np.concatenate([p.points for p in parts]),
            normals=np.concatenate([p.normals for p in parts]),
            weights=np.concatenate([p.weights for p in parts]),
        )

    @property
    def area(self) -> float:
        return float(np.sum(self.weights))

    @property
    def moment(self) -> np.ndarray:
        return np.einsum("k,ki,kj->ij", self.weights, self.normals, self.normals)


class Patch:
    """A smooth parametrised piece of a boundary.

    Subclasses map a parameter rectangle u_range x v_range into reference
    coordinates and report the outward normal and the area Jacobian; the
    patch placement and orientation flag are applied here.
    """

    u_range: Tuple[float, float]
    v_range: Tuple[float, float]
    placement: Placement
    outward: bool

    def _reference(self, u: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        raise NotImplementedError

    def evaluate(self, u: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Position, unit normal and area Jacobian at parameter points."""
        points, normals, jacobian = self._reference(np.asarray(u, float), np.asarray(v, float))
        sign = 1.0 if self.outward else -1.0
        return (
            self.placement.apply(points),
            sign * self.placement.rotate(normals),
            jacobian * self.placement.scale**2,
        )

    def nodes(self, order: int) -> SurfaceNodes:
        x, w = gauss_legendre(order)
        (u0, u1), (v0, v1) = self.u_range, self.v_range
        u = 0.5 * (u1 - u0) * (x + 1.0) + u0
        v = 0.5 * (v1 - v0) * (x + 1.0) + v0
        uu, vv = np.meshgrid(u, v, indexing="ij")
        ww = np.outer(w, w) * 0.25 * (u1 - u0) * (v1 - v0)
        points, normals, jacobian = self.evaluate(uu.ravel(), vv.ravel())
        return SurfaceNodes(points, normals, ww.ravel() * jacobian)

    def moved(self, placement: Placement) -> "Patch":
        return replace(self, placement=placement.compose(self.placement))  # type: ignore[type-var]


@dataclass(frozen=True, eq=False)
class SphericalPatch(Patch):
    """Piece of the unit sphere, x = sinθ cosφ a + sinθ sinφ b + cosθ c.

    The frame columns (a, b, c) are orthonormal; u = θ, v = φ.
    """

    frame: np.ndarray
    u_range: Tuple[float, float]
    v_range: Tuple[float, float]
    placement: Placement = field(default_factory=Placement)
    outward: bool = True

    def _reference(self, u: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        a, b, c = self.frame[:, 0], self.frame[:, 1], self.frame[:, 2]
        st = np.sin(u)[:, None]
        x = st * np.cos(v)[:, None] * a + st * np.sin(v)[:, None] * b + np.cos(u)[:, None] * c
        return x, x.copy(), np.sin(u)


@dataclass(frozen=True, eq=False)
class DiscPatch(Patch):
    """Flat polar piece x = r cosψ a + r sinψ b with a fixed normal; u = r, v = ψ."""

    frame: np.ndarray
    normal: np.ndarray
    u_range: Tuple[float, float]
    v_range: Tuple[float, float]
    placement: Placement = field(default_factory=Placement)
    outward: bool = True

    def _reference(self, u: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        a, b = self.frame[:, 0], self.frame[:, 1]
        x = (u * np.cos(v))[:, None] * a + (u * np.sin(v))[:, None] * b
        normals = np.broadcast_to(np.asarray(self.normal, float), x.shape).copy()
        return x, normals, u.copy()


@dataclass(frozen=True, eq=False)
class BallSector:
    """{|y| <= 1, y·h >= 0 for every h in halfspaces}, mapped by `placement`."""

    halfspaces: np.ndarray
    placement: Placement = field(default_factory=Placement)

    def contains(self, points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        y = self.placement.invert(points)
        inside = np.sum(y * y, axis=-1) <= 1.0 + tol
        for h in np.asarray(self.halfspaces, dtype=float).reshape(-1, 3):
            inside &= y @ h >= -tol
        return inside

    def moved(self, placement: Placement) -> "BallSector":
        return BallSector(self.halfspaces, placement.compose(self.placement))

    @property
    def bounding_radius(self) -> float:
        return float(np.linalg.norm(self.placement.translation) + self.placement.scale)


@dataclass(frozen=True, eq=False)
class Shape:
    """A body given by boundary patches, with membership through convex pieces.

    Assemblies keep their connected components in `components`.
    """

    name: str
    patches: Tuple[Patch, ...]
    regions: Tuple[BallSector, ...]
    components: Tuple["Shape", ...] = ()
    convex: bool = True
    _cache: Dict[int, SurfaceNodes] = field(default_factory=dict, repr=False, compare=False)

    def nodes(self, order: int = DEFAULT_ORDER) -> SurfaceNodes:
        if order < 2:
            raise ValueError(f"quadrature order must be >= 2, got {order}")
        cached = self._cache.get(order)
        if cached is None:
            cached = SurfaceNodes.concatenate([p.nodes(order) for p in self.patches])
            self._cache[order] = cached
        return cached

    @property
    def area(self) -> float:
        return self.nodes().area

    @property
    def moment(self) -> SymMatrix:
        return SymMatrix.from_matrix(self.nodes().moment)

    def volume(self, order: int = DEFAULT_ORDER) -> float:
        nodes = self.nodes(order)
        return float(np.sum(nodes.weights * np.sum(nodes.points * nodes.normals, axis=-1)) / 3.0)

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        inside = np.zeros(points.shape[:-1], dtype=bool)
        for region in self.regions:
            inside |= region.contains(points)
        return inside

    @property
    def bounding_radius(self) -> float:
        """Radius of a ball about the origin that contains the body."""
        return max(region.bounding_radius for region in self.regions)


def quad_surface(
    shape: Shape,
    integrand: Callable[[np.ndarray, np.ndarray], np.ndarray],
    order: int = DEFAULT_ORDER,
) -> float:
    """Integrate `integrand(points, normals)` over the boundary of `shape`.

    The integrand receives node arrays of shape (K, 3) and returns K values.
    """
    nodes = shape.nodes(order)
    values = np.asarray(integrand(nodes.points, nodes.normals), dtype=float)
    return float(np.sum(nodes.weights * values))


def moment_matrix(shape: Shape, order: int = DEFAULT_ORDER) -> SymMatrix:
    """∫ ν⊗ν dσ over the boundary of `shape`."""
    return SymMatrix.from_matrix(shape.nodes(order).moment)


def transform(
    shape: Shape,
    rotation: np.ndarray,
    scale: float = 1.0,
    translation: Optional[Sequence[float]] = None,
) -> Shape:
    """Map a shape by x -> scale · R x + t.

    Raises:
        ValueError: If R is not orthogonal within 1e-10 or scale <= 0
    """
    placement = Placement(
        rotation=rotation,
        scale=scale,
        translation=np.zeros(3) if translation is None else translation,
    )
    return Shape(
        name=shape.name,
        patches=tuple(p.moved(placement) for p in shape.patches),
        regions=tuple(r.moved(placement) for r in shape.regions),
        components=tuple(transform(c, rotation, scale, translation) for c in shape.components),
        convex=shape.convex,
    )


_AXES = np.eye(3)
HALF_PI = 0.5 * np.pi


def unit_ball() -> Shape:
    sphere = SphericalPatch(frame=np.eye(3), u_range=(0.0, np.pi), v_range=(0.0, 2.0 * np.pi))
    return Shape(name="ball", patches=(sphere,), regions=(BallSector(np.zeros((0, 3))),))


def _remaining_axis(i: int, j: int) -> int:
    return ({1, 2, 3} - {i, j}).pop()


def wedge(i: int, j: int, sign: str = "+") -> Shape:
    """The wedge {|x| <= 1, ±x_i >= 0, x_j >= 0}.

    Raises:
        ValueError: For repeated or out-of-range axes, an unknown sign, or
                    the minus family with i > j
    """
    if i not in (1, 2, 3) or j not in (1, 2, 3) or i == j:
        raise ValueError(f"wedge axes must be two distinct values in 1..3, got ({i}, {j})")
    if sign not in ("+", "-"):
        raise ValueError(f"wedge sign must be '+' or '-', got {sign!r}")
    if sign == "-" and i > j:
        raise ValueError(f"wedge-{i}{j} is undefined: the minus family requires i < j")
    a = (1.0 if sign == "+" else -1.0) * _AXES[i - 1]
    b = _AXES[j - 1]
    c = _AXES[_remaining_axis(i, j) - 1]
    sphere = SphericalPatch(
        frame=np.column_stack([a, b, c]), u_range=(0.0, np.pi), v_range=(0.0, HALF_PI)
    )
    face_i = DiscPatch(
        frame=np.column_stack([b, c]), normal=-a, u_range=(0.0, 1.0), v_range=(-HALF_PI, HALF_PI)
    )
    face_j = DiscPatch(
        frame=np.column_stack([a, c]), normal=-b, u_range=(0.0, 1.0), v_range=(-HALF_PI, HALF_PI)
    )
    return Shape(
        name=f"wedge{sign}{i}{j}",
        patches=(sphere, face_i, face_j),
        regions=(BallSector(np.stack([a, b])),),
    )


# (i, j, sign, translation) for each connected component
ASSEMBLY_LAYOUT: Dict[int, Tuple[Tuple[int, int, str, Tuple[float, float, float]], ...]] = {
    1: ((2, 3, "+", (0.0, 0.0, 0.0)), (2, 3, "-", (0.0, -1.0, 0.0))),
    2: ((1, 3, "+", (0.0, 0.0, 0.0)), (1, 3, "-", (-1.0, 0.0, 0.0))),
    3: ((1, 2, "+", (0.0, 0.0, 0.0)), (1, 2, "-", (-1.0, 0.0, 0.0))),
    4: ((1, 2, "+", (0.0, 0.0, 0.0)),),
    5: ((1, 3, "+", (0.0, 0.0, 0.0)),),
    6: ((2, 3, "+", (0.0, 0.0, 0.0)),),
}

# Number of copies of the basis matrix m_k realised by the moment of assembly k.
ASSEMBLY_MULTIPLICITY: Dict[int, int] = {k: len(v) for k, v in ASSEMBLY_LAYOUT.items()}


def _check_k(k: int) -> None:
    if k not in ASSEMBLY_LAYOUT:
        raise ValueError(f"assembly index must be in 1..6, got {k}")


def assembly(k: int) -> Shape:
    """Assembly k: the union of translated wedges, components kept separately."""
    _check_k(k)
    components = []
    for i, j, sign, offset in ASSEMBLY_LAYOUT[k]:
        components.append(transform(wedge(i, j, sign), np.eye(3), 1.0, offset))
    return Shape(
        name=f"assembly{k}",
        patches=tuple(p for c in components for p in c.patches),
        regions=tuple(r for c in components for r in c.regions),
        components=tuple(components),
        convex=len(components) == 1,
    )


def wedge_moment(i: int, j: int, sign: str = "+") -> SymMatrix:
    """Analytic ∫ ν⊗ν dσ over the boundary of wedge±ij."""
    wedge(i, j, sign)  # validates the name
    m = (np.pi / 3.0) * np.eye(3)
    m[i - 1, i - 1] += HALF_PI
    m[j - 1, j - 1] += HALF_PI
    m[i - 1, j - 1] = m[j - 1, i - 1] = (2.0 / 3.0) * (1.0 if sign == "+" else -1.0)
    return SymMatrix.from_matrix(m)


_MK_OFFDIAG = {4: (3, 1, 2), 5: (2, 1, 3), 6: (1, 2, 3)}


def m_k(k: int) -> SymMatrix:
    """The analytic basis matrix M_k.

    M_k = (π/3 + π/2) Id - (π/2) e_k⊗e_k for k = 1..3; for k = 4..6 the
    same expression with the complementary axis plus the 2/3 off-diagonal
    coupling of the remaining pair.

    Raises:
        ValueError: If k is outside 1..6
    """
    _check_k(k)
    if k <= 3:
        axis, pair = k, None
    else:
        axis, i, j = _MK_OFFDIAG[k]
        pair = (i, j)
    m = (np.pi / 3.0 + HALF_PI) * np.eye(3)
    m[axis - 1, axis - 1] -= HALF_PI
    if pair is not None:
        i, j = pair
        m[i - 1, j - 1] = m[j - 1, i - 1] = 2.0 / 3.0
    return SymMatrix.from_matrix(m)


def assembly_moment(k: int) -> SymMatrix:
    """Analytic moment of assembly k as built: multiplicity_k · M_k."""
    _check_k(k)
    return ASSEMBLY_MULTIPLICITY[k] * m_k(k)


def assembly_area(k: int) -> float:
    _check_k(k)
    return 2.0 * np.pi * ASSEMBLY_MULTIPLICITY[k]


_WEDGE_NAME = re.compile(r"^wedge([+-])([123])([123])$")
_ASSEMBLY_NAME = re.compile(r"^assembly([1-6])$")


def catalogue_names() -> List[str]:
    names = ["ball"]
    names += [f"wedge+{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3) if i != j]
    names += [f"wedge-{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3) if i < j]
    names += [f"assembly{k}" for k in range(1, 7)]
    return names


@lru_cache(maxsize=None)
def lookup(name: str) -> Shape:
    """Return the catalogue shape called `name`.

    Raises:
        ValueError: If the name is not in the catalogue
    """
    if name == "ball":
        return unit_ball()
    match = _WEDGE_NAME.match(name)
    if match and name in catalogue_names():
        return wedge(int(match.group(2)), int(match.group(3)), match.group(1))
    match = _ASSEMBLY_NAME.match(name)
    if match:
        return assembly(int(match.group(1)))
    raise ValueError(f"Unknown shape {name!r}; catalogue: {', '.join(catalogue_names())}")


def reference_moment(name: str) -> SymMatrix:
    """Analytic moment matrix of a catalogue shape."""
    lookup(name)
    if name == "ball":
        return (4.0 * np.pi / 3.0) * SymMatrix.identity()
    match = _WEDGE_NAME.match(name)
    if match:
        return wedge_moment(int(match.group(2)), int(match.group(3)), match.group(1))
    return assembly_moment(int(name[len("assembly"):]))


def reference_area(name: str) -> float:
    lookup(name)
    if name == "ball":
        return 4.0 * np.pi
    if _WEDGE_NAME.match(name):
        return 2.0 * np.pi
    return assembly_area(int(name[len("assembly"):]))
