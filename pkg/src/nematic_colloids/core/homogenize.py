"""
Homogenised potentials and the inverse design of effective-field terms.

This module provides:
- Rotation fields x -> R(x) and number-density fields ξ(x) for species
- Species specifications (shape, rotation, density, anchoring)
- The homogenised potential of one species,
  f_hom^j(Q, x) = ∫_{∂P} f_s(Q, R(x) ν_in) dσ, by direct quadrature
- The density-weighted total f_hom and its Q-gradient
- A vectorised evaluator over node batches for the field solvers
- The Rapini-Papoular closed form on the catalogue assemblies
- Decomposition of a symmetric matrix over the assembly moments and the
  design of colloids whose f_hom carries a prescribed linear term
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.transform import Rotation

from .energy import RapiniPapoular, SphericalQuadratic, SurfaceDensity
from .qtensor import QTensor, SymMatrix, as_matrix, dot
from .shapes import (
    ASSEMBLY_LAYOUT,
    ASSEMBLY_MULTIPLICITY,
    DEFAULT_ORDER,
    Shape,
    assembly,
    assembly_area,
    assembly_moment,
    check_rotation,
    m_k,
    lookup,
)

logger = logging.getLogger("nematic-colloids.homogenize")

GRAM_CONDITION_LIMIT = 1e12
_CHUNK = 256

QLike = Union[QTensor, np.ndarray]


class RotationField:
    """A Lipschitz map from the container to SO(3).

    Constant fields are evaluated once; general fields call `func` on
    point batches of shape (N, 3) and must return (N, 3, 3).
    """

    def __init__(
        self,
        matrix: Optional[np.ndarray] = None,
        func: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        lipschitz: float = 0.0,
        spec: Optional[Dict[str, Any]] = None,
    ):
        if (matrix is None) == (func is None):
            raise ValueError("rotation field needs exactly one of a matrix or a callable")
        self.matrix = None if matrix is None else check_rotation(matrix, proper=True)
        self.func = func
        self.lipschitz = float(lipschitz)
        self.spec = spec or {"kind": "custom"}

    @classmethod
    def identity(cls) -> "RotationField":
        return cls(matrix=np.eye(3), spec={"kind": "identity"})

    @classmethod
    def constant(cls, matrix: np.ndarray) -> "RotationField":
        return cls(matrix=matrix, spec={"kind": "constant", "matrix": np.asarray(matrix).tolist()})

    @classmethod
    def from_rotvec(cls, rotvec: Sequence[float]) -> "RotationField":
        matrix = Rotation.from_rotvec(np.asarray(rotvec, dtype=float)).as_matrix()
        return cls(matrix=matrix, spec={"kind": "constant", "rotvec": list(map(float, rotvec))})

    @classmethod
    def twist(cls, axis: Sequence[float], rate: float) -> "RotationField":
        """Rotation about `axis` by the angle rate · (x · axis)."""
        direction = np.asarray(axis, dtype=float)
        direction = direction / np.linalg.norm(direction)

        def func(points: np.ndarray) -> np.ndarray:
            angles = rate * (np.asarray(points) @ direction)
            return Rotation.from_rotvec(angles[:, None] * direction).as_matrix().reshape(-1, 3, 3)

        return cls(
            func=func,
            lipschitz=abs(rate),
            spec={"kind": "twist", "axis": direction.tolist(), "rate": float(rate)},
        )

    @property
    def is_constant(self) -> bool:
        return self.matrix is not None

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        if self.matrix is not None:
            return np.broadcast_to(self.matrix, (points.shape[0], 3, 3))
        return np.asarray(self.func(points), dtype=float).reshape(-1, 3, 3)

    def check(self, points: np.ndarray, tol: float = 1e-10) -> None:
        """Verify orthogonality and det +1 at sampled points.

        Raises:
            ValueError: If any sampled value is not a rotation
        """
        r = self(points)
        err = np.max(np.abs(np.einsum("nki,nkj->nij", r, r) - np.eye(3)), initial=0.0)
        if err > tol or np.any(np.linalg.det(r) < 0.0):
            raise ValueError(f"rotation field is not SO(3)-valued (orthogonality error {err:.3e})")


@dataclass(frozen=True)
class DensityBox:
    lower: Tuple[float, float, float]
    upper: Tuple[float, float, float]
    value: float


class DensityField:
    """Number density ξ: a base value overridden on axis-aligned boxes.

    Boxes are expected not to overlap; the last listed box wins where they do.
    """

    def __init__(self, value: float = 1.0, boxes: Sequence[DensityBox] = ()):
        self.value = float(value)
        self.boxes = tuple(boxes)
        for v in [self.value] + [b.value for b in self.boxes]:
            if not (np.isfinite(v) and v >= 0.0):
                raise ValueError(f"number density must be finite and nonnegative, got {v}")

    @property
    def is_constant(self) -> bool:
        return not self.boxes

    @property
    def max_value(self) -> float:
        return max([self.value] + [b.value for b in self.boxes])

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        out = np.full(points.shape[:-1], self.value)
        for box in self.boxes:
            inside = np.all((points >= box.lower) & (points <= box.upper), axis=-1)
            out[inside] = box.value
        return out

    def integrate(
        self,
        func: Callable[[np.ndarray], np.ndarray],
        lower: Sequence[float],
        upper: Sequence[float],
        order: int = 24,
    ) -> float:
        """∫ func · ξ dx over the box [lower, upper] by tensor Gauss-Legendre rules."""
        total = self.value * box_quadrature(func, lower, upper, order)
        for box in self.boxes:
            lo = np.maximum(box.lower, lower)
            hi = np.minimum(box.upper, upper)
            if np.all(hi > lo):
                total += (box.value - self.value) * box_quadrature(func, lo, hi, order)
        return float(total)

    def describe(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "boxes": [
                {"lower": list(b.lower), "upper": list(b.upper), "value": b.value}
                for b in self.boxes
            ],
        }


def box_nodes(
    lower: Sequence[float], upper: Sequence[float], order: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre nodes (N, 3) and weights (N,) on a box."""
    x, w = np.polynomial.legendre.leggauss(order)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    half = 0.5 * (upper - lower)
    axes = [half[d] * (x + 1.0) + lower[d] for d in range(3)]
    grids = np.meshgrid(*axes, indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.einsum("i,j,k->ijk", w, w, w).ravel() * float(np.prod(half))
    return points, weights


def box_quadrature(
    func: Callable[[np.ndarray], np.ndarray],
    lower: Sequence[float],
    upper: Sequence[float],
    order: int,
) -> float:
    points, weights = box_nodes(lower, upper, order)
    return float(np.sum(weights * np.asarray(func(points), dtype=float)))


@dataclass(frozen=True, eq=False)
class SpeciesSpec:
    """One inclusion population: shape, orientation rule, density and anchoring."""

    shape: Shape
    surface: SurfaceDensity
    rotation: RotationField = field(default_factory=RotationField.identity)
    density: DensityField = field(default_factory=DensityField)
    name: str = ""

    def __post_init__(self) -> None:
        if not self.name:
            object.__setattr__(self, "name", self.shape.name)


def _coeffs(q: QLike) -> np.ndarray:
    return q.coeffs if isinstance(q, QTensor) else np.asarray(q, dtype=float).reshape(5)


def _inward(species: SpeciesSpec, x: Sequence[float], order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes = species.shape.nodes(order)
    rotation = species.rotation(np.asarray(x, dtype=float).reshape(1, 3))[0]
    return -nodes.normals @ rotation.T, nodes.weights


def f_hom_j(species: SpeciesSpec, q: QLike, x: Sequence[float], order: int = DEFAULT_ORDER) -> float:
    """∫_{∂P} f_s(Q, R(x) ν_in) dσ by direct quadrature over the reference shape."""
    normals, weights = _inward(species, x, order)
    values = species.surface.value(_coeffs(q)[None, :], normals)
    return float(np.sum(weights * values))


def f_hom(
    species_list: Sequence[SpeciesSpec],
    q: QLike,
    x: Sequence[float] = (0.0, 0.0, 0.0),
    order: int = DEFAULT_ORDER,
) -> float:
    """Σ_j ξ_j(x) f_hom^j(Q, x)."""
    point = np.asarray(x, dtype=float).reshape(1, 3)
    total = 0.0
    for species in species_list:
        xi = float(species.density(point)[0])
        if xi != 0.0:
            total += xi * f_hom_j(species, q, x, order)
    return total


def f_hom_grad(
    species_list: Sequence[SpeciesSpec],
    q: QLike,
    x: Sequence[float] = (0.0, 0.0, 0.0),
    order: int = DEFAULT_ORDER,
) -> QTensor:
    """Q-derivative of f_hom, differentiating the density under the integral.

    Raises:
        ValueError: If a custom density carries no derivative
    """
    point = np.asarray(x, dtype=float).reshape(1, 3)
    grad = np.zeros(5)
    coeffs = _coeffs(q)
    for species in species_list:
        xi = float(species.density(point)[0])
        if xi == 0.0:
            continue
        normals, weights = _inward(species, x, order)
        grads = species.surface.grad(coeffs[None, :], normals)
        grad += xi * np.sum(weights[:, None] * grads, axis=0)
    return QTensor(grad)


def species_fhom(
    species: SpeciesSpec,
    q: np.ndarray,
    points: np.ndarray,
    order: int = DEFAULT_ORDER,
    gradient: bool = False,
) -> np.ndarray:
    """Vectorised f_hom^j (or its gradient) at node batches q (N, 5), points (N, 3).

    Densities with a moment reduction use the area and rotated second
    moment of the same quadrature; other densities are summed node by node
    in chunks.
    """
    q = np.asarray(q, dtype=float).reshape(-1, 5)
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    nodes = species.shape.nodes(order)
    surface = species.surface
    if surface.moment_form:
        area = nodes.area
        moment = nodes.moment
        if species.rotation.is_constant:
            r = species.rotation.matrix
            moment = r @ moment @ r.T
        else:
            r = species.rotation(points)
            moment = np.einsum("nij,jk,nlk->nil", r, moment, r)
        if gradient:
            return surface.integrate_moments_grad(q, area, moment)
        return surface.integrate_moments(q, area, moment)

    out = np.empty((q.shape[0], 5) if gradient else q.shape[0])
    inward = -nodes.normals
    for start in range(0, q.shape[0], _CHUNK):
        stop = start + _CHUNK
        r = species.rotation(points[start:stop])
        normals = np.einsum("nij,kj->nki", r, inward)
        if gradient:
            out[start:stop] = surface.integrate_grad(q[start:stop], normals, nodes.weights)
        else:
            out[start:stop] = surface.integrate(q[start:stop], normals, nodes.weights)
    return out


class HomogenisedPotential:
    """Vectorised f_hom over node batches, with an optional constant offset.

    Subtracting `offset` is how callers drop a constant from the potential;
    it is never done implicitly.
    """

    def __init__(
        self,
        species_list: Sequence[SpeciesSpec],
        order: int = DEFAULT_ORDER,
        offset: float = 0.0,
    ):
        self.species_list = list(species_list)
        self.order = order
        self.offset = float(offset)

    def __bool__(self) -> bool:
        return bool(self.species_list) or self.offset != 0.0

    def value(self, q: np.ndarray, points: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float).reshape(-1, 5)
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        total = np.full(q.shape[0], -self.offset)
        for species in self.species_list:
            xi = species.density(points)
            total += xi * species_fhom(species, q, points, self.order)
        return total

    def grad(self, q: np.ndarray, points: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float).reshape(-1, 5)
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        total = np.zeros_like(q)
        for species in self.species_list:
            xi = species.density(points)
            total += xi[:, None] * species_fhom(species, q, points, self.order, gradient=True)
        return total


def closed_form_fhom(k: int, q: QLike, strength: float = 1.0) -> float:
    """Rapini-Papoular f_hom of assembly k in closed form.

    W [(2/3 + tr Q²) σ - 2 tr(Q M)] with the analytic area σ and moment M
    of the assembly as built.
    """
    coeffs = _coeffs(q)
    area = assembly_area(k)
    moment = assembly_moment(k)
    return float(
        strength * ((2.0 / 3.0 + float(coeffs @ coeffs)) * area - 2.0 * dot(QTensor(coeffs), moment))
    )


def gram_matrix() -> np.ndarray:
    basis = [m_k(k) for k in range(1, 7)]
    return np.array([[dot(a, b) for b in basis] for a in basis])


def decompose_in_mk(p: Union[SymMatrix, np.ndarray]) -> np.ndarray:
    """Coefficients a_k with Σ a_k M_k = P, from the Gram system G a = (P·M_k)_k.

    Raises:
        RuntimeError: If the Gram matrix is numerically singular
    """
    gram = gram_matrix()
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > GRAM_CONDITION_LIMIT:
        raise RuntimeError(f"Gram matrix of the assembly moments is singular (cond {cond:.3e})")
    rhs = np.array([dot(as_matrix(p), m_k(k)) for k in range(1, 7)])
    return np.linalg.solve(gram, rhs)


def reconstruct_from_mk(coefficients: Sequence[float]) -> SymMatrix:
    total = SymMatrix.zero()
    for k, a in enumerate(coefficients, start=1):
        total = total + float(a) * m_k(k)
    return total


@dataclass(frozen=True, eq=False)
class DesignComponent:
    """One connected piece of an assembly, used as its own species."""

    shape: Shape
    base_name: str
    translation: Tuple[float, float, float]
    parent: int
    intensity: float
    density: float
    area: float


@dataclass(frozen=True, eq=False)
class DesignSpec:
    """A colloid design realising (a′ - a) tr Q² + W tr(QP) + const.

    Components of assembly k carry Rapini-Papoular strength W·i_k with
    i_k = -a_k/2 and density 1/multiplicity_k; the isotropic species is a
    unit ball with a calibrated spherical-quadratic coefficient.
    """

    target: SymMatrix
    strength: float
    a: float
    a_prime: float
    coefficients: np.ndarray
    components: Tuple[DesignComponent, ...]
    spherical_coefficient: float
    alpha_p: float
    wedge_quadratic: float
    sphere_response: float
    constant_offset: float
    order: int = DEFAULT_ORDER

    def species(self) -> List[SpeciesSpec]:
        out = [
            SpeciesSpec(
                shape=c.shape,
                surface=RapiniPapoular(self.strength * c.intensity),
                density=DensityField(c.density),
                name=f"{c.base_name}@assembly{c.parent}",
            )
            for c in self.components
        ]
        out.append(
            SpeciesSpec(
                shape=lookup("ball"),
                surface=SphericalQuadratic(self.spherical_coefficient),
                name="ball@isotropic",
            )
        )
        return out

    def potential(self, drop_constant: bool = False) -> HomogenisedPotential:
        return HomogenisedPotential(
            self.species(), self.order, self.constant_offset if drop_constant else 0.0
        )

    def total_fhom(self, q: QLike, drop_constant: bool = False) -> float:
        """Total f_hom of the design by direct quadrature."""
        value = f_hom(self.species(), q, (0.0, 0.0, 0.0), self.order)
        return value - self.constant_offset if drop_constant else value

    def target_fhom(self, q: QLike) -> float:
        coeffs = _coeffs(q)
        return float(
            (self.a_prime - self.a) * (coeffs @ coeffs) + self.strength * dot(QTensor(coeffs), self.target)
        )

    @property
    def reconstruction_residual(self) -> float:
        return float(np.max(np.abs(reconstruct_from_mk(self.coefficients).matrix - self.target.matrix)))

    def to_config(self) -> Dict[str, Any]:
        """Run configuration sections that rebuild this design from its target."""
        return {
            "bulk": {"a": self.a},
            "design": {
                "target": self.target.matrix.tolist(),
                "strength": self.strength,
                "a_prime": self.a_prime,
                "order": self.order,
            },
        }

    def species_config(self) -> List[Dict[str, Any]]:
        """Explicit species entries equivalent to this design."""
        species: List[Dict[str, Any]] = []
        for c in self.components:
            species.append(
                {
                    "shape": c.base_name,
                    "translation": list(c.translation),
                    "density": {"value": c.density},
                    "surface": {"kind": "rapini_papoular", "strength": self.strength * c.intensity},
                    "name": f"{c.base_name}@assembly{c.parent}",
                }
            )
        species.append(
            {
                "shape": "ball",
                "surface": {"kind": "spherical_quadratic", "coefficient": self.spherical_coefficient},
                "name": "ball@isotropic",
            }
        )
        return species


def _probe_tensor() -> np.ndarray:
    return np.ones(5) / np.sqrt(5.0)


def design_linear_term(
    p: Union[SymMatrix, np.ndarray],
    strength: float,
    a: float,
    a_prime: float,
    order: int = DEFAULT_ORDER,
) -> DesignSpec:
    """Design species whose total f_hom is (a′ - a) tr Q² + W tr(QP) + const.

    The wedge intensities follow the moment decomposition; the isotropic
    coefficient is calibrated once by quadrature so that the tr Q² part
    matches, and the resulting constant is reported.
    """
    target = p if isinstance(p, SymMatrix) else SymMatrix.from_matrix(np.asarray(p, dtype=float))
    coefficients = decompose_in_mk(target)

    components: List[DesignComponent] = []
    assemblies = {k: assembly(k) for k in ASSEMBLY_LAYOUT}
    for k, layout in ASSEMBLY_LAYOUT.items():
        intensity = -0.5 * float(coefficients[k - 1])
        density = 1.0 / ASSEMBLY_MULTIPLICITY[k]
        for shape, (i, j, sign, offset) in zip(assemblies[k].components, layout):
            components.append(
                DesignComponent(
                    shape=shape,
                    base_name=f"wedge{sign}{i}{j}",
                    translation=offset,
                    parent=k,
                    intensity=intensity,
                    density=density,
                    area=shape.nodes(order).area,
                )
            )

    alpha_p = float(sum(c.density * c.intensity * c.area for c in components))
    wedge_species = [
        SpeciesSpec(
            shape=c.shape,
            surface=RapiniPapoular(strength * c.intensity),
            density=DensityField(c.density),
        )
        for c in components
    ]
    probe = _probe_tensor()
    origin = (0.0, 0.0, 0.0)
    f_plus = f_hom(wedge_species, probe, origin, order)
    f_minus = f_hom(wedge_species, -probe, origin, order)
    f_zero = f_hom(wedge_species, np.zeros(5), origin, order)
    wedge_quadratic = (f_plus + f_minus - 2.0 * f_zero) / (2.0 * float(probe @ probe))

    unit_sphere = SpeciesSpec(shape=lookup("ball"), surface=SphericalQuadratic(1.0))
    sphere_response = f_hom_j(unit_sphere, probe, origin, order) / float(probe @ probe)
    spherical_coefficient = (a_prime - a - wedge_quadratic) / sphere_response

    logger.info(
        "designed %d wedge components, alpha_P=%.6e, spherical coefficient=%.6e",
        len(components),
        alpha_p,
        spherical_coefficient,
    )
    return DesignSpec(
        target=target,
        strength=float(strength),
        a=float(a),
        a_prime=float(a_prime),
        coefficients=coefficients,
        components=tuple(components),
        spherical_coefficient=float(spherical_coefficient),
        alpha_p=alpha_p,
        wedge_quadratic=float(wedge_quadratic),
        sphere_response=float(sphere_response),
        constant_offset=float(f_zero),
        order=order,
    )
