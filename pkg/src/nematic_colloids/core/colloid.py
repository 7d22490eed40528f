"""
The ε-family of colloidal free energies.

This module builds periodic inclusion lattices and evaluates the functionals
living on them:
- Per-species lattices x = nε + offset with every cell inside the container,
  optionally thinned to realise a piecewise-constant density in [0, 1]
- Occupancy masks of the inclusions on the solver grid
- Surface functionals J_ε (exact mapped quadrature with trilinear field
  interpolation), J̃_ε (field frozen at the centres) and J₀ = ∫ f_hom
- F_ε and F_{ε,γ}: masked volume energy plus ε^{-γ} J_ε, and their
  minimisation
- The constrained limit functional and the upper-bound gap

Inclusions are x + ε^α R(x) P. Surface integrals scale as ε^{3-2α} · ε^{2α},
so every inclusion contributes ε³ times its reference-shape quadrature.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree

from .energy import f_bulk, f_elastic
from .homogenize import HomogenisedPotential, SpeciesSpec, species_fhom
from .shapes import DEFAULT_ORDER
from .solver import (
    Box,
    EnergyFunctional,
    EnergyReport,
    GridSpec,
    MaterialParams,
    MinimizeOptions,
    SurfaceTerm,
    TensorField,
    descend,
    gradient_slots,
)

logger = logging.getLogger("nematic-colloids.colloid")

SURFACE_ORDER = 16
STRONG_ANCHORING_LIMIT = 0.25
_CHUNK = 64

FieldLike = Union[TensorField, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class ColloidConfig:
    """Scaling exponent α, lattice parameter ε and anchoring exponent γ.

    Values outside the dilute window 1 < α < 3/2 or with γ >= 1/4 are
    allowed for exploration and only logged.
    """

    alpha: float
    eps: float
    gamma: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"lattice parameter eps must lie in (0, 1), got {self.eps}")
        if self.gamma < 0.0:
            raise ValueError(f"anchoring exponent gamma must be >= 0, got {self.gamma}")
        if not 1.0 < self.alpha < 1.5:
            logger.warning("alpha = %s is outside the dilute scaling window (1, 3/2)", self.alpha)
        if self.gamma >= STRONG_ANCHORING_LIMIT:
            logger.warning("gamma = %s >= 1/4: no limit behaviour is asserted", self.gamma)

    @property
    def inclusion_scale(self) -> float:
        return float(self.eps**self.alpha)

    @property
    def surface_scale(self) -> float:
        """ε^{3-2α-γ}, the prefactor of the physical surface integrals."""
        return float(self.eps ** (3.0 - 2.0 * self.alpha - self.gamma))

    @property
    def strong_anchoring(self) -> bool:
        return self.gamma > 0.0


@dataclass(frozen=True, eq=False)
class SpeciesLattice:
    """Centres and rotations of one species; all inclusions share `scale`."""

    species: SpeciesSpec
    centres: np.ndarray
    rotations: np.ndarray
    scale: float
    eps: float

    @property
    def count(self) -> int:
        return int(self.centres.shape[0])

    @property
    def measure_weight(self) -> float:
        return float(self.eps**3)

    def surface_nodes(self, start: int, stop: int, order: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Physical points (n, K, 3), inward normals (n, K, 3) and reference weights (K,)."""
        nodes = self.species.shape.nodes(order)
        r = self.rotations[start:stop]
        points = self.centres[start:stop, None, :] + self.scale * np.einsum("nij,kj->nki", r, nodes.points)
        normals = -np.einsum("nij,kj->nki", r, nodes.normals)
        return points, normals, nodes.weights


@dataclass(frozen=True, eq=False)
class InclusionLattice:
    """All species lattices for one ε, with the container they live in."""

    config: ColloidConfig
    container: Box
    species_lattices: Tuple[SpeciesLattice, ...]

    @property
    def species_list(self) -> List[SpeciesSpec]:
        return [s.species for s in self.species_lattices]

    @property
    def counts(self) -> List[int]:
        return [s.count for s in self.species_lattices]

    @property
    def total_count(self) -> int:
        return int(sum(self.counts))

    @property
    def is_empty(self) -> bool:
        return self.total_count == 0

    def separation_constant(self) -> float:
        """min over all centres of (dist(x, ∂Ω) + ½ nearest-centre distance) / ε.

        Nearest neighbours are taken across species, since the shifted
        lattices of different species sit closer than ε to each other.
        """
        centres = [s.centres for s in self.species_lattices if s.count]
        if not centres:
            return float("inf")
        points = np.concatenate(centres)
        dist = self.container.distance_to_boundary(points)
        if len(points) > 1:
            nearest, _ = cKDTree(points).query(points, k=2)
            dist = dist + 0.5 * nearest[:, 1]
        return float(np.min(dist)) / self.config.eps

    def total_surface_area(self, order: int = SURFACE_ORDER) -> float:
        return float(
            sum(s.count * s.scale**2 * s.species.shape.nodes(order).area for s in self.species_lattices)
        )

    def volume_fraction(self, order: int = DEFAULT_ORDER) -> float:
        """Exact occupied fraction Σ N_j ε^{3α} |P_j| / |Ω|."""
        occupied = sum(
            s.count * s.scale**3 * s.species.shape.volume(order) for s in self.species_lattices
        )
        return float(occupied / self.container.volume)

    def measure(self, j: int) -> Tuple[np.ndarray, float]:
        """Atoms and common weight of the empirical measure μ_ε^j = ε³ Σ δ_x."""
        lattice = self.species_lattices[j]
        return lattice.centres, lattice.measure_weight

    def describe(self) -> Dict[str, Any]:
        return {
            "eps": self.config.eps,
            "alpha": self.config.alpha,
            "gamma": self.config.gamma,
            "counts": {s.species.name: s.count for s in self.species_lattices},
            "separation_constant": self.separation_constant(),
            "surface_area": self.total_surface_area(),
        }


def _axis_points(lower: float, upper: float, eps: float, offset: float) -> np.ndarray:
    tol = 1e-12 * max(1.0, abs(lower), abs(upper))
    first = int(np.ceil((lower + 0.5 * eps - offset - tol) / eps))
    last = int(np.floor((upper - 0.5 * eps - offset + tol) / eps))
    if last < first:
        return np.zeros(0)
    return np.arange(first, last + 1) * eps + offset


def lattice_points(container: Box, eps: float, offset: float = 0.0) -> np.ndarray:
    """Points nε + offset·(1,1,1) whose cell y + [-ε/2, ε/2]³ lies in the container."""
    axes = [_axis_points(container.lower[d], container.upper[d], eps, offset) for d in range(3)]
    if any(a.size == 0 for a in axes):
        return np.zeros((0, 3))
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def thin_points(points: np.ndarray, density: np.ndarray) -> np.ndarray:
    """Deterministically keep a fraction v of the points carrying density v.

    Points are visited in order and counted per distinct density value; the
    m-th point with value v is kept when floor((m+1) v) > floor(m v).

    Raises:
        ValueError: If a density exceeds 1
    """
    density = np.asarray(density, dtype=float)
    if np.any(density > 1.0 + 1e-12):
        raise ValueError(
            f"lattice density {float(np.max(density))} exceeds 1: the periodic rule has one site per cell"
        )
    keep = np.zeros(len(points), dtype=bool)
    counters: Dict[float, int] = {}
    for n, v in enumerate(density):
        m = counters.get(float(v), 0)
        keep[n] = np.floor((m + 1) * v + 1e-12) > np.floor(m * v + 1e-12)
        counters[float(v)] = m + 1
    return points[keep]


def _check_disjoint(lattices: Sequence[SpeciesLattice], container: Box) -> None:
    centres, radii = [], []
    for lattice in lattices:
        if lattice.count == 0:
            continue
        r = lattice.scale * lattice.species.shape.bounding_radius
        if np.any(container.distance_to_boundary(lattice.centres) < r):
            raise ValueError(
                f"inclusions of species {lattice.species.name!r} reach outside the container; "
                "reduce the shape scale or alpha"
            )
        centres.append(lattice.centres)
        radii.append(np.full(lattice.count, r))
    if not centres:
        return
    points = np.concatenate(centres)
    radius = np.concatenate(radii)
    pairs = cKDTree(points).query_pairs(2.0 * float(np.max(radius)), output_type="ndarray")
    if len(pairs):
        gap = np.linalg.norm(points[pairs[:, 0]] - points[pairs[:, 1]], axis=-1)
        if np.any(gap <= radius[pairs[:, 0]] + radius[pairs[:, 1]]):
            raise ValueError("inclusions are not pairwise disjoint; reduce the shape scale or alpha")


def build_lattice(
    config: ColloidConfig,
    species_list: Sequence[SpeciesSpec],
    container: Box,
    check_disjoint: bool = True,
) -> InclusionLattice:
    """Periodic inclusion lattice; species j is shifted by (j/J) ε along the diagonal.

    Raises:
        ValueError: If a density exceeds 1 or inclusions overlap
    """
    count = len(species_list)
    lattices = []
    for j, species in enumerate(species_list):
        points = lattice_points(container, config.eps, j * config.eps / max(count, 1))
        if len(points):
            points = thin_points(points, species.density(points))
        rotations = np.array(species.rotation(points)) if len(points) else np.zeros((0, 3, 3))
        lattices.append(
            SpeciesLattice(
                species=species,
                centres=points,
                rotations=rotations,
                scale=config.inclusion_scale,
                eps=config.eps,
            )
        )
    lattice = InclusionLattice(config, container, tuple(lattices))
    if check_disjoint:
        _check_disjoint(lattices, container)
    if species_list and lattice.is_empty:
        logger.warning("eps = %s is too large: no lattice cell fits in the container", config.eps)
    else:
        logger.info(
            "lattice eps=%s: counts %s, surface area %.6e",
            config.eps,
            lattice.counts,
            lattice.total_surface_area(),
        )
    return lattice


@dataclass(frozen=True, eq=False)
class MaskedGrid:
    """Solver grid with a per-node flag for nodes inside some inclusion."""

    grid: GridSpec
    occupied: np.ndarray

    @property
    def unoccupied(self) -> np.ndarray:
        return ~self.occupied

    def weights(self) -> np.ndarray:
        return self.grid.node_weights() * self.unoccupied

    def volume_fraction(self) -> float:
        w = self.grid.node_weights()
        return float(np.sum(w * self.occupied) / np.sum(w))


def occupancy_mask(grid: GridSpec, lattice: InclusionLattice) -> MaskedGrid:
    """Point-in-shape tests of the grid nodes against every placed inclusion."""
    occupied = np.zeros(grid.shape, dtype=bool)
    axes = grid.axes()
    lower = np.asarray(grid.box.lower)
    spacing = grid.spacing
    for species_lattice in lattice.species_lattices:
        shape = species_lattice.species.shape
        reach = species_lattice.scale * shape.bounding_radius
        for centre, rotation in zip(species_lattice.centres, species_lattice.rotations):
            lo = np.maximum(np.floor((centre - reach - lower) / spacing).astype(int), 0)
            hi = np.minimum(np.ceil((centre + reach - lower) / spacing).astype(int) + 1, grid.shape)
            if np.any(hi <= lo):
                continue
            sub = np.meshgrid(*[axes[d][lo[d] : hi[d]] for d in range(3)], indexing="ij")
            points = np.stack(sub, axis=-1)
            local = (points - centre) @ rotation / species_lattice.scale
            inside = shape.contains(local)
            occupied[lo[0] : hi[0], lo[1] : hi[1], lo[2] : hi[2]] |= inside
    return MaskedGrid(grid, occupied)


def interpolation_matrix(grid: GridSpec, points: np.ndarray) -> sparse.csr_matrix:
    """Sparse trilinear interpolation from grid nodes (C order) to points (M, 3)."""
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    shape = np.asarray(grid.shape)
    local = (points - np.asarray(grid.box.lower)) / grid.spacing
    if np.any(local < -1e-9) or np.any(local > shape - 1 + 1e-9):
        raise ValueError("interpolation points lie outside the grid")
    base = np.clip(np.floor(local).astype(int), 0, shape - 2)
    frac = np.clip(local - base, 0.0, 1.0)
    rows, cols, data = [], [], []
    index = np.arange(points.shape[0])
    for corner in range(8):
        bits = np.array([(corner >> 2) & 1, (corner >> 1) & 1, corner & 1])
        weight = np.prod(np.where(bits, frac, 1.0 - frac), axis=-1)
        node = base + bits
        rows.append(index)
        cols.append(np.ravel_multi_index(node.T, grid.shape))
        data.append(weight)
    return sparse.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(points.shape[0], grid.node_count),
    )


def _sampler(field: FieldLike) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(field, TensorField):
        return field.sample
    return lambda points: np.asarray(field(points), dtype=float).reshape(points.shape[:-1] + (5,))


def _raw_surface_sum(field: FieldLike, lattice: InclusionLattice, order: int) -> float:
    sample = _sampler(field)
    total = 0.0
    for species_lattice in lattice.species_lattices:
        surface = species_lattice.species.surface
        for start in range(0, species_lattice.count, _CHUNK):
            points, normals, weights = species_lattice.surface_nodes(start, start + _CHUNK, order)
            q = sample(points.reshape(-1, 3)).reshape(points.shape[:-1] + (5,))
            total += float(np.sum(weights * surface.value(q, normals)))
    return total


def j_eps(field: FieldLike, lattice: InclusionLattice, order: int = SURFACE_ORDER) -> float:
    """ε^{3-2α} Σ_j ∫_{∂P_ε^j} f_s^j(Q, ν) dσ by mapped reference quadrature.

    `field` is a TensorField (sampled trilinearly) or a callable taking
    points (N, 3) to coefficients (N, 5).
    """
    return lattice.config.eps**3 * _raw_surface_sum(field, lattice, order)


def j_tilde_eps(field: FieldLike, lattice: InclusionLattice, order: int = SURFACE_ORDER) -> float:
    """Σ_j ∫ f_hom^j(Q(x), x) dμ_ε^j: the field frozen at each centre."""
    sample = _sampler(field)
    total = 0.0
    for species_lattice in lattice.species_lattices:
        if species_lattice.count == 0:
            continue
        q = sample(species_lattice.centres)
        total += species_lattice.measure_weight * float(
            np.sum(species_fhom(species_lattice.species, q, species_lattice.centres, order))
        )
    return total


def j_zero(
    field: FieldLike,
    species_list: Sequence[SpeciesSpec],
    container: Optional[Box] = None,
    order: int = SURFACE_ORDER,
    volume_order: int = 24,
) -> float:
    """∫_Ω Σ_j ξ_j f_hom^j(Q(x), x) dx.

    Grid fields use the trapezoidal node weights; callables are integrated by
    tensor Gauss-Legendre rules over the container, split on density boxes.
    """
    if isinstance(field, TensorField):
        points = field.grid.coordinates().reshape(-1, 3)
        values = HomogenisedPotential(species_list, order).value(field.values.reshape(-1, 5), points)
        return float(np.sum(field.grid.node_weights().ravel() * values))
    if container is None:
        raise ValueError("a container box is required to integrate a closed-form field")
    sample = _sampler(field)
    total = 0.0
    for species in species_list:
        total += species.density.integrate(
            lambda points, s=species: species_fhom(s, sample(points), points, order),
            container.lower,
            container.upper,
            volume_order,
        )
    return float(total)


class LatticeSurfaceTerm(SurfaceTerm):
    """ε^{3-2α-γ} Σ ∫ f_s(Q, ν) dσ as a function of the node values.

    Surface nodes are fixed, so the trilinear interpolation is one sparse
    matrix per species and the gradient is its transpose applied to ∂f_s/∂Q.
    """

    def __init__(self, lattice: InclusionLattice, grid: GridSpec, order: int = SURFACE_ORDER):
        self.factor = lattice.config.eps ** (3.0 - lattice.config.gamma)
        self.grid = grid
        self.parts = []
        for species_lattice in lattice.species_lattices:
            if species_lattice.count == 0:
                continue
            points, normals, weights = species_lattice.surface_nodes(0, species_lattice.count, order)
            matrix = interpolation_matrix(grid, points.reshape(-1, 3))
            w = np.broadcast_to(weights, points.shape[:-1]).reshape(-1)
            self.parts.append((species_lattice.species.surface, matrix, normals.reshape(-1, 3), w))

    def value_and_gradient(self, values: np.ndarray) -> Tuple[float, np.ndarray]:
        flat = values.reshape(-1, 5)
        energy = 0.0
        grad = np.zeros_like(flat)
        for surface, matrix, normals, weights in self.parts:
            q = matrix @ flat
            energy += float(np.sum(weights * surface.value(q, normals)))
            grad += matrix.T @ (weights[:, None] * surface.grad(q, normals))
        return self.factor * energy, self.factor * grad.reshape(values.shape)


def check_strong_anchoring(lattice: InclusionLattice) -> None:
    """Reject γ > 0 with a surface density that is not bounded below by zero."""
    if not lattice.config.strong_anchoring:
        return
    for species in lattice.species_list:
        if not species.surface.bounded_below:
            raise ValueError(
                f"nonnegative surface density required for strong anchoring (gamma > 0): "
                f"species {species.name!r} has a {species.surface.kind} density that is not bounded below"
            )


def energy_f_eps(
    field: TensorField,
    lattice: InclusionLattice,
    params: MaterialParams,
    order: int = SURFACE_ORDER,
    masked: Optional[MaskedGrid] = None,
) -> EnergyReport:
    """Masked volume energy ∫_{Ω_ε} f_e + f_b plus ε^{-γ} J_ε.

    Raises:
        ValueError: If γ > 0 and a surface density is not bounded below
    """
    check_strong_anchoring(lattice)
    masked = masked or occupancy_mask(field.grid, lattice)
    report = EnergyFunctional(field.grid, params, weights=masked.weights()).report(field.values)
    surface = 0.0
    if not lattice.is_empty:
        surface = lattice.config.eps ** (-lattice.config.gamma) * j_eps(field, lattice, order)
    return EnergyReport(elastic=report.elastic, bulk=report.bulk, surface=surface)


def minimize_f_eps(
    field: TensorField,
    lattice: InclusionLattice,
    params: MaterialParams,
    options: Optional[MinimizeOptions] = None,
    order: int = SURFACE_ORDER,
    masked: Optional[MaskedGrid] = None,
) -> Tuple[TensorField, EnergyReport]:
    """Locally minimise F_ε (or F_{ε,γ}) starting from `field`."""
    check_strong_anchoring(lattice)
    masked = masked or occupancy_mask(field.grid, lattice)
    surface = None if lattice.is_empty else LatticeSurfaceTerm(lattice, field.grid, order)
    functional = EnergyFunctional(field.grid, params, weights=masked.weights(), surface=surface)
    logger.info(
        "minimising F_eps at eps=%s (gamma=%s) on %s grid",
        lattice.config.eps,
        lattice.config.gamma,
        field.grid.shape,
    )
    return descend(functional, field, options or MinimizeOptions())


def energy_constrained(
    field: TensorField,
    params: MaterialParams,
    species_list: Sequence[SpeciesSpec],
    tol: float = 1e-8,
    order: int = SURFACE_ORDER,
) -> float:
    """∫ f_e + f_b on the zero set {∫ f_hom(Q) dx <= tol}, +inf elsewhere."""
    if j_zero(field, species_list, order=order) > tol:
        return float("inf")
    return EnergyFunctional(field.grid, params).report(field.values).total


def upper_bound_gap(
    field: TensorField,
    lattice: InclusionLattice,
    params: MaterialParams,
    masked: Optional[MaskedGrid] = None,
) -> float:
    """Masked minus full-domain volume energy of the same field.

    Nonpositive whenever the elastic and bulk densities are nonnegative.
    """
    masked = masked or occupancy_mask(field.grid, lattice)
    d = gradient_slots(field.values, field.grid.spacing)
    density = f_elastic(d, params.elastic) + f_bulk(field.values, params.bulk)
    return -float(np.sum(field.grid.node_weights() * masked.occupied * density))
