"""
Grid discretisation and minimisation of Q-tensor energies on a box.

This module handles the discrete homogenised functional:
- Box containers and uniform node grids with trapezoidal node weights
- Dirichlet boundary data (constant, uniaxial director fields)
- Q-tensor fields on the grid, with harmonic or constant initialisation
- Finite differences (central inside, one-sided at the ends) and their
  exact adjoints
- Energy reports and exact discrete gradients
- Local minimisation by Armijo gradient descent or L-BFGS

The discrete energy is Σ_n w_n (f_e(D_n) + f_b(Q_n) + f_hom(Q_n, x_n)),
plus an optional surface term supplied by the colloid layer. Only interior
nodes are optimisation variables, so boundary values stay equal to g.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.optimize import minimize as scipy_minimize

from .energy import BulkParams, ElasticParams, f_bulk, f_bulk_grad, f_elastic, f_elastic_grad
from .homogenize import HomogenisedPotential, SpeciesSpec
from .laplace import harmonic_fill
from .qtensor import QTensor, projector_coefficients

logger = logging.getLogger("nematic-colloids.solver")

MIN_RESOLUTION = 4


@dataclass(frozen=True)
class Box:
    """Axis-aligned container [lower, upper]."""

    lower: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    upper: Tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self) -> None:
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        if len(lower) != 3 or len(upper) != 3 or not all(u > l for l, u in zip(lower, upper)):
            raise ValueError(f"invalid container box {lower} .. {upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def extent(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)

    @property
    def volume(self) -> float:
        return float(np.prod(self.extent))

    @property
    def centre(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.lower) + np.asarray(self.upper))

    def distance_to_boundary(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return np.minimum(
            np.min(points - np.asarray(self.lower), axis=-1),
            np.min(np.asarray(self.upper) - points, axis=-1),
        )


@dataclass(frozen=True)
class GridSpec:
    """Uniform node grid on a box, resolution given as node counts per axis."""

    box: Box
    shape: Tuple[int, int, int]

    def __post_init__(self) -> None:
        shape = tuple(int(n) for n in self.shape)
        if len(shape) != 3 or min(shape) < MIN_RESOLUTION:
            raise ValueError(f"grid resolution must be >= {MIN_RESOLUTION} per axis, got {shape}")
        object.__setattr__(self, "shape", shape)

    @classmethod
    def for_spacing(
        cls, box: Box, max_spacing: float, max_resolution: Optional[int] = None
    ) -> "GridSpec":
        """Smallest grid whose spacing does not exceed `max_spacing`, optionally capped."""
        counts = np.ceil(box.extent / max_spacing - 1e-12).astype(int) + 1
        counts = np.maximum(counts, MIN_RESOLUTION)
        if max_resolution is not None and np.any(counts > max_resolution):
            logger.warning(
                "resolution %s capped at %d nodes per axis", counts.tolist(), max_resolution
            )
            counts = np.minimum(counts, max_resolution)
        return cls(box, tuple(int(n) for n in counts))

    @property
    def spacing(self) -> np.ndarray:
        return self.box.extent / (np.asarray(self.shape) - 1)

    @property
    def node_count(self) -> int:
        return int(np.prod(self.shape))

    def axes(self) -> List[np.ndarray]:
        return [
            np.linspace(self.box.lower[d], self.box.upper[d], self.shape[d]) for d in range(3)
        ]

    def coordinates(self) -> np.ndarray:
        grids = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack(grids, axis=-1)

    def node_weights(self) -> np.ndarray:
        """Trapezoidal weights: h per axis, halved at the two end nodes."""
        factors = []
        for d in range(3):
            w = np.full(self.shape[d], self.spacing[d])
            w[0] *= 0.5
            w[-1] *= 0.5
            factors.append(w)
        return np.einsum("i,j,k->ijk", *factors)

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[0, :, :] = mask[-1, :, :] = True
        mask[:, 0, :] = mask[:, -1, :] = True
        mask[:, :, 0] = mask[:, :, -1] = True
        return mask

    def distance_to_boundary(self) -> np.ndarray:
        return self.box.distance_to_boundary(self.coordinates())


class BoundaryData:
    """Bounded Lipschitz Dirichlet data g on the container boundary."""

    kind = "abstract"
    lipschitz = 0.0

    def __call__(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind}


class ConstantBoundary(BoundaryData):
    kind = "constant"

    def __init__(self, q: Any = None):
        if q is None:
            q = np.zeros(5)
        self.q = q.coeffs if isinstance(q, QTensor) else np.asarray(q, float).reshape(5)
        self.lipschitz = 0.0

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points)
        return np.broadcast_to(self.q, points.shape[:-1] + (5,)).copy()

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "q": self.q.tolist()}


class UniaxialBoundary(BoundaryData):
    """g = s (n⊗n - Id/3) for a director field n.

    Directors:
    - "uniform": fixed `direction`
    - "twist": n = (cos kz, sin kz, 0) with k = `wavenumber`
    - "radial": n = (x - centre)/|x - centre|, Lipschitz away from `core_radius`
    """

    kind = "uniaxial"
    DIRECTORS = ("uniform", "twist", "radial")

    def __init__(
        self,
        order: float,
        director: str = "uniform",
        direction: Sequence[float] = (0.0, 0.0, 1.0),
        wavenumber: float = 0.0,
        centre: Sequence[float] = (0.5, 0.5, 0.5),
        core_radius: float = 0.5,
    ):
        if director not in self.DIRECTORS:
            raise ValueError(f"unknown director field {director!r}; expected one of {self.DIRECTORS}")
        self.order = float(order)
        self.director = director
        d = np.asarray(direction, dtype=float)
        if np.linalg.norm(d) == 0.0:
            raise ValueError("director direction must be nonzero")
        self.direction = d / np.linalg.norm(d)
        self.wavenumber = float(wavenumber)
        self.centre = np.asarray(centre, dtype=float)
        if not core_radius > 0.0:
            raise ValueError("radial director needs a positive core radius")
        self.core_radius = float(core_radius)
        if director == "uniform":
            self.lipschitz = 0.0
        elif director == "twist":
            self.lipschitz = 2.0 * abs(self.order * self.wavenumber)
        else:
            self.lipschitz = 2.0 * abs(self.order) / self.core_radius

    def directors(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if self.director == "uniform":
            return np.broadcast_to(self.direction, points.shape).copy()
        if self.director == "twist":
            phase = self.wavenumber * points[..., 2]
            return np.stack([np.cos(phase), np.sin(phase), np.zeros_like(phase)], axis=-1)
        offset = points - self.centre
        norm = np.linalg.norm(offset, axis=-1, keepdims=True)
        return np.where(norm > 0.0, offset / np.where(norm > 0.0, norm, 1.0), self.direction)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.order * projector_coefficients(self.directors(points))

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "order": self.order,
            "director": self.director,
            "direction": self.direction.tolist(),
            "wavenumber": self.wavenumber,
            "centre": self.centre.tolist(),
            "core_radius": self.core_radius,
        }


class TensorField:
    """Q-tensor coefficients on every node of a grid; boundary nodes hold g exactly."""

    def __init__(self, grid: GridSpec, values: np.ndarray, boundary: BoundaryData):
        values = np.array(values, dtype=float)
        if values.shape != grid.shape + (5,):
            raise ValueError(f"field values must have shape {grid.shape + (5,)}, got {values.shape}")
        self.grid = grid
        self.boundary = boundary
        self.boundary_mask = grid.boundary_mask()
        self.boundary_values = boundary(grid.coordinates()[self.boundary_mask])
        values[self.boundary_mask] = self.boundary_values
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        self.values = values

    @classmethod
    def from_boundary(
        cls,
        grid: GridSpec,
        boundary: BoundaryData,
        init: str = "harmonic",
        constant: Optional[np.ndarray] = None,
    ) -> "TensorField":
        """Initialise interior nodes by a harmonic fill of g or by a constant."""
        values = np.zeros(grid.shape + (5,))
        mask = grid.boundary_mask()
        values[mask] = boundary(grid.coordinates()[mask])
        if init == "harmonic":
            values = harmonic_fill(values, ~mask, grid.spacing)
        elif init == "constant":
            values[~mask] = np.zeros(5) if constant is None else np.asarray(constant, float).reshape(5)
        else:
            raise ValueError(f"unknown initialisation {init!r}; expected 'harmonic' or 'constant'")
        return cls(grid, values, boundary)

    def copy(self) -> "TensorField":
        return TensorField(self.grid, self.values.copy(), self.boundary)

    def with_values(self, values: np.ndarray) -> "TensorField":
        return TensorField(self.grid, values, self.boundary)

    def interior_vector(self) -> np.ndarray:
        return self.values[~self.boundary_mask].ravel().copy()

    def with_interior(self, vector: np.ndarray) -> "TensorField":
        values = self.values.copy()
        values[~self.boundary_mask] = np.asarray(vector).reshape(-1, 5)
        return TensorField(self.grid, values, self.boundary)

    def sample(self, points: np.ndarray) -> np.ndarray:
        """Trilinear interpolation of the coefficients at points (..., 3)."""
        points = np.asarray(points, dtype=float)
        interpolator = RegularGridInterpolator(
            tuple(self.grid.axes()), self.values, method="linear", bounds_error=True
        )
        return interpolator(points.reshape(-1, 3)).reshape(points.shape[:-1] + (5,))


@dataclass(frozen=True)
class MaterialParams:
    elastic: ElasticParams
    bulk: BulkParams


@dataclass
class EnergyReport:
    """Energy split with optimiser diagnostics; `total` is the sum of the parts."""

    elastic: float
    bulk: float
    homogenised: float = 0.0
    surface: float = 0.0
    iterations: int = 0
    grad_norm: float = float("nan")
    converged: bool = True
    message: str = ""
    trace: Tuple[float, ...] = ()
    total: float = field(init=False)

    def __post_init__(self) -> None:
        self.total = self.elastic + self.bulk + self.homogenised + self.surface

    def as_dict(self) -> Dict[str, Any]:
        return {
            "elastic": self.elastic,
            "bulk": self.bulk,
            "homogenised": self.homogenised,
            "surface": self.surface,
            "total": self.total,
            "iterations": self.iterations,
            "grad_norm": self.grad_norm,
            "converged": self.converged,
            "message": self.message,
        }


def _along(values: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(values, axis, 0)


def difference(values: np.ndarray, spacing: float, axis: int) -> np.ndarray:
    """Central differences inside, one-sided differences at the two ends."""
    q = _along(values, axis)
    d = np.empty_like(q)
    d[1:-1] = (q[2:] - q[:-2]) / (2.0 * spacing)
    d[0] = (q[1] - q[0]) / spacing
    d[-1] = (q[-1] - q[-2]) / spacing
    return np.moveaxis(d, 0, axis)


def difference_adjoint(grad: np.ndarray, spacing: float, axis: int) -> np.ndarray:
    """Transpose of `difference` along one axis."""
    g = _along(grad, axis)
    r = np.zeros_like(g)
    half = 0.5 / spacing
    r[2:] += half * g[1:-1]
    r[:-2] -= half * g[1:-1]
    r[1] += g[0] / spacing
    r[0] -= g[0] / spacing
    r[-1] += g[-1] / spacing
    r[-2] -= g[-1] / spacing
    return np.moveaxis(r, 0, axis)


def gradient_slots(values: np.ndarray, spacing: Sequence[float]) -> np.ndarray:
    """Discrete ∇Q as gradient slots (..., 3, 5)."""
    return np.stack([difference(values, spacing[k], k) for k in range(3)], axis=-2)


class SurfaceTerm:
    """Protocol for extra energy terms evaluated on raw node values."""

    def value_and_gradient(self, values: np.ndarray) -> Tuple[float, np.ndarray]:
        raise NotImplementedError


class EnergyFunctional:
    """Discrete energy on a grid.

    Volume densities are integrated with node weights, which callers may
    override (occupancy masks); an optional surface term is added as is.
    """

    def __init__(
        self,
        grid: GridSpec,
        params: MaterialParams,
        potential: Optional[HomogenisedPotential] = None,
        weights: Optional[np.ndarray] = None,
        surface: Optional[SurfaceTerm] = None,
    ):
        self.grid = grid
        self.params = params
        self.potential = potential if potential else None
        self.weights = grid.node_weights() if weights is None else np.asarray(weights, dtype=float)
        self.surface = surface
        self.points = grid.coordinates().reshape(-1, 3)

    def _homogenised(self, values: np.ndarray) -> np.ndarray:
        if self.potential is None:
            return np.zeros(self.grid.shape)
        return self.potential.value(values.reshape(-1, 5), self.points).reshape(self.grid.shape)

    def report(self, values: np.ndarray) -> EnergyReport:
        d = gradient_slots(values, self.grid.spacing)
        w = self.weights
        surface = self.surface.value_and_gradient(values)[0] if self.surface is not None else 0.0
        return EnergyReport(
            elastic=float(np.sum(w * f_elastic(d, self.params.elastic))),
            bulk=float(np.sum(w * f_bulk(values, self.params.bulk))),
            homogenised=float(np.sum(w * self._homogenised(values))),
            surface=float(surface),
        )

    def value_and_gradient(self, values: np.ndarray) -> Tuple[float, np.ndarray]:
        spacing = self.grid.spacing
        w = self.weights
        d = gradient_slots(values, spacing)
        energy = np.sum(w * (f_elastic(d, self.params.elastic) + f_bulk(values, self.params.bulk)))
        grad = w[..., None] * f_bulk_grad(values, self.params.bulk)
        slot_grad = w[..., None, None] * f_elastic_grad(d, self.params.elastic)
        for k in range(3):
            grad += difference_adjoint(slot_grad[..., k, :], spacing[k], k)
        if self.potential is not None:
            flat = values.reshape(-1, 5)
            energy += np.sum(w * self.potential.value(flat, self.points).reshape(self.grid.shape))
            grad += w[..., None] * self.potential.grad(flat, self.points).reshape(values.shape)
        if self.surface is not None:
            s_value, s_grad = self.surface.value_and_gradient(values)
            energy += s_value
            grad += s_grad
        return float(energy), grad


@dataclass(frozen=True)
class MinimizeOptions:
    """Optimiser settings; `method` is "lbfgs" or "gradient_descent"."""

    method: str = "lbfgs"
    max_iterations: int = 100_000
    gtol: float = 1e-8
    ftol: float = 1e-15
    memory: int = 10
    armijo: float = 1e-4
    shrink: float = 0.5
    grow: float = 2.0
    initial_step: float = 1.0
    max_backtracks: int = 60

    def __post_init__(self) -> None:
        if self.method not in ("lbfgs", "gradient_descent"):
            raise ValueError(f"unknown minimisation method {self.method!r}")
        if self.max_iterations < 1 or not self.gtol > 0.0:
            raise ValueError("max_iterations must be >= 1 and gtol must be positive")


LINE_SEARCH_FAILURE = "line search failed: landscape flagged nonconvex-stuck"


def descend(
    functional: EnergyFunctional, field: TensorField, options: MinimizeOptions
) -> Tuple[TensorField, EnergyReport]:
    """Minimise `functional` over the interior nodes of `field`."""
    interior = ~field.boundary_mask
    base = field.values.copy()

    def evaluate(x: np.ndarray) -> Tuple[float, np.ndarray]:
        values = base.copy()
        values[interior] = x.reshape(-1, 5)
        energy, grad = functional.value_and_gradient(values)
        return energy, grad[interior].ravel()

    x = field.interior_vector()
    if options.method == "lbfgs":
        x, iterations, converged, message, trace = _lbfgs(evaluate, x, options)
    else:
        x, iterations, converged, message, trace = _gradient_descent(evaluate, x, options)

    result = field.with_interior(x)
    _, grad = evaluate(x)
    grad_norm = float(np.max(np.abs(grad), initial=0.0))
    report = functional.report(result.values)
    report.iterations = iterations
    report.grad_norm = grad_norm
    report.converged = converged and grad_norm < options.gtol
    report.message = message
    report.trace = tuple(trace)
    if not report.converged:
        logger.warning("minimisation stopped without convergence: %s", message)
    return result, report


def _lbfgs(
    evaluate: Callable[[np.ndarray], Tuple[float, np.ndarray]],
    x0: np.ndarray,
    options: MinimizeOptions,
) -> Tuple[np.ndarray, int, bool, str, List[float]]:
    cache: Dict[str, Any] = {}

    def fun(x: np.ndarray) -> Tuple[float, np.ndarray]:
        energy, grad = evaluate(x)
        cache["x"], cache["energy"] = x.copy(), energy
        return energy, grad

    trace = [evaluate(x0)[0]]

    def callback(xk: np.ndarray) -> None:
        if "x" in cache and np.array_equal(cache["x"], xk):
            trace.append(cache["energy"])
        else:
            trace.append(evaluate(xk)[0])

    result = scipy_minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        callback=callback,
        options={
            "maxiter": options.max_iterations,
            "maxfun": 20 * options.max_iterations,
            "gtol": options.gtol,
            "ftol": options.ftol,
            "maxcor": options.memory,
        },
    )
    message = result.message.decode() if isinstance(result.message, bytes) else str(result.message)
    return np.asarray(result.x), int(result.nit), bool(result.success), message, trace


def _gradient_descent(
    evaluate: Callable[[np.ndarray], Tuple[float, np.ndarray]],
    x: np.ndarray,
    options: MinimizeOptions,
) -> Tuple[np.ndarray, int, bool, str, List[float]]:
    energy, grad = evaluate(x)
    trace = [energy]
    step = options.initial_step
    for iteration in range(options.max_iterations):
        if np.max(np.abs(grad), initial=0.0) < options.gtol:
            return x, iteration, True, "gradient tolerance reached", trace
        slope = float(grad @ grad)
        t = step
        for _ in range(options.max_backtracks):
            candidate = x - t * grad
            new_energy, new_grad = evaluate(candidate)
            if new_energy < energy and new_energy <= energy - options.armijo * t * slope:
                break
            t *= options.shrink
        else:
            return x, iteration, False, LINE_SEARCH_FAILURE, trace
        x, energy, grad = candidate, new_energy, new_grad
        trace.append(energy)
        step = t * options.grow
    return x, options.max_iterations, False, "iteration limit reached", trace


def _potential(species_list: Sequence[SpeciesSpec], order: int) -> Optional[HomogenisedPotential]:
    return HomogenisedPotential(species_list, order) if species_list else None


def energy_f0(
    field: TensorField,
    params: MaterialParams,
    species_list: Sequence[SpeciesSpec] = (),
    order: int = 32,
) -> EnergyReport:
    """Discrete homogenised energy ∫ f_e + f_b + f_hom with node weights."""
    return EnergyFunctional(field.grid, params, _potential(species_list, order)).report(field.values)


def energy_grad_f0(
    field: TensorField,
    params: MaterialParams,
    species_list: Sequence[SpeciesSpec] = (),
    order: int = 32,
) -> np.ndarray:
    """Exact gradient of the discrete energy; zero on Dirichlet nodes."""
    functional = EnergyFunctional(field.grid, params, _potential(species_list, order))
    _, grad = functional.value_and_gradient(field.values)
    grad[field.boundary_mask] = 0.0
    return grad


def minimize(
    field: TensorField,
    params: MaterialParams,
    species_list: Sequence[SpeciesSpec] = (),
    options: Optional[MinimizeOptions] = None,
    order: int = 32,
    potential: Optional[HomogenisedPotential] = None,
) -> Tuple[TensorField, EnergyReport]:
    """Locally minimise the discrete homogenised energy from `field`.

    A prepared `potential` (for instance one with its constant dropped)
    replaces the one built from `species_list`.
    """
    options = options or MinimizeOptions()
    functional = EnergyFunctional(
        field.grid, params, potential if potential is not None else _potential(species_list, order)
    )
    logger.info("minimising F0 on %s grid with %s", field.grid.shape, options.method)
    return descend(functional, field, options)
