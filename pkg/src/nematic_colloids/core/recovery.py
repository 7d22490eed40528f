"""
Extension, mollified recovery fields and flat-norm estimates.

- `extend` fills the inclusion interiors harmonically from the surrounding
  unoccupied nodes
- `mollify_recovery` builds the smooth, boundary-preserving approximation
  used for recovery sequences: subtract the harmonic extension G of g,
  convolve the zero-extended remainder with a compact bump of radius σ,
  damp it by min(1, dist(x, ∂Ω)/σ) and add G back
- `flat_norm_estimate` is a seeded lower bound of the dual Lipschitz
  distance between each empirical measure and its density
"""
from __future__ import annotations

import logging
from typing import Optional, Union

import numpy as np
from scipy import ndimage

from .colloid import InclusionLattice, MaskedGrid, j_eps, j_zero, occupancy_mask
from .homogenize import DensityField
from .laplace import harmonic_fill
from .solver import BoundaryData, GridSpec, TensorField, gradient_slots

logger = logging.getLogger("nematic-colloids.recovery")

FLAT_NORM_MODES = 2
FLAT_NORM_TERMS = 3
DEFAULT_RECOVERY_EXPONENT = 0.25


def extend(
    field: TensorField,
    masked: Union[MaskedGrid, InclusionLattice],
) -> TensorField:
    """Harmonic extension E_ε: occupied nodes solved from the unoccupied ones.

    Raises:
        RuntimeError: If the Laplace solve misses its residual tolerance
    """
    if isinstance(masked, InclusionLattice):
        masked = occupancy_mask(field.grid, masked)
    unknown = masked.occupied & ~field.boundary_mask
    if not np.any(unknown):
        return field.copy()
    return field.with_values(harmonic_fill(field.values, unknown, field.grid.spacing))


def extend_boundary_data(grid: GridSpec, boundary: BoundaryData) -> TensorField:
    """The discrete harmonic extension G of g into the container."""
    return TensorField.from_boundary(grid, boundary, init="harmonic")


def bump_kernel(spacing: np.ndarray, sigma: float) -> np.ndarray:
    """Normalised exp(-1/(1-r²)) on the grid offsets with r = |offset|/σ < 1."""
    reach = np.floor(sigma / np.asarray(spacing)).astype(int)
    axes = [np.arange(-n, n + 1) * h for n, h in zip(reach, spacing)]
    grids = np.meshgrid(*axes, indexing="ij")
    r2 = sum(g * g for g in grids) / sigma**2
    kernel = np.zeros_like(r2)
    inside = r2 < 1.0
    kernel[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return kernel / np.sum(kernel)


def mollify_recovery(field: TensorField, sigma: float) -> TensorField:
    """Smooth approximation Q_σ with Q_σ = g on the boundary.

    Raises:
        ValueError: If σ is not in [2h, 1)
    """
    h = float(np.max(field.grid.spacing))
    if not sigma < 1.0:
        raise ValueError(f"mollifier radius sigma must be < 1, got {sigma}")
    if sigma < 2.0 * h * (1.0 - 1e-12):
        raise ValueError(f"mollifier radius sigma = {sigma} is below the grid resolution 2h = {2.0 * h}")
    g = extend_boundary_data(field.grid, field.boundary)
    remainder = field.values - g.values
    remainder[field.boundary_mask] = 0.0
    kernel = bump_kernel(field.grid.spacing, sigma)
    smooth = np.empty_like(remainder)
    for c in range(5):
        smooth[..., c] = ndimage.convolve(remainder[..., c], kernel, mode="constant", cval=0.0)
    cutoff = np.minimum(1.0, field.grid.distance_to_boundary() / sigma)
    return field.with_values(g.values + cutoff[..., None] * smooth)


def _trig_test(rng: np.random.Generator, lower: np.ndarray, extent: np.ndarray):
    modes = rng.integers(-FLAT_NORM_MODES, FLAT_NORM_MODES + 1, size=(FLAT_NORM_TERMS, 3))
    coefficients = rng.normal(size=FLAT_NORM_TERMS)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=FLAT_NORM_TERMS)
    frequencies = 2.0 * np.pi * modes / extent
    # sup |φ| <= Σ|c| and sup |∇φ| <= Σ|c||ω|
    norm = float(np.sum(np.abs(coefficients) * (1.0 + np.linalg.norm(frequencies, axis=-1))))

    def phi(points: np.ndarray) -> np.ndarray:
        arg = (np.asarray(points) - lower) @ frequencies.T + phases
        return np.cos(arg) @ coefficients / norm

    return phi


def flat_norm_estimate(lattice: InclusionLattice, test_count: int = 16, seed: int = 0) -> float:
    """Seeded lower bound of max_j sup_φ |∫ φ dμ_ε^j - ∫ φ ξ^j dx|.

    The first test function is the constant 1; the others are random
    trigonometric polynomials with ‖φ‖∞ + ‖∇φ‖∞ <= 1. The result bounds the
    flat norm from below and is not the flat norm itself.

    Raises:
        ValueError: If test_count < 1
    """
    if test_count < 1:
        raise ValueError(f"flat-norm estimate needs at least one test function, got {test_count}")
    rng = np.random.default_rng(seed)
    box = lattice.container
    lower = np.asarray(box.lower)
    tests = [lambda points: np.ones(np.asarray(points).shape[:-1])]
    tests += [_trig_test(rng, lower, box.extent) for _ in range(test_count - 1)]
    best = 0.0
    for j, species_lattice in enumerate(lattice.species_lattices):
        density: DensityField = species_lattice.species.density
        atoms, weight = lattice.measure(j)
        for phi in tests:
            empirical = weight * float(np.sum(phi(atoms))) if len(atoms) else 0.0
            continuum = density.integrate(phi, box.lower, box.upper)
            best = max(best, abs(empirical - continuum))
    return best


def h1_seminorm(field: TensorField, values: Optional[np.ndarray] = None) -> float:
    values = field.values if values is None else values
    d = gradient_slots(values, field.grid.spacing)
    return float(np.sqrt(np.sum(field.grid.node_weights() * np.sum(d * d, axis=(-2, -1)))))


def l2_norm(field: TensorField, values: Optional[np.ndarray] = None) -> float:
    values = field.values if values is None else values
    return float(np.sqrt(np.sum(field.grid.node_weights() * np.sum(values * values, axis=-1))))


def recovery_rate(
    field: TensorField,
    lattice: InclusionLattice,
    beta: float = DEFAULT_RECOVERY_EXPONENT,
    order: int = 16,
) -> float:
    """|J_ε[Q_σ] - J₀[Q]| / σ with σ = ε^β."""
    sigma = lattice.config.eps**beta
    recovered = mollify_recovery(field, sigma)
    gap = abs(j_eps(recovered, lattice, order) - j_zero(field, lattice.species_list, order=order))
    logger.debug("recovery gap %.6e at sigma %.4f", gap, sigma)
    return gap / sigma
