"""
Pointwise energy densities for Q-tensor fields.

This module provides the local ingredients of every functional in the
package:
- Elastic density f_e(∇Q) with its three invariants L1, L2, L3
- Quartic bulk potential f_b(Q) normalised by κ(a, b, c) so that inf f_b = 0
- Surface anchoring densities f_s(Q, ν):
  * Rapini-Papoular, W tr(Q - Q_ν)²
  * spherical quadratic, coef/(4π) ν·Q²ν
  * user supplied callables with their own derivative

Gradients are analytic and live in the same 5-coefficient space as Q, so
the symmetric traceless constraint is structural. All functions accept
arrays with the tensor axes last and broadcast over leading axes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Union

import numpy as np

from .qtensor import (
    BASIS,
    QTensor,
    UnitVector,
    from_matrix,
    projector_coefficients,
    to_matrix,
    trace_q2,
    trace_q3,
    square_deviatoric,
)

logger = logging.getLogger("nematic-colloids.energy")

FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True)
class ElasticParams:
    """Elastic constants L1, L2, L3 of the three-invariant elastic density.

    Construction enforces the coercivity window
    L1 > 0, -L1 < L3 < 2 L1, -(3/5) L1 - (1/10) L3 < L2.
    """

    L1: float = 1.0
    L2: float = 0.0
    L3: float = 0.0

    def __post_init__(self) -> None:
        if not self.L1 > 0.0:
            raise ValueError(f"elastic coercivity condition violated: L1 = {self.L1} must be > 0")
        if not -self.L1 < self.L3 < 2.0 * self.L1:
            raise ValueError(
                f"elastic coercivity condition violated: need -L1 < L3 < 2 L1, got L3 = {self.L3}"
            )
        if not -0.6 * self.L1 - 0.1 * self.L3 < self.L2:
            raise ValueError(
                "elastic coercivity condition violated: need -(3/5) L1 - (1/10) L3 < L2, "
                f"got L2 = {self.L2}"
            )


def _full_gradient(d: np.ndarray) -> np.ndarray:
    # D[..., k, a] -> ∂_k Q_ij as (..., k, i, j)
    return np.einsum("...ka,aij->...kij", d, BASIS)


def f_elastic(d: np.ndarray, p: ElasticParams) -> Union[float, np.ndarray]:
    """Elastic energy density of gradient slots D with shape (..., 3, 5).

    f_e = L1 ∂_k Q_ij ∂_k Q_ij + L2 ∂_j Q_ij ∂_k Q_ik + L3 ∂_j Q_ik ∂_k Q_ij
    """
    g = _full_gradient(np.asarray(d, dtype=float))
    div = np.einsum("...jij->...i", g)
    value = (
        p.L1 * np.sum(g * g, axis=(-3, -2, -1))
        + p.L2 * np.sum(div * div, axis=-1)
        + p.L3 * np.einsum("...jik,...kij->...", g, g)
    )
    return value


def f_elastic_grad(d: np.ndarray, p: ElasticParams) -> np.ndarray:
    """Derivative of f_elastic with respect to the gradient slot coefficients."""
    g = _full_gradient(np.asarray(d, dtype=float))
    div = np.einsum("...jij->...i", g)
    full = 2.0 * p.L1 * g + 2.0 * p.L3 * np.swapaxes(g, -3, -1)
    full = full + 2.0 * p.L2 * np.einsum("...b,ac->...abc", div, np.eye(3))
    return np.einsum("...kij,aij->...ka", full, BASIS)


def elastic_form_matrix(p: ElasticParams) -> np.ndarray:
    """Symmetric 15x15 matrix A with f_e(D) = vec(D)ᵀ A vec(D)."""
    unit = np.eye(15).reshape(15, 3, 5)
    columns = 0.5 * f_elastic_grad(unit, p).reshape(15, 15)
    return 0.5 * (columns + columns.T)


def _uniaxial_profile(s: np.ndarray, a: float, b: float, c: float) -> np.ndarray:
    return (2.0 * a / 3.0) * s**2 - (2.0 * b / 9.0) * s**3 + (4.0 * c / 9.0) * s**4


def _uniaxial_critical_points(a: float, b: float, c: float) -> np.ndarray:
    points = [0.0]
    qa, qb, qc = 16.0 * c / 9.0, -2.0 * b / 3.0, 4.0 * a / 3.0
    disc = qb * qb - 4.0 * qa * qc
    if disc >= 0.0:
        root = np.sqrt(disc)
        points.extend([(-qb - root) / (2.0 * qa), (-qb + root) / (2.0 * qa)])
    return np.array(points)


def uniaxial_minimiser(a: float, b: float, c: float) -> float:
    """Scalar order s minimising the bulk quartic over uniaxial states s(n⊗n - Id/3)."""
    if not c > 0.0:
        raise ValueError(f"bulk growth condition violated: c = {c} must be > 0")
    candidates = _uniaxial_critical_points(a, b, c)
    values = _uniaxial_profile(candidates, a, b, c)
    return float(candidates[int(np.argmin(values))])


def kappa_of(a: float, b: float, c: float) -> float:
    """Normalising constant κ with inf over 𝒮₀ of the bulk quartic equal to zero.

    The minimum is attained on uniaxial states, where the quartic reduces to
    h(s) = (2a/3) s² - (2b/9) s³ + (4c/9) s⁴; κ = -min h.

    Raises:
        ValueError: If c <= 0 (quartic unbounded below)
    """
    s = uniaxial_minimiser(a, b, c)
    return float(-_uniaxial_profile(np.array(s), a, b, c))


@dataclass(frozen=True)
class BulkParams:
    """Bulk coefficients a, b, c and the derived constant κ."""

    a: float
    b: float
    c: float
    kappa: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "kappa", kappa_of(self.a, self.b, self.c))

    @property
    def minimiser_order(self) -> float:
        return uniaxial_minimiser(self.a, self.b, self.c)


def _coefficients(q: Union[QTensor, np.ndarray]) -> np.ndarray:
    return q.coeffs if isinstance(q, QTensor) else np.asarray(q, dtype=float)


def f_bulk(q: Union[QTensor, np.ndarray], p: BulkParams) -> Union[float, np.ndarray]:
    """a tr(Q²) - b tr(Q³) + c tr(Q²)² + κ."""
    coeffs = _coefficients(q)
    t = trace_q2(coeffs)
    value = p.a * t - p.b * trace_q3(coeffs) + p.c * t * t + p.kappa
    return float(value) if np.ndim(value) == 0 else value


def f_bulk_grad(q: Union[QTensor, np.ndarray], p: BulkParams) -> Union[QTensor, np.ndarray]:
    """2a Q - 3b dev(Q²) + 4c tr(Q²) Q."""
    coeffs = _coefficients(q)
    t = trace_q2(coeffs)[..., None]
    grad = 2.0 * p.a * coeffs - 3.0 * p.b * square_deviatoric(coeffs) + 4.0 * p.c * t * coeffs
    return QTensor(grad) if isinstance(q, QTensor) else grad


class SurfaceDensity:
    """Base class for anchoring densities f_s(Q, ν).

    Subclasses implement `value` and `grad` on broadcastable arrays
    q (..., 5) and ν (..., 3). Densities that only see ν through ν⊗ν set
    `moment_form` and implement the reduction of a surface integral to the
    area and second moment of the normals, which the homogenised potential
    uses as its fast path.
    """

    kind = "abstract"
    even = True
    moment_form = False

    @property
    def bounded_below(self) -> bool:
        raise NotImplementedError

    def value(self, q: np.ndarray, nu: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def grad(self, q: np.ndarray, nu: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def integrate(self, q: np.ndarray, normals: np.ndarray, weights: np.ndarray) -> np.ndarray:
        """Σ_k w_k f_s(q, ν_k) with nodes on the second-to-last axis of `normals`."""
        values = self.value(np.asarray(q)[..., None, :], normals)
        return np.sum(weights * values, axis=-1)

    def integrate_grad(
        self, q: np.ndarray, normals: np.ndarray, weights: np.ndarray
    ) -> np.ndarray:
        grads = self.grad(np.asarray(q)[..., None, :], normals)
        return np.sum(np.asarray(weights)[..., None] * grads, axis=-2)

    def integrate_moments(self, q: np.ndarray, area: Any, moment: np.ndarray) -> np.ndarray:
        raise NotImplementedError(f"{self.kind} density has no moment reduction")

    def integrate_moments_grad(self, q: np.ndarray, area: Any, moment: np.ndarray) -> np.ndarray:
        raise NotImplementedError(f"{self.kind} density has no moment reduction")

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind}


class RapiniPapoular(SurfaceDensity):
    """W tr(Q - Q_ν)² = W (tr Q² - 2 tr(Q Q_ν) + 2/3)."""

    kind = "rapini_papoular"
    moment_form = True

    def __init__(self, strength: float):
        self.strength = float(strength)

    @property
    def bounded_below(self) -> bool:
        return self.strength >= 0.0

    def value(self, q: np.ndarray, nu: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        q_nu = projector_coefficients(nu)
        return self.strength * (
            np.sum(q * q, axis=-1) - 2.0 * np.sum(q * q_nu, axis=-1) + 2.0 / 3.0
        )

    def grad(self, q: np.ndarray, nu: np.ndarray) -> np.ndarray:
        return 2.0 * self.strength * (np.asarray(q, dtype=float) - projector_coefficients(nu))

    def integrate(self, q: np.ndarray, normals: np.ndarray, weights: np.ndarray) -> np.ndarray:
        area, moment = _area_and_moment(normals, weights)
        return self.integrate_moments(q, area, moment)

    def integrate_grad(
        self, q: np.ndarray, normals: np.ndarray, weights: np.ndarray
    ) -> np.ndarray:
        area, moment = _area_and_moment(normals, weights)
        return self.integrate_moments_grad(q, area, moment)

    def integrate_moments(self, q: np.ndarray, area: Any, moment: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        m = from_matrix(moment)
        return self.strength * (
            area * (np.sum(q * q, axis=-1) + 2.0 / 3.0) - 2.0 * np.sum(q * m, axis=-1)
        )

    def integrate_moments_grad(self, q: np.ndarray, area: Any, moment: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        return 2.0 * self.strength * (np.asarray(area)[..., None] * q - from_matrix(moment))

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "strength": self.strength}

    def __repr__(self) -> str:
        return f"RapiniPapoular(strength={self.strength!r})"


class SphericalQuadratic(SurfaceDensity):
    """coef/(4π) ν·Q²ν, the density carried by the isotropic calibration species."""

    kind = "spherical_quadratic"
    moment_form = True

    def __init__(self, coefficient: float):
        self.coefficient = float(coefficient)

    @property
    def bounded_below(self) -> bool:
        return self.coefficient >= 0.0

    def value(self, q: np.ndarray, nu: np.ndarray) -> np.ndarray:
        m = to_matrix(q)
        m_nu = np.einsum("...ij,...j->...i", m, np.asarray(nu, dtype=float))
        return (self.coefficient / FOUR_PI) * np.sum(m_nu * m_nu, axis=-1)

    def grad(self, q: np.ndarray, nu: np.ndarray) -> np.ndarray:
        nu = np.asarray(nu, dtype=float)
        m = to_matrix(q)
        n = nu[..., :, None] * nu[..., None, :]
        return (self.coefficient / FOUR_PI) * from_matrix(m @ n + n @ m)

    def integrate(self, q: np.ndarray, normals: np.ndarray, weights: np.ndarray) -> np.ndarray:
        area, moment = _area_and_moment(normals, weights)
        return self.integrate_moments(q, area, moment)

    def integrate_grad(
        self, q: np.ndarray, normals: np.ndarray, weights: np.ndarray
    ) -> np.ndarray:
        area, moment = _area_and_moment(normals, weights)
        return self.integrate_moments_grad(q, area, moment)

    def integrate_moments(self, q: np.ndarray, area: Any, moment: np.ndarray) -> np.ndarray:
        m = to_matrix(q)
        return (self.coefficient / FOUR_PI) * np.einsum("...ij,...jk,...ki->...", m, m, moment)

    def integrate_moments_grad(self, q: np.ndarray, area: Any, moment: np.ndarray) -> np.ndarray:
        m = to_matrix(q)
        return (self.coefficient / FOUR_PI) * from_matrix(m @ moment + moment @ m)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "coefficient": self.coefficient}

    def __repr__(self) -> str:
        return f"SphericalQuadratic(coefficient={self.coefficient!r})"


class CustomSurfaceDensity(SurfaceDensity):
    """A user supplied density.

    `function(q, nu)` and `gradient(q, nu)` must broadcast over leading axes
    like the built-in densities. The caller declares whether the density is
    bounded below by zero and whether it is even in ν.
    """

    kind = "custom"

    def __init__(
        self,
        function: Callable[[np.ndarray, np.ndarray], np.ndarray],
        gradient: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None,
        bounded_below: bool = False,
        even: bool = False,
        name: str = "custom",
    ):
        self.function = function
        self.gradient = gradient
        self._bounded_below = bool(bounded_below)
        self.even = bool(even)
        self.name = name

    @property
    def bounded_below(self) -> bool:
        return self._bounded_below

    def value(self, q: np.ndarray, nu: np.ndarray) -> np.ndarray:
        return np.asarray(self.function(np.asarray(q, dtype=float), np.asarray(nu, dtype=float)))

    def grad(self, q: np.ndarray, nu: np.ndarray) -> np.ndarray:
        if self.gradient is None:
            raise ValueError(f"custom surface density {self.name!r} has no derivative")
        return np.asarray(self.gradient(np.asarray(q, dtype=float), np.asarray(nu, dtype=float)))

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "name": self.name, "bounded_below": self._bounded_below}


def _area_and_moment(normals: np.ndarray, weights: np.ndarray) -> tuple:
    normals = np.asarray(normals, dtype=float)
    weights = np.asarray(weights, dtype=float)
    area = np.sum(weights, axis=-1)
    moment = np.einsum("...k,...ki,...kj->...ij", weights, normals, normals)
    return area, moment


def f_surface(
    s: SurfaceDensity, q: Union[QTensor, np.ndarray], nu: Union[UnitVector, np.ndarray]
) -> float:
    """Evaluate a surface density at one (Q, ν) pair.

    Raises:
        ValueError: If ν is not a unit vector
    """
    unit = nu.array if isinstance(nu, UnitVector) else UnitVector.from_array(nu).array
    return float(s.value(_coefficients(q), unit))
