"""
Algebra of symmetric traceless 3x3 matrices.

Q-tensors are stored by five coefficients over a frozen orthonormal basis
of the space of symmetric traceless matrices:

- E1 = (e1⊗e1 - e2⊗e2) / sqrt(2)
- E2 = (2 e3⊗e3 - e1⊗e1 - e2⊗e2) / sqrt(6)
- E3 = (e1⊗e2 + e2⊗e1) / sqrt(2)
- E4 = (e1⊗e3 + e3⊗e1) / sqrt(2)
- E5 = (e2⊗e3 + e3⊗e2) / sqrt(2)

Field dumps record this choice as basis id 1. Coefficient arrays keep the
component on their last axis, so the array helpers work on single tensors
and on whole grids alike.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

BASIS_ID = 1
UNIT_TOLERANCE = 1e-12
SYMMETRY_TOLERANCE = 1e-12


def _build_basis() -> np.ndarray:
    basis = np.zeros((5, 3, 3))
    basis[0, 0, 0], basis[0, 1, 1] = 1.0, -1.0
    basis[0] /= np.sqrt(2.0)
    basis[1, 0, 0], basis[1, 1, 1], basis[1, 2, 2] = -1.0, -1.0, 2.0
    basis[1] /= np.sqrt(6.0)
    for slot, (i, j) in zip((2, 3, 4), ((0, 1), (0, 2), (1, 2))):
        basis[slot, i, j] = basis[slot, j, i] = 1.0 / np.sqrt(2.0)
    basis.setflags(write=False)
    return basis


BASIS = _build_basis()


def to_matrix(coeffs: np.ndarray) -> np.ndarray:
    """Expand coefficient arrays (..., 5) into matrices (..., 3, 3)."""
    return np.einsum("...a,aij->...ij", np.asarray(coeffs, dtype=float), BASIS)


def from_matrix(matrix: np.ndarray) -> np.ndarray:
    """Project matrices (..., 3, 3) onto the basis.

    The projection keeps the symmetric traceless part, so it doubles as the
    deviatoric projector for arbitrary square matrices.
    """
    return np.einsum("...ij,aij->...a", np.asarray(matrix, dtype=float), BASIS)


def trace_q2(coeffs: np.ndarray) -> np.ndarray:
    return np.sum(np.square(coeffs), axis=-1)


def trace_q3(coeffs: np.ndarray) -> np.ndarray:
    m = to_matrix(coeffs)
    return np.einsum("...ij,...jk,...ki->...", m, m, m)


def square_deviatoric(coeffs: np.ndarray) -> np.ndarray:
    """Coefficients of dev(Q²)."""
    m = to_matrix(coeffs)
    return from_matrix(m @ m)


def projector_coefficients(normals: np.ndarray) -> np.ndarray:
    """Coefficients of ν⊗ν - Id/3 for unit vectors stacked on the last axis."""
    normals = np.asarray(normals, dtype=float)
    return from_matrix(normals[..., :, None] * normals[..., None, :])


def sample_coefficients(rng: np.random.Generator, count: int, max_norm: float = 1.0) -> np.ndarray:
    """Draw `count` coefficient vectors uniformly from the ball of radius `max_norm`."""
    direction = rng.normal(size=(count, 5))
    direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
    radius = max_norm * rng.uniform(size=(count, 1)) ** (1.0 / 5.0)
    return direction * radius


@dataclass(frozen=True, eq=False)
class QTensor:
    """A symmetric traceless 3x3 matrix held by its five basis coefficients."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=float).reshape(5)
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("QTensor coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zero(cls) -> "QTensor":
        return cls(np.zeros(5))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "QTensor":
        """Build from a full matrix, rejecting non-symmetric or traced input."""
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {matrix.shape}")
        scale = max(1.0, float(np.max(np.abs(matrix))))
        if np.max(np.abs(matrix - matrix.T)) > SYMMETRY_TOLERANCE * scale:
            raise ValueError("Q-tensor matrix must be symmetric")
        if abs(np.trace(matrix)) > SYMMETRY_TOLERANCE * scale:
            raise ValueError("Q-tensor matrix must be traceless")
        return cls(from_matrix(matrix))

    @property
    def matrix(self) -> np.ndarray:
        return to_matrix(self.coeffs)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def isclose(self, other: "QTensor", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=0.0, atol=atol))

    def __add__(self, other: "QTensor") -> "QTensor":
        return QTensor(self.coeffs + other.coeffs)

    def __sub__(self, other: "QTensor") -> "QTensor":
        return QTensor(self.coeffs - other.coeffs)

    def __neg__(self) -> "QTensor":
        return QTensor(-self.coeffs)

    def __mul__(self, factor: float) -> "QTensor":
        return QTensor(float(factor) * self.coeffs)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"QTensor({np.array2string(self.coeffs, precision=6)})"


_SYM_INDEX = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))


@dataclass(frozen=True, eq=False)
class SymMatrix:
    """A symmetric 3x3 matrix stored as (xx, yy, zz, xy, xz, yz)."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=float).reshape(6)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "SymMatrix":
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {matrix.shape}")
        scale = max(1.0, float(np.max(np.abs(matrix))))
        if np.max(np.abs(matrix - matrix.T)) > SYMMETRY_TOLERANCE * scale:
            raise ValueError("matrix is not symmetric")
        return cls(np.array([0.5 * (matrix[i, j] + matrix[j, i]) for i, j in _SYM_INDEX]))

    @classmethod
    def identity(cls) -> "SymMatrix":
        return cls(np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0]))

    @classmethod
    def zero(cls) -> "SymMatrix":
        return cls(np.zeros(6))

    @property
    def matrix(self) -> np.ndarray:
        m = np.empty((3, 3))
        for value, (i, j) in zip(self.entries, _SYM_INDEX):
            m[i, j] = m[j, i] = value
        return m

    @property
    def trace(self) -> float:
        return float(np.sum(self.entries[:3]))

    def isclose(self, other: "SymMatrix", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, rtol=0.0, atol=atol))

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        return SymMatrix(self.entries + other.entries)

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        return SymMatrix(self.entries - other.entries)

    def __mul__(self, factor: float) -> "SymMatrix":
        return SymMatrix(float(factor) * self.entries)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"SymMatrix({np.array2string(self.entries, precision=6)})"


@dataclass(frozen=True)
class UnitVector:
    """A vector of Euclidean length one."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        norm = float(np.sqrt(self.x**2 + self.y**2 + self.z**2))
        if not abs(norm - 1.0) <= UNIT_TOLERANCE:
            raise ValueError(f"vector is not unit length (|v| = {norm!r})")

    @classmethod
    def from_array(cls, values: Iterable[float], normalize: bool = False) -> "UnitVector":
        v = np.asarray(list(values), dtype=float).reshape(3)
        if normalize:
            length = np.linalg.norm(v)
            if length == 0.0:
                raise ValueError("cannot normalize the zero vector")
            v = v / length
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @classmethod
    def axis(cls, k: int) -> "UnitVector":
        """Coordinate axis e_k for k in 1..3."""
        if k not in (1, 2, 3):
            raise ValueError(f"axis index must be 1, 2 or 3, got {k}")
        v = np.zeros(3)
        v[k - 1] = 1.0
        return cls.from_array(v)

    @property
    def array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __neg__(self) -> "UnitVector":
        return UnitVector(-self.x, -self.y, -self.z)


MatrixLike = Union[QTensor, SymMatrix, np.ndarray]


def as_matrix(value: MatrixLike) -> np.ndarray:
    if isinstance(value, (QTensor, SymMatrix)):
        return value.matrix
    matrix = np.asarray(value, dtype=float)
    if matrix.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {matrix.shape}")
    return matrix


def _as_unit_array(nu: Union[UnitVector, Iterable[float]]) -> np.ndarray:
    if isinstance(nu, UnitVector):
        return nu.array
    return UnitVector.from_array(nu).array


def q_nu(nu: Union[UnitVector, Iterable[float]]) -> QTensor:
    """Return ν⊗ν - Id/3 for a unit vector ν.

    Raises:
        ValueError: If ν is not unit length within 1e-12
    """
    return QTensor(projector_coefficients(_as_unit_array(nu)))


def dot(a: MatrixLike, b: MatrixLike) -> float:
    """Frobenius inner product tr(AB) of two symmetric matrices."""
    if isinstance(a, QTensor) and isinstance(b, QTensor):
        return float(np.dot(a.coeffs, b.coeffs))
    return float(np.sum(as_matrix(a) * as_matrix(b)))


def deviatoric(p: MatrixLike) -> QTensor:
    """Return P - (tr P / 3) Id as a QTensor."""
    if isinstance(p, QTensor):
        return p
    return QTensor(from_matrix(as_matrix(p)))
