"""
Tests for the Q-tensor algebra.
"""
import numpy as np
import pytest

from nematic_colloids.core.qtensor import (
    BASIS,
    QTensor,
    SymMatrix,
    UnitVector,
    deviatoric,
    dot,
    from_matrix,
    projector_coefficients,
    q_nu,
    sample_coefficients,
    to_matrix,
    trace_q2,
    trace_q3,
)


def test_basis_is_orthonormal_and_traceless():
    """Test the frozen basis spans the symmetric traceless matrices orthonormally."""
    gram = np.einsum("aij,bij->ab", BASIS, BASIS)
    np.testing.assert_allclose(gram, np.eye(5), atol=1e-14)
    np.testing.assert_allclose(np.trace(BASIS, axis1=1, axis2=2), 0.0, atol=1e-14)
    np.testing.assert_allclose(BASIS, np.swapaxes(BASIS, 1, 2))


def test_matrix_coefficient_conversion(rng):
    """Test to_matrix inverts from_matrix on symmetric traceless input."""
    coeffs = rng.normal(size=(4, 5))
    np.testing.assert_allclose(from_matrix(to_matrix(coeffs)), coeffs, atol=1e-14)


def test_traces_match_matrix_algebra(rng):
    """Test tr Q² and tr Q³ against the matrix products."""
    coeffs = rng.normal(size=5)
    m = to_matrix(coeffs)
    assert trace_q2(coeffs) == pytest.approx(np.trace(m @ m))
    assert trace_q3(coeffs) == pytest.approx(np.trace(m @ m @ m))


def test_q_nu_properties():
    """Test Q_ν is traceless, symmetric and has eigenvalues 2/3, -1/3, -1/3."""
    nu = UnitVector.from_array([1.0, 2.0, 2.0], normalize=True)
    q = q_nu(nu)
    eigenvalues = np.sort(np.linalg.eigvalsh(q.matrix))
    np.testing.assert_allclose(eigenvalues, [-1 / 3, -1 / 3, 2 / 3], atol=1e-14)
    assert q.isclose(q_nu(-nu))


def test_q_nu_rejects_non_unit_vector():
    """Test Q_ν refuses vectors that are not unit length."""
    with pytest.raises(ValueError, match="not unit length"):
        q_nu([1.0, 1.0, 0.0])


def test_projector_coefficients_vectorised():
    """Test projector coefficients on stacked normals agree with q_nu."""
    normals = np.eye(3)
    coeffs = projector_coefficients(normals)
    for k in range(3):
        np.testing.assert_allclose(coeffs[k], q_nu(normals[k]).coeffs)


def test_qtensor_from_matrix_validation():
    """Test QTensor.from_matrix rejects asymmetric and traced matrices."""
    with pytest.raises(ValueError, match="symmetric"):
        QTensor.from_matrix(np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]))
    with pytest.raises(ValueError, match="traceless"):
        QTensor.from_matrix(np.eye(3))


def test_qtensor_arithmetic(rng):
    """Test QTensor addition, scaling and the Frobenius product."""
    a = QTensor(rng.normal(size=5))
    b = QTensor(rng.normal(size=5))
    assert (a + b - b).isclose(a)
    assert (2.0 * a).isclose(a * 2.0)
    assert dot(a, b) == pytest.approx(np.trace(a.matrix @ b.matrix))


def test_symmatrix_and_deviatoric():
    """Test SymMatrix storage and the deviatoric projection."""
    p = np.array([[2.0, 1.0, 0.0], [1.0, 0.0, 0.5], [0.0, 0.5, 1.0]])
    sym = SymMatrix.from_matrix(p)
    np.testing.assert_allclose(sym.matrix, p)
    assert sym.trace == pytest.approx(3.0)
    np.testing.assert_allclose(deviatoric(sym).matrix, p - np.eye(3))
    # tr(QP) only sees the deviatoric part of P
    q = QTensor(np.array([0.3, -0.2, 0.1, 0.0, 0.4]))
    assert dot(q, sym) == pytest.approx(dot(q, deviatoric(sym)))


def test_sample_coefficients_within_ball(rng):
    """Test samples stay inside the requested ball and are reproducible."""
    samples = sample_coefficients(rng, 200, max_norm=3.0)
    assert samples.shape == (200, 5)
    assert np.all(np.linalg.norm(samples, axis=-1) <= 3.0 + 1e-12)
    again = sample_coefficients(np.random.default_rng(7), 5)
    np.testing.assert_array_equal(again, sample_coefficients(np.random.default_rng(7), 5))


def test_unit_vector_axis():
    """Test coordinate axes and invalid indices."""
    np.testing.assert_array_equal(UnitVector.axis(2).array, [0.0, 1.0, 0.0])
    with pytest.raises(ValueError, match="axis index"):
        UnitVector.axis(4)
