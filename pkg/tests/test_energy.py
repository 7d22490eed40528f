"""
Tests for the elastic, bulk and surface energy densities.
"""
import numpy as np
import pytest

from nematic_colloids.core.energy import (
    BulkParams,
    CustomSurfaceDensity,
    ElasticParams,
    RapiniPapoular,
    SphericalQuadratic,
    elastic_form_matrix,
    f_bulk,
    f_bulk_grad,
    f_elastic,
    f_elastic_grad,
    f_surface,
    kappa_of,
    uniaxial_minimiser,
)
from nematic_colloids.core.qtensor import QTensor, projector_coefficients, sample_coefficients

STEP = 1e-6


def _directional_fd(func, x, direction):
    return (func(x + STEP * direction) - func(x - STEP * direction)) / (2.0 * STEP)


@pytest.mark.parametrize(
    "L1, L2, L3",
    [(0.0, 0.0, 0.0), (1.0, 0.0, -1.5), (1.0, 0.0, 2.5), (1.0, -0.7, 0.0)],
)
def test_elastic_params_coercivity(L1, L2, L3):
    """Test elastic constants outside the coercivity window are rejected."""
    with pytest.raises(ValueError, match="elastic coercivity condition violated"):
        ElasticParams(L1, L2, L3)


def test_elastic_density_is_coercive(rng):
    """Test f_e >= λ |∇Q|² inside the coercivity window."""
    params = ElasticParams(1.0, -0.3, 0.5)
    eigenvalues = np.linalg.eigvalsh(elastic_form_matrix(params))
    assert eigenvalues.min() > 0.0
    d = rng.normal(size=(50, 3, 5))
    values = f_elastic(d, params)
    assert np.all(values >= eigenvalues.min() * np.sum(d * d, axis=(-2, -1)) - 1e-12)


def test_elastic_dirichlet_term():
    """Test L2 = L3 = 0 reduces f_e to L1 |∇Q|²."""
    d = np.arange(15, dtype=float).reshape(3, 5) / 10.0
    assert f_elastic(d, ElasticParams(2.0)) == pytest.approx(2.0 * np.sum(d * d))


def test_elastic_gradient_matches_finite_differences(rng):
    """Test the analytic elastic gradient along random directions."""
    params = ElasticParams(1.0, 0.4, -0.3)
    d = rng.normal(size=(3, 5))
    grad = f_elastic_grad(d, params)
    for _ in range(10):
        direction = rng.normal(size=(3, 5))
        fd = _directional_fd(lambda v: float(f_elastic(v, params)), d, direction)
        assert fd == pytest.approx(np.sum(grad * direction), rel=1e-5, abs=1e-7)


@pytest.mark.parametrize("a, b, c", [(0.5, 0.0, 1.0), (-0.2, 0.5, 1.0), (-1.0, 1.0, 0.5)])
def test_bulk_infimum_is_zero(rng, a, b, c):
    """Test the κ normalisation: f_b >= 0 with equality at the uniaxial minimiser."""
    params = BulkParams(a, b, c)
    samples = sample_coefficients(rng, 2000, max_norm=2.0)
    assert np.min(f_bulk(samples, params)) >= -1e-12
    s = uniaxial_minimiser(a, b, c)
    q_min = s * projector_coefficients(np.array([0.0, 0.0, 1.0]))
    assert f_bulk(q_min, params) == pytest.approx(0.0, abs=1e-12)


def test_kappa_vanishes_for_positive_a():
    """Test κ = 0 when the isotropic state minimises the bulk potential."""
    assert kappa_of(0.5, 0.0, 1.0) == pytest.approx(0.0)
    assert kappa_of(-0.5, 0.0, 1.0) > 0.0


def test_bulk_growth_condition():
    """Test c <= 0 is rejected."""
    with pytest.raises(ValueError, match="bulk growth condition violated"):
        BulkParams(0.5, 0.0, 0.0)


def test_bulk_gradient_matches_finite_differences(rng):
    """Test the analytic bulk gradient along random directions."""
    params = BulkParams(-0.2, 0.7, 1.3)
    q = rng.normal(size=5) * 0.5
    grad = f_bulk_grad(q, params)
    for _ in range(10):
        direction = rng.normal(size=5)
        fd = _directional_fd(lambda v: f_bulk(v, params), q, direction)
        assert fd == pytest.approx(grad @ direction, rel=1e-5, abs=1e-7)
    assert isinstance(f_bulk_grad(QTensor(q), params), QTensor)


def test_rapini_papoular_value():
    """Test W tr(Q - Q_ν)² against the matrix formula."""
    nu = np.array([0.0, 0.6, 0.8])
    q = QTensor(np.array([0.1, -0.3, 0.2, 0.05, -0.1]))
    diff = q.matrix - (np.outer(nu, nu) - np.eye(3) / 3.0)
    assert f_surface(RapiniPapoular(1.5), q, nu) == pytest.approx(1.5 * np.sum(diff * diff))
    assert RapiniPapoular(1.0).bounded_below
    assert not RapiniPapoular(-1.0).bounded_below


def test_spherical_quadratic_value():
    """Test coef/(4π) |Qν|²."""
    nu = np.array([1.0, 0.0, 0.0])
    q = QTensor(np.array([0.2, 0.1, -0.3, 0.4, 0.0]))
    expected = 2.0 / (4.0 * np.pi) * np.sum((q.matrix @ nu) ** 2)
    assert f_surface(SphericalQuadratic(2.0), q, nu) == pytest.approx(expected)


@pytest.mark.parametrize("density", [RapiniPapoular(0.8), SphericalQuadratic(1.7)])
def test_surface_gradients_and_moment_reduction(rng, density):
    """Test surface gradients by finite differences and the moment fast path."""
    normals = rng.normal(size=(40, 3))
    normals /= np.linalg.norm(normals, axis=-1, keepdims=True)
    weights = rng.uniform(size=40)
    q = rng.normal(size=5)
    for k in range(3):
        direction = rng.normal(size=5)
        fd = _directional_fd(lambda v: float(density.value(v, normals[k])), q, direction)
        assert fd == pytest.approx(density.grad(q, normals[k]) @ direction, rel=1e-5, abs=1e-7)
    direct = np.sum(weights * density.value(q[None, :], normals))
    assert float(density.integrate(q, normals, weights)) == pytest.approx(direct, rel=1e-12)
    direct_grad = np.sum(weights[:, None] * density.grad(q[None, :], normals), axis=0)
    np.testing.assert_allclose(density.integrate_grad(q, normals, weights), direct_grad, rtol=1e-10)


def test_custom_density_without_gradient():
    """Test a custom density evaluates and refuses to differentiate without a derivative."""
    density = CustomSurfaceDensity(lambda q, nu: np.sum(q * q, axis=-1), bounded_below=True, name="square")
    assert f_surface(density, np.ones(5), [0.0, 0.0, 1.0]) == pytest.approx(5.0)
    assert density.bounded_below
    with pytest.raises(ValueError, match="no derivative"):
        density.grad(np.ones(5), np.array([0.0, 0.0, 1.0]))


def test_f_surface_rejects_non_unit_normal():
    """Test f_surface validates ν."""
    with pytest.raises(ValueError, match="not unit length"):
        f_surface(RapiniPapoular(1.0), np.zeros(5), [0.0, 0.0, 2.0])
