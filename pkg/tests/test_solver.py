"""
Tests for grids, fields, the discrete energy and the minimisers.
"""
import numpy as np
import pytest

from nematic_colloids.core.energy import BulkParams, ElasticParams, RapiniPapoular
from nematic_colloids.core.homogenize import SpeciesSpec, design_linear_term
from nematic_colloids.core.qtensor import deviatoric, projector_coefficients
from nematic_colloids.core.shapes import lookup
from nematic_colloids.core.solver import (
    Box,
    ConstantBoundary,
    EnergyFunctional,
    EnergyReport,
    GridSpec,
    MaterialParams,
    MinimizeOptions,
    TensorField,
    UniaxialBoundary,
    difference,
    difference_adjoint,
    energy_f0,
    energy_grad_f0,
    minimize,
)


@pytest.fixture
def params():
    """Fixture providing material parameters with a nematic bulk."""
    return MaterialParams(ElasticParams(1.0, 0.2, 0.1), BulkParams(-0.3, 0.5, 1.0))


@pytest.fixture
def twisted_field():
    """Fixture providing a harmonic field with twisted uniaxial boundary data."""
    grid = GridSpec(Box(), (6, 6, 6))
    return TensorField.from_boundary(grid, UniaxialBoundary(0.5, director="twist", wavenumber=2.0))


def test_box_validation():
    """Test boxes need upper > lower on every axis."""
    with pytest.raises(ValueError, match="invalid container box"):
        Box((0.0, 0.0, 0.0), (1.0, 0.0, 1.0))
    box = Box((0.0, 0.0, 0.0), (2.0, 1.0, 1.0))
    assert box.volume == pytest.approx(2.0)
    np.testing.assert_allclose(box.centre, [1.0, 0.5, 0.5])


def test_grid_weights_and_spacing():
    """Test trapezoidal weights integrate constants exactly."""
    grid = GridSpec(Box((0.0, 0.0, 0.0), (2.0, 1.0, 1.0)), (9, 5, 5))
    np.testing.assert_allclose(grid.spacing, [0.25, 0.25, 0.25])
    assert np.sum(grid.node_weights()) == pytest.approx(2.0)
    mask = grid.boundary_mask()
    assert np.count_nonzero(~mask) == 7 * 3 * 3
    with pytest.raises(ValueError, match="resolution"):
        GridSpec(Box(), (3, 5, 5))


def test_grid_for_spacing_and_cap():
    """Test grids refine to the requested spacing and respect the cap."""
    grid = GridSpec.for_spacing(Box(), 0.1)
    assert grid.shape == (11, 11, 11)
    assert np.all(grid.spacing <= 0.1 + 1e-12)
    assert GridSpec.for_spacing(Box(), 0.01, max_resolution=20).shape == (20, 20, 20)


def test_field_enforces_boundary_values():
    """Test boundary nodes always carry g, whatever values are passed."""
    grid = GridSpec(Box(), (5, 5, 5))
    q = projector_coefficients(np.array([0.0, 0.0, 1.0]))
    field = TensorField(grid, np.zeros(grid.shape + (5,)), ConstantBoundary(q))
    np.testing.assert_allclose(field.values[grid.boundary_mask()], np.broadcast_to(q, (98, 5)))
    np.testing.assert_array_equal(field.values[~grid.boundary_mask()], 0.0)
    with pytest.raises(ValueError, match="finite"):
        TensorField(grid, np.full(grid.shape + (5,), np.nan), ConstantBoundary(q))
    with pytest.raises(ValueError, match="shape"):
        TensorField(grid, np.zeros((4, 4, 4, 5)), ConstantBoundary(q))


def test_harmonic_initialisation_of_constant_data():
    """Test the harmonic fill of constant data is that constant."""
    grid = GridSpec(Box(), (6, 6, 6))
    q = np.array([0.1, -0.2, 0.0, 0.3, 0.05])
    field = TensorField.from_boundary(grid, ConstantBoundary(q))
    np.testing.assert_allclose(field.values, np.broadcast_to(q, field.values.shape), atol=1e-10)
    with pytest.raises(ValueError, match="unknown initialisation"):
        TensorField.from_boundary(grid, ConstantBoundary(q), init="random")


def test_uniaxial_boundary_directors():
    """Test the director families and their Lipschitz constants."""
    points = np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.25]])
    twist = UniaxialBoundary(0.6, director="twist", wavenumber=2.0 * np.pi)
    np.testing.assert_allclose(twist.directors(points)[1], [0.0, 1.0, 0.0], atol=1e-14)
    assert twist.lipschitz == pytest.approx(2.0 * 0.6 * 2.0 * np.pi)
    radial = UniaxialBoundary(0.6, director="radial", centre=(0.0, 0.0, 0.0))
    np.testing.assert_allclose(radial.directors(np.array([[0.0, 3.0, 4.0]])), [[0.0, 0.6, 0.8]])
    with pytest.raises(ValueError, match="unknown director"):
        UniaxialBoundary(0.6, director="helical")


def test_field_sampling_is_trilinear(twisted_field):
    """Test sampling at nodes returns node values."""
    coords = twisted_field.grid.coordinates()
    np.testing.assert_allclose(twisted_field.sample(coords[2, 3, 1]), twisted_field.values[2, 3, 1])
    with pytest.raises(ValueError):
        twisted_field.sample(np.array([2.0, 0.0, 0.0]))


def test_difference_adjoint_is_transpose(rng):
    """Test <D u, v> = <u, Dᵀ v> along every axis."""
    u = rng.normal(size=(6, 5, 7, 5))
    v = rng.normal(size=(6, 5, 7, 5))
    for axis in range(3):
        lhs = np.sum(difference(u, 0.3, axis) * v)
        rhs = np.sum(u * difference_adjoint(v, 0.3, axis))
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_energy_report_total():
    """Test the report total is the sum of its parts."""
    report = EnergyReport(elastic=1.0, bulk=2.0, homogenised=3.0, surface=4.0)
    assert report.total == pytest.approx(10.0)
    assert report.as_dict()["total"] == pytest.approx(10.0)


def test_discrete_gradient_matches_finite_differences(rng, params, twisted_field):
    """Test the exact gradient of F0 including a homogenised potential."""
    species = [SpeciesSpec(shape=lookup("wedge+23"), surface=RapiniPapoular(0.8))]
    interior = ~twisted_field.boundary_mask
    values = twisted_field.values.copy()
    values[interior] += 0.05 * rng.normal(size=values[interior].shape)
    field = twisted_field.with_values(values)
    grad = energy_grad_f0(field, params, species, order=12)
    assert np.all(grad[field.boundary_mask] == 0.0)
    x = field.interior_vector()
    g = grad[interior].ravel()
    for _ in range(10):
        direction = rng.normal(size=x.shape)
        plus = energy_f0(field.with_interior(x + 1e-6 * direction), params, species, 12).total
        minus = energy_f0(field.with_interior(x - 1e-6 * direction), params, species, 12).total
        assert (plus - minus) / 2e-6 == pytest.approx(g @ direction, rel=1e-5, abs=1e-8)


@pytest.mark.parametrize("method", ["lbfgs", "gradient_descent"])
def test_minimisers_decrease_energy(params, twisted_field, method):
    """Test both minimisers decrease the energy monotonically along their trace."""
    options = MinimizeOptions(method=method, max_iterations=200, gtol=1e-6)
    start = energy_f0(twisted_field, params).total
    field, report = minimize(twisted_field, params, options=options)
    assert report.total <= start
    assert report.trace[0] == pytest.approx(start)
    assert all(b <= a + 1e-12 for a, b in zip(report.trace, report.trace[1:]))
    np.testing.assert_array_equal(field.values[field.boundary_mask], twisted_field.boundary_values)


def test_minimize_options_validation():
    """Test unknown methods and nonpositive tolerances are rejected."""
    with pytest.raises(ValueError, match="unknown minimisation method"):
        MinimizeOptions(method="newton")
    with pytest.raises(ValueError, match="gtol"):
        MinimizeOptions(gtol=0.0)


def test_effective_field_minimiser():
    """Test a designed linear term drives the field to -(W / 2a') dev(P)."""
    strength, a, a_prime = 0.3, 0.5, 1.0
    p = np.diag([1.0, 0.0, 0.0])
    spec = design_linear_term(p, strength, a, a_prime)
    expected = -(strength / (2.0 * a_prime)) * deviatoric(p).coeffs
    grid = GridSpec(Box(), (16, 16, 16))
    start = TensorField.from_boundary(grid, ConstantBoundary(expected), init="constant")
    params = MaterialParams(ElasticParams(), BulkParams(a, 0.0, 1e-6))
    field, report = minimize(
        start, params, options=MinimizeOptions(gtol=1e-10), potential=spec.potential(drop_constant=True)
    )
    assert np.max(np.abs(field.values - expected)) < 1e-4
    assert report.iterations > 0


def test_functional_with_custom_weights(params, twisted_field):
    """Test zero weights remove the volume energy."""
    functional = EnergyFunctional(
        twisted_field.grid, params, weights=np.zeros(twisted_field.grid.shape)
    )
    energy, grad = functional.value_and_gradient(twisted_field.values)
    assert energy == 0.0
    np.testing.assert_array_equal(grad, 0.0)
