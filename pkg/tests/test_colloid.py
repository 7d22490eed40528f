"""
Tests for inclusion lattices and the colloidal energies.
"""
import numpy as np
import pytest

from nematic_colloids.core.colloid import (
    ColloidConfig,
    LatticeSurfaceTerm,
    build_lattice,
    energy_constrained,
    energy_f_eps,
    interpolation_matrix,
    j_eps,
    j_tilde_eps,
    j_zero,
    lattice_points,
    minimize_f_eps,
    occupancy_mask,
    thin_points,
    upper_bound_gap,
)
from nematic_colloids.core.energy import BulkParams, ElasticParams, RapiniPapoular
from nematic_colloids.core.homogenize import DensityBox, DensityField, SpeciesSpec, species_fhom
from nematic_colloids.core.shapes import lookup, transform
from nematic_colloids.core.solver import (
    Box,
    GridSpec,
    MaterialParams,
    MinimizeOptions,
    TensorField,
    UniaxialBoundary,
)

Q_CONST = np.array([0.2, -0.1, 0.05, 0.1, -0.15])


def _constant_field(points):
    return np.broadcast_to(Q_CONST, points.shape[:-1] + (5,))


def _species(name, strength=1.0, **kwargs):
    shape = transform(lookup(name), np.eye(3), 0.5)
    return SpeciesSpec(shape=shape, surface=RapiniPapoular(strength), **kwargs)


@pytest.fixture
def config():
    """Fixture providing ε = 1/4 with α = 1.2."""
    return ColloidConfig(alpha=1.2, eps=0.25)


@pytest.fixture
def lattice(config):
    """Fixture providing a wedge species and a ball species on the unit cube."""
    return build_lattice(config, [_species("wedge+12"), _species("ball", 0.5)], Box())


@pytest.fixture
def field():
    """Fixture providing a twisted harmonic field on a 9³ grid."""
    grid = GridSpec(Box(), (9, 9, 9))
    return TensorField.from_boundary(grid, UniaxialBoundary(0.5, director="twist", wavenumber=2.0))


@pytest.fixture
def params():
    """Fixture providing Dirichlet elasticity with a nematic bulk."""
    return MaterialParams(ElasticParams(1.0), BulkParams(-0.3, 0.5, 1.0))


def test_config_validation_and_scales():
    """Test ε and γ ranges and the derived scale factors."""
    with pytest.raises(ValueError, match="eps must lie in"):
        ColloidConfig(alpha=1.2, eps=1.5)
    with pytest.raises(ValueError, match="gamma must be"):
        ColloidConfig(alpha=1.2, eps=0.5, gamma=-0.1)
    config = ColloidConfig(alpha=1.25, eps=0.5, gamma=0.1)
    assert config.inclusion_scale == pytest.approx(0.5**1.25)
    assert config.surface_scale == pytest.approx(0.5 ** (3.0 - 2.5 - 0.1))
    assert config.strong_anchoring
    assert not ColloidConfig(alpha=1.25, eps=0.5).strong_anchoring


def test_lattice_points_keep_cells_inside():
    """Test only points whose ε-cell fits in the container are kept."""
    points = lattice_points(Box(), 0.25)
    assert points.shape == (27, 3)
    np.testing.assert_allclose(np.unique(points[:, 0]), [0.25, 0.5, 0.75])
    shifted = lattice_points(Box(), 0.25, offset=0.125)
    assert shifted.shape == (64, 3)
    assert lattice_points(Box(), 0.9).shape == (0, 3)


def test_thin_points():
    """Test deterministic thinning keeps the requested fraction."""
    points = np.arange(30, dtype=float).reshape(10, 3)
    assert len(thin_points(points, np.full(10, 0.5))) == 5
    assert len(thin_points(points, np.zeros(10))) == 0
    assert len(thin_points(points, np.ones(10))) == 10
    with pytest.raises(ValueError, match="exceeds 1"):
        thin_points(points, np.full(10, 1.5))


def test_build_lattice_species_offsets(lattice, config):
    """Test per-species counts, the empirical measures and the exact volume fraction."""
    assert lattice.counts == [27, 64]
    centres, weight = lattice.measure(1)
    assert weight == pytest.approx(config.eps**3)
    assert np.min(centres) == pytest.approx(0.125)
    # the ball lattice sits half a cell diagonal from the wedge lattice
    assert lattice.separation_constant() == pytest.approx(0.5 + np.sqrt(3.0) / 4.0)
    scale = config.inclusion_scale
    wedge, ball = lattice.species_list
    expected = 27 * wedge.shape.volume() + 64 * ball.shape.volume()
    assert lattice.volume_fraction() == pytest.approx(expected * scale**3)
    assert lattice.describe()["counts"] == {"wedge+12": 27, "ball": 64}


@pytest.mark.parametrize(
    "alpha,eps,species_count",
    [(1.2, 0.25, 1), (1.4, 0.125, 2), (1.2, 0.2, 3), (1.3, 1.0 / 6.0, 2)],
)
def test_separation_certificate_holds(alpha, eps, species_count):
    """Test the separation constant of every periodic lattice is at least 1/2."""
    ball = SpeciesSpec(shape=transform(lookup("ball"), np.eye(3), 0.1), surface=RapiniPapoular(1.0))
    lattice = build_lattice(ColloidConfig(alpha=alpha, eps=eps), [ball] * species_count, Box())
    assert lattice.separation_constant() >= 0.5 - 1e-12


def test_separation_constant_pairs_across_species():
    """Test nearest neighbours are taken over the union of all species' centres."""
    ball = SpeciesSpec(shape=transform(lookup("ball"), np.eye(3), 0.1), surface=RapiniPapoular(1.0))
    config = ColloidConfig(alpha=1.4, eps=0.125)
    lattice = build_lattice(config, [ball, ball], Box())
    centres = np.concatenate([s.centres for s in lattice.species_lattices])
    pairwise = np.linalg.norm(centres[:, None, :] - centres[None, :, :], axis=-1)
    np.fill_diagonal(pairwise, np.inf)
    to_boundary = np.min(np.minimum(centres, 1.0 - centres), axis=1)
    expected = np.min(to_boundary + 0.5 * np.min(pairwise, axis=1)) / config.eps
    assert lattice.separation_constant() == pytest.approx(expected)
    assert lattice.separation_constant() == pytest.approx(0.5 + np.sqrt(3.0) / 4.0)


def test_build_lattice_density_and_overlap():
    """Test a zero-density box thins the lattice and overlapping inclusions are rejected."""
    config = ColloidConfig(alpha=1.2, eps=0.25)
    half = DensityField(1.0, [DensityBox((0.0, 0.0, 0.0), (0.5, 1.0, 1.0), 0.0)])
    thinned = build_lattice(config, [_species("ball", density=half)], Box())
    assert thinned.counts == [9]
    big = SpeciesSpec(shape=lookup("ball"), surface=RapiniPapoular(1.0))
    with pytest.raises(ValueError, match="not pairwise disjoint"):
        build_lattice(ColloidConfig(alpha=1.01, eps=0.1), [big], Box())


def test_occupancy_mask_marks_centres(config, field):
    """Test nodes at inclusion centres are occupied and distant nodes are not."""
    lattice = build_lattice(config, [_species("ball")], Box())
    masked = occupancy_mask(field.grid, lattice)
    # inclusion radius 0.5 ε^1.2 is below the grid spacing, so only the centres are hit
    assert np.count_nonzero(masked.occupied) == 27
    assert masked.occupied[2, 2, 2]
    assert not masked.occupied[1, 1, 1]
    assert masked.volume_fraction() > 0.0
    assert np.sum(masked.weights()) < np.sum(field.grid.node_weights())


def test_interpolation_matrix_reproduces_linear_data(field):
    """Test trilinear interpolation is exact on affine data and rows sum to one."""
    grid = field.grid
    coords = grid.coordinates().reshape(-1, 3)
    linear = coords @ np.array([1.0, -2.0, 0.5]) + 0.3
    points = np.array([[0.1, 0.2, 0.3], [0.999, 0.0, 0.5], [1.0, 1.0, 1.0]])
    matrix = interpolation_matrix(grid, points)
    np.testing.assert_allclose(matrix @ linear, points @ np.array([1.0, -2.0, 0.5]) + 0.3)
    np.testing.assert_allclose(np.asarray(matrix.sum(axis=1)).ravel(), 1.0)
    with pytest.raises(ValueError, match="outside the grid"):
        interpolation_matrix(grid, np.array([[1.5, 0.0, 0.0]]))


def test_constant_field_functionals_agree(lattice):
    """Test J_ε = J̃_ε for constant fields and J₀ integrates f_hom over the container."""
    exact = j_eps(_constant_field, lattice)
    assert exact == pytest.approx(j_tilde_eps(_constant_field, lattice), rel=1e-9)
    expected = sum(
        float(species_fhom(s, Q_CONST[None, :], np.zeros((1, 3)), 16)[0]) for s in lattice.species_list
    )
    assert j_zero(_constant_field, lattice.species_list, Box()) == pytest.approx(expected, rel=1e-9)
    with pytest.raises(ValueError, match="container box is required"):
        j_zero(_constant_field, lattice.species_list)


def test_surface_term_matches_j_eps(lattice, field, rng):
    """Test the sparse surface term agrees with J_ε and has an exact gradient."""
    term = LatticeSurfaceTerm(lattice, field.grid)
    value, grad = term.value_and_gradient(field.values)
    assert value == pytest.approx(j_eps(field, lattice), rel=1e-10)
    for _ in range(5):
        direction = rng.normal(size=field.values.shape)
        plus = term.value_and_gradient(field.values + 1e-6 * direction)[0]
        minus = term.value_and_gradient(field.values - 1e-6 * direction)[0]
        assert (plus - minus) / 2e-6 == pytest.approx(np.sum(grad * direction), rel=1e-5, abs=1e-9)


def test_strong_anchoring_requires_bounded_densities(field, params):
    """Test γ > 0 with a negative Rapini-Papoular strength is rejected."""
    config = ColloidConfig(alpha=1.2, eps=0.25, gamma=0.1)
    lattice = build_lattice(config, [_species("ball", -1.0)], Box())
    with pytest.raises(ValueError, match="nonnegative surface density required"):
        energy_f_eps(field, lattice, params)


def test_upper_bound_gap_and_constrained_energy(lattice, field, params):
    """Test removing inclusions never increases the volume energy."""
    assert upper_bound_gap(field, lattice, params) <= 0.0
    report = energy_f_eps(field, lattice, params)
    assert report.surface == pytest.approx(j_eps(field, lattice))
    assert energy_constrained(field, params, lattice.species_list) == float("inf")
    assert energy_constrained(field, params, []) == pytest.approx(
        report.elastic + report.bulk - upper_bound_gap(field, lattice, params)
    )


def test_minimize_f_eps_decreases_energy(lattice, field, params):
    """Test the lattice minimiser lowers F_ε and keeps the boundary data."""
    start = energy_f_eps(field, lattice, params).total
    result, report = minimize_f_eps(
        field, lattice, params, MinimizeOptions(max_iterations=50, gtol=1e-6)
    )
    assert report.total <= start + 1e-12
    assert energy_f_eps(result, lattice, params).total == pytest.approx(report.total, rel=1e-8)
    np.testing.assert_array_equal(result.values[result.boundary_mask], field.boundary_values)
