"""
Tests for the discrete harmonic fill.
"""
import numpy as np

from nematic_colloids.core.laplace import harmonic_fill


def _linear_values(shape, spacing):
    axes = [np.arange(n) * h for n, h in zip(shape, spacing)]
    x, y, z = np.meshgrid(*axes, indexing="ij")
    return np.stack([1.0 + 2.0 * x - y, 0.5 * z, x + y + z], axis=-1)


def test_fill_reproduces_linear_fields():
    """Test linear data is discretely harmonic and is recovered exactly."""
    shape, spacing = (7, 6, 5), (0.1, 0.2, 0.15)
    exact = _linear_values(shape, spacing)
    unknown = np.zeros(shape, dtype=bool)
    unknown[1:-1, 1:-1, 1:-1] = True
    start = exact.copy()
    start[unknown] = 0.0
    filled = harmonic_fill(start, unknown, spacing)
    np.testing.assert_allclose(filled, exact, atol=1e-10)


def test_fill_keeps_known_nodes():
    """Test known nodes are returned unchanged and the input is not modified."""
    rng = np.random.default_rng(3)
    values = rng.normal(size=(5, 5, 5, 2))
    original = values.copy()
    unknown = np.zeros((5, 5, 5), dtype=bool)
    unknown[2, 2, 2] = True
    filled = harmonic_fill(values, unknown, (1.0, 1.0, 1.0))
    np.testing.assert_array_equal(values, original)
    np.testing.assert_array_equal(filled[~unknown], original[~unknown])
    neighbours = [(1, 2, 2), (3, 2, 2), (2, 1, 2), (2, 3, 2), (2, 2, 1), (2, 2, 3)]
    expected = np.mean([original[n] for n in neighbours], axis=0)
    np.testing.assert_allclose(filled[2, 2, 2], expected, atol=1e-12)


def test_fill_without_unknowns_is_copy():
    """Test an empty mask returns a copy of the input."""
    values = np.ones((4, 4, 4, 5))
    filled = harmonic_fill(values, np.zeros((4, 4, 4), dtype=bool), (1.0, 1.0, 1.0))
    np.testing.assert_array_equal(filled, values)
    assert filled is not values


def test_fill_obeys_maximum_principle():
    """Test filled values stay within the range of the Dirichlet data."""
    rng = np.random.default_rng(5)
    values = rng.uniform(-1.0, 2.0, size=(8, 8, 8, 1))
    unknown = np.zeros((8, 8, 8), dtype=bool)
    unknown[2:6, 1:7, 3:5] = True
    filled = harmonic_fill(values, unknown, (0.5, 0.5, 0.5))
    known = values[~unknown]
    assert filled[unknown].min() >= known.min() - 1e-12
    assert filled[unknown].max() <= known.max() + 1e-12
