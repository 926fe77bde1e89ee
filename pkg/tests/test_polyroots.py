import numpy as np
import pytest

from hyperwitten import polyroots


def test_cubic_roots():
    roots = polyroots.roots([-6.0, 11.0, -6.0, 1.0])
    np.testing.assert_allclose(roots, [1.0, 2.0, 3.0], atol=1e-13)


def test_complex_roots_are_ordered():
    # (z - (1 + 2i)) (z - (-1 - i))
    a, b = 1 + 2j, -1 - 1j
    roots = polyroots.roots([a * b, -(a + b), 1.0])
    np.testing.assert_allclose(roots, [b, a], atol=1e-13)


def test_trailing_zero_coefficients_are_trimmed():
    roots = polyroots.companion_roots([2.0, 1.0, 0.0, 0.0])
    np.testing.assert_allclose(roots, [-2.0])
    assert polyroots.companion_roots([5.0]).size == 0
    with pytest.raises(ValueError):
        polyroots.companion_roots([0.0, 0.0])


def test_aberth_polishes_perturbed_roots(rng):
    exact = np.array([0.5, -1.25, 2.0 + 1.0j, 2.0 - 1.0j])
    coeffs = np.poly(exact)[::-1]
    start = exact + 1e-3 * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
    polished = polyroots.aberth(coeffs, start)
    for root in exact:
        assert np.min(np.abs(polished - root)) < 1e-12


def test_aberth_checks_root_count():
    with pytest.raises(ValueError):
        polyroots.aberth([1.0, 0.0, 1.0], np.array([1.0]))


def test_clusters():
    values = np.array([1.0, 1.0 + 1e-9, 3.0])
    assert polyroots.clusters(values, 1e-7) == [(0, 1)]
    assert polyroots.clusters(values, 1e-12) == []
