import numpy as np
import pytest

from hyperwitten import eigensolver
from hyperwitten.errors import ConvergenceFailure


def random_symmetric(rng, n):
    a = rng.standard_normal((n, n))
    return 0.5 * (a + a.T)


def test_householder_preserves_spectrum(rng):
    a = random_symmetric(rng, 12)
    d, e = eigensolver.householder(a)
    t = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    np.testing.assert_allclose(np.linalg.eigvalsh(t), np.linalg.eigvalsh(a), atol=1e-12)


def test_sturm_count():
    d = np.array([1.0, 2.0, 3.0, 4.0])
    e = np.zeros(3)
    counts = eigensolver.sturm_count(d, e, np.array([0.5, 1.5, 3.5, 10.0]))
    assert list(counts) == [0, 1, 3, 4]


def test_bisection_brackets(rng):
    a = random_symmetric(rng, 10)
    d, e = eigensolver.householder(a)
    values, lo, hi = eigensolver.bisection(d, e, np.arange(3))
    reference = np.linalg.eigvalsh(a)[:3]
    assert np.all(lo <= values) and np.all(values <= hi)
    np.testing.assert_allclose(values, reference, atol=1e-12)


def test_bisection_iteration_cap(rng):
    d, e = eigensolver.householder(random_symmetric(rng, 8))
    with pytest.raises(ConvergenceFailure):
        eigensolver.bisection(d, e, np.arange(2), max_iterations=3)


def test_thomas_solve(rng):
    n = 9
    d = 4.0 + rng.random(n)
    e = rng.random(n - 1)
    rhs = rng.standard_normal(n)
    t = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    np.testing.assert_allclose(eigensolver.thomas_solve(d, e, rhs), np.linalg.solve(t, rhs), rtol=1e-12)


def test_smallest_eigenvalues_of_second_difference():
    n = 40
    a = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    exact = 2.0 - 2.0 * np.cos(np.arange(1, 5) * np.pi / (n + 1))
    np.testing.assert_allclose(eigensolver.smallest_eigenvalues(a, 4), exact, atol=1e-13)


def test_smallest_eigenvalues_checks_count():
    with pytest.raises(ValueError):
        eigensolver.smallest_eigenvalues(np.eye(3), 0)
    with pytest.raises(ValueError):
        eigensolver.smallest_eigenvalues(np.eye(3), 4)
    assert eigensolver.smallest_eigenvalues(np.array([[2.5]]), 1) == pytest.approx([2.5])


def test_householder_bisection_matches_jacobi(rng):
    for _ in range(100):
        n = int(rng.integers(4, 65))
        a = random_symmetric(rng, n)
        fast = eigensolver.smallest_eigenvalues(a, n)
        reference = eigensolver.jacobi_eigenvalues(a)
        np.testing.assert_allclose(fast, reference, rtol=0, atol=1e-11 * max(1.0, np.max(np.abs(reference))))


def test_diagonal_matrix():
    values = eigensolver.smallest_eigenvalues(np.diag([1.0, 2.0, 3.0]), 3)
    np.testing.assert_allclose(values, [1.0, 2.0, 3.0], atol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_small_matrices(rng, n):
    a = random_symmetric(rng, n)
    np.testing.assert_allclose(
        eigensolver.smallest_eigenvalues(a, n), np.linalg.eigvalsh(a), atol=1e-12
    )


def test_jacobi_converges_on_random_matrices(rng):
    for _ in range(40):
        a = random_symmetric(rng, 30)
        np.testing.assert_allclose(eigensolver.jacobi_eigenvalues(a), np.linalg.eigvalsh(a), atol=1e-11)


def test_jacobi_off_diagonal_below_tolerance():
    a = np.diag([1.0, 2.0, 3.0])
    a[0, 1] = a[1, 0] = 1e-12
    np.testing.assert_allclose(eigensolver.jacobi_eigenvalues(a), [1.0, 2.0, 3.0], atol=1e-15)
