import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import eigh_tridiagonal

from semiclassical_ee import kernels


def random_tridiagonal(seed, n):
    rng = np.random.default_rng(seed)
    return rng.normal(size=n), rng.normal(size=n - 1)


@given(st.integers(0, 10_000), st.integers(2, 40))
def test_sturm_count_matches_dense_eigenvalues(seed, n):
    d, e = random_tridiagonal(seed, n)
    ev = np.linalg.eigvalsh(np.diag(d) + np.diag(e, 1) + np.diag(e, -1))
    shifts = np.array([-10.0, 0.0, 0.3, 10.0])
    expected = [int(np.sum(ev < s)) for s in shifts]
    assert list(kernels.sturm_count(d, e, shifts)) == expected
    assert list(kernels.sturm_count_numpy(d, e, shifts)) == expected


def test_gershgorin_bounds_enclose_spectrum():
    d, e = random_tridiagonal(1, 30)
    lo, hi = kernels.gershgorin_bounds(d, e)
    ev = np.linalg.eigvalsh(np.diag(d) + np.diag(e, 1) + np.diag(e, -1))
    assert lo <= ev[0] and ev[-1] <= hi


@pytest.mark.parametrize("impl", ["numba", "numpy"])
def test_bisection_against_scipy(impl):
    d, e = random_tridiagonal(7, 200)
    lo, hi = kernels.gershgorin_bounds(d, e)
    idx = np.arange(25)
    fn = kernels.bisect_eigenvalues_numba if impl == "numba" else kernels.bisect_eigenvalues_numpy
    vals, steps = fn(d, e, idx, lo, hi, 4 * np.finfo(float).eps, 1e-15)
    ref = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, 24))
    assert np.all(steps >= 0)
    np.testing.assert_allclose(vals, ref, atol=1e-12)


@pytest.mark.parametrize("impl", ["numba", "numpy"])
def test_inverse_iteration_residuals(impl):
    d, e = random_tridiagonal(3, 150)
    ref_vals, ref_vecs = eigh_tridiagonal(d, e, select="i", select_range=(0, 9))
    start = np.random.default_rng(0).uniform(0.5, 1.5, len(d))
    pivfloor = 1e-300
    if impl == "numba":
        vecs = kernels.inverse_iteration_numba(d, e, ref_vals, start, 3, pivfloor)
    else:
        vecs = kernels.inverse_iteration_numpy(d, e, ref_vals, start, 3, pivfloor)
    for k in range(10):
        v = vecs[k] / np.linalg.norm(vecs[k])
        assert min(np.abs(v - ref_vecs[:, k]).max(), np.abs(v + ref_vecs[:, k]).max()) < 1e-9


def test_numba_and_numpy_paths_agree():
    d, e = random_tridiagonal(11, 80)
    lo, hi = kernels.gershgorin_bounds(d, e)
    idx = np.arange(80)
    a, _ = kernels.bisect_eigenvalues_numba(d, e, idx, lo, hi, 1e-15, 1e-15)
    b, _ = kernels.bisect_eigenvalues_numpy(d, e, idx, lo, hi, 1e-15, 1e-15)
    np.testing.assert_allclose(a, b, atol=1e-13)
