import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from semiclassical_ee import efp
from semiclassical_ee import lattice as L
from semiclassical_ee import rdm
from semiclassical_ee.errors import DomainError
from semiclassical_ee.potentials import PhysicalParams, PotentialSpec

BOX = PotentialSpec.box(1.0)


def box_modes(labels):
    return L.continuum_modes(BOX, PhysicalParams(), labels)


def test_single_mode_half_box():
    m = box_modes([1])
    assert efp.efp_determinant(m, (0.5, 1.0)) == pytest.approx(0.5, abs=1e-12)
    assert efp.efp_fredholm(efp.CdKernel(m), (0.5, 1.0)) == pytest.approx(0.5, abs=1e-8)


def test_trivial_regions():
    m = box_modes([1, 2, 3])
    assert efp.efp_determinant(m, (0.4, 0.4)) == 1.0
    assert efp.efp_fredholm(efp.CdKernel(m), (0.4, 0.4)) == 1.0
    assert efp.efp_determinant(m, (0.0, 1.0)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("labels", [[1], [1, 2], [1, 2, 3, 4], [2, 5, 9, 13]])
@pytest.mark.parametrize("B", [(0.6, 0.9), (0.0, 0.25), (0.3, 0.8)])
def test_routes_agree(labels, B):
    m = box_modes(labels)
    d = efp.efp_determinant(m, B)
    f = efp.efp_fredholm(efp.CdKernel(m), B)
    assert abs(d - f) <= 1e-6


@pytest.mark.parametrize("labels", [[1], [1, 2], [1, 2, 3, 4]])
def test_equals_top_sector_of_complement(labels):
    m = box_modes(labels)
    B = rdm.Bipartition.from_interval(0.55, 0.85)
    A = B.complement((0.0, 1.0))
    top = rdm.rdm_spectrum_exact(m, A, keep_zeros=True).sectors[len(labels)][0]
    assert efp.efp_determinant(m, B) == pytest.approx(top, abs=1e-8)


@given(st.floats(0.0, 0.45), st.floats(0.01, 0.2))
def test_monotone_in_region(lo, step):
    m = box_modes([1, 3, 4])
    prev = 1.0
    for k in range(1, 5):
        hi = min(lo + k * step, 1.0)
        cur = efp.efp_determinant(m, (lo, hi))
        assert cur <= prev + 1e-10
        prev = cur


def test_classical_limit():
    labels = [50, 61, 77]
    B = (0.2, 0.45)
    expected = (1 - 0.25) ** 3
    assert efp.efp_determinant(box_modes(labels), B) == pytest.approx(expected, abs=0.02)


def test_kernel_hermitian_and_reproducing():
    m = L.continuum_modes(PotentialSpec.harmonic(1.0), PhysicalParams(), [1, 2, 3])
    K = efp.CdKernel(m)
    x = np.linspace(-2, 2, 7)
    k = K(x, x)
    np.testing.assert_allclose(k, k.conj().T, atol=1e-14)
    # spline-backed modes are cubic per lattice cell: integrate cell by cell
    lo, hi = m[0].support
    edges = np.concatenate([[lo], m[0].grid.positions, [hi]])
    g, gw = np.polynomial.legendre.leggauss(5)
    half, mid = 0.5 * np.diff(edges), 0.5 * (edges[1:] + edges[:-1])
    z = (mid[:, None] + half[:, None] * g).ravel()
    w = (half[:, None] * gw).ravel()
    kk = (K(x, z) * w[None, :]) @ K(z, x)
    np.testing.assert_allclose(kk, k, atol=1e-8)


def test_nystrom_grid():
    B = rdm.Bipartition(intervals=((0, 0.2), (0.5, 1.0)))
    g = efp.NystromGrid.gauss_legendre(B, 40)
    assert g.node_count >= 40 and np.all(g.weights > 0)
    assert np.sum(g.weights) == pytest.approx(0.7)
    with pytest.raises(DomainError):
        efp.NystromGrid(np.zeros(4), np.ones(4))
    m = box_modes([1])
    assert efp.efp_fredholm(efp.CdKernel(m), g) == pytest.approx(efp.efp_determinant(m, B), abs=1e-10)
