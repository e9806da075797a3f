import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from semiclassical_ee import lattice as L
from semiclassical_ee import rdm
from semiclassical_ee.errors import DomainError, ResourceError, UnsupportedError, UsageError
from semiclassical_ee.potentials import PhysicalParams, PotentialSpec


def random_lattice_modes(seed, sites, n_particles):
    rng = np.random.default_rng(seed)
    grid = L.LatticeGrid.for_box(sites)
    H = L.TridiagonalHamiltonian(rng.uniform(-2, 2, sites), -1.0, grid)
    return L.solve_modes(H, n_particles), grid


def box_modes(labels):
    return L.continuum_modes(PotentialSpec.box(1.0), PhysicalParams(), labels)


def test_bipartition_validation_and_complement():
    with pytest.raises(DomainError):
        rdm.Bipartition()
    with pytest.raises(DomainError):
        rdm.Bipartition.from_sites([1, 1])
    with pytest.raises(DomainError):
        rdm.Bipartition.from_interval(1.0, 0.0)
    assert rdm.Bipartition.from_sites([3, 0]).complement(5).sites == (1, 2, 4)
    b = rdm.Bipartition(intervals=((0.2, 0.4), (0.6, 0.7))).complement((0.0, 1.0))
    assert b.intervals == ((0.0, 0.2), (0.4, 0.6), (0.7, 1.0))
    assert b.measure == pytest.approx(0.7)


def test_single_particle_two_eigenvalues():
    modes, grid = random_lattice_modes(5, 8, 1)
    part = rdm.Bipartition.from_sites([0, 1, 2])
    lam = float(np.sum(modes[0].amplitudes[:3] ** 2))
    spec = rdm.single_particle_spectrum(modes[0], part)
    assert spec.sectors[1][0] == pytest.approx(lam)
    assert spec.sectors[0][0] == pytest.approx(1 - lam)
    bf = rdm.brute_force_rdm(modes, grid, part)
    np.testing.assert_allclose(bf.sorted_values(), spec.sorted_values(), atol=1e-12)


@given(st.integers(0, 10_000), st.integers(3, 9), st.integers(1, 3), st.data())
def test_exact_matches_brute_force(seed, sites, n, data):
    n = min(n, sites - 1)
    modes, grid = random_lattice_modes(seed, sites, n)
    a = data.draw(st.sets(st.integers(0, sites - 1), min_size=1, max_size=sites - 1))
    part = rdm.Bipartition.from_sites(a)
    exact = rdm.rdm_spectrum_exact(modes, part)
    bf = rdm.brute_force_rdm(modes, grid, part)
    ev, bv = exact.sorted_values(), bf.sorted_values()
    assert len(ev) == len(bv)
    np.testing.assert_allclose(ev, bv, atol=1e-10)
    for k in bf.sectors:
        np.testing.assert_allclose(exact.sectors.get(k, []), bf.sectors[k], atol=1e-10)


def test_sector_structure_and_trace():
    modes = box_modes([1, 4, 9])
    spec = rdm.rdm_spectrum_exact(modes, rdm.Bipartition.from_interval(0.0, 0.37), keep_zeros=True)
    assert [len(spec.sectors[k]) for k in range(4)] == [1, 3, 3, 1]
    assert spec.total() == pytest.approx(1.0, abs=1e-12)


def test_top_sector_is_rank_one_determinant():
    modes, grid = random_lattice_modes(2, 9, 3)
    part = rdm.Bipartition.from_sites([0, 2, 3, 5, 7])
    o = rdm.overlap_matrix(modes, part)
    blocks = rdm.brute_force_sector_matrices(modes, part)
    ev = np.linalg.eigvalsh(blocks[3])[::-1]
    assert ev[0] == pytest.approx(rdm.sector_top_eigenvalue(o), abs=1e-12)
    assert np.all(np.abs(ev[1:]) < 1e-12)


def test_overlap_matrix_properties():
    modes = box_modes([2, 3, 7])
    o = rdm.overlap_matrix(modes, rdm.Bipartition.from_interval(0.1, 0.55)).entries
    np.testing.assert_allclose(o, o.conj().T, atol=1e-15)
    full = rdm.overlap_matrix(modes, rdm.Bipartition.from_interval(0.0, 1.0)).entries
    np.testing.assert_allclose(full, np.eye(3), atol=1e-12)


@pytest.mark.parametrize("eta", [1, 2, 7, 50])
def test_box_half_is_exactly_half(eta):
    spec = rdm.single_particle_spectrum(box_modes([eta])[0], rdm.Bipartition.from_interval(0, 0.5))
    assert spec.sectors[1][0] == pytest.approx(0.5, abs=1e-12)


@given(st.integers(0, 10_000), st.integers(1, 4), st.integers(0, 4))
def test_cauchy_binet(seed, k, extra):
    rng = np.random.default_rng(seed)
    n = k + extra
    X, Y = rng.normal(size=(n, k)), rng.normal(size=(k, n))
    lhs, rhs, err = rdm.cauchy_binet_check(X, Y)
    assert err <= 1e-10 * max(1.0, abs(lhs))


def test_cauchy_binet_shape_errors():
    with pytest.raises(UsageError):
        rdm.cauchy_binet_check(np.ones((3, 2)), np.ones((3, 2)))
    with pytest.raises(DomainError):
        rdm.cauchy_binet_check(np.ones((2, 3)), np.ones((3, 2)))


def test_rank_one_sector_check():
    q = np.array([0.3, -0.4j, 0.5])
    ev = rdm.rank_one_sector_check(q)
    assert ev[0] == pytest.approx(0.5)
    with pytest.raises(DomainError):
        rdm.rank_one_sector_check(np.zeros(3))


def test_bosonic_binomial():
    mode = box_modes([3])[0]
    part = rdm.Bipartition.from_interval(0.0, 0.3)
    p = rdm.single_particle_spectrum(mode, part).sectors[1][0]
    spec = rdm.bosonic_two_particle_spectrum(mode, part)
    np.testing.assert_allclose([spec.sectors[k][0] for k in range(3)],
                               [(1 - p) ** 2, 2 * p * (1 - p), p * p], atol=1e-14)
    with pytest.raises(UnsupportedError):
        rdm.bosonic_two_particle_spectrum(mode, part, n_particles=3)
    lattice_mode = random_lattice_modes(0, 5, 1)[0][0]
    with pytest.raises(UsageError):
        rdm.bosonic_two_particle_spectrum(lattice_mode, rdm.Bipartition.from_sites([0]))


def test_entropy_values():
    assert rdm.entanglement_entropy(np.array([0.5, 0.5])) == pytest.approx(math.log(2))
    assert rdm.entanglement_entropy(np.array([1.0, 0.0])) == 0.0
    mu = [0.5] * 4
    spec = rdm.RdmSpectrum(rdm.subset_products(mu), 4)
    assert rdm.entanglement_entropy(spec) == pytest.approx(4 * math.log(2), abs=1e-12)


def test_subset_products_match_enumeration():
    mu = [0.1, 0.35, 0.8]
    sp = rdm.subset_products(mu)
    for k in range(4):
        ref = sorted(math.prod(mu[i] if i in S else 1 - mu[i] for i in range(3))
                     for S in combinations(range(3), k))
        np.testing.assert_allclose(sorted(sp[k]), ref)


def test_input_errors():
    modes = box_modes([1, 2])
    part = rdm.Bipartition.from_interval(0, 0.5)
    with pytest.raises(UsageError):
        rdm.rdm_spectrum_exact([modes[0], modes[0]], part)
    with pytest.raises(ResourceError):
        rdm.rdm_spectrum_exact(box_modes(list(range(1, 22))), part)
    with pytest.raises(UsageError):
        rdm.overlap_matrix(modes, rdm.Bipartition.from_sites([0]))
    lat, grid = random_lattice_modes(0, 16, 2)
    with pytest.raises(ResourceError):
        rdm.brute_force_rdm(lat, grid, rdm.Bipartition.from_sites([0]))
    with pytest.raises(DomainError):
        rdm.overlap_matrix(lat, rdm.Bipartition.from_sites([20]))
