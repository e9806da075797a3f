import math

import numpy as np
import pytest

from oracles import REPRO_B_EXACT_ENERGIES, REPRO_I_EXACT_ENERGIES, box_lambda, box_offdiag
from semiclassical_ee import asymptotics as asy
from semiclassical_ee import lattice as L
from semiclassical_ee import semiclassics as sc
from semiclassical_ee.errors import DomainError
from semiclassical_ee.potentials import PhysicalParams, PotentialSpec
from semiclassical_ee.rdm import Bipartition

HARMONIC = PotentialSpec.harmonic(1.0)
BOX = PotentialSpec.box(1.0)


@pytest.fixture(scope="module")
def orbits():
    return sc.classical_orbit(HARMONIC, 10.5), sc.classical_orbit(HARMONIC, 20.5)


def test_fast_term_matches_independent_quadrature(orbits):
    val = asy.overlap_integral_numeric(*orbits, (-1.0, 1.0), 1.0, fast_term_only=True)
    assert abs(val - REPRO_I_EXACT_ENERGIES) < 1e-9
    b = asy.boundary_term_asymptotic(*orbits, (-1.0, 1.0), 1.0)
    assert abs(b - REPRO_B_EXACT_ENERGIES) < 1e-11


def test_symmetric_interval_makes_fast_term_real(orbits):
    # A(-x) = S - A(x) and the half-action sum pi (E1 + E2) = 31 pi make the integrand's
    # imaginary part odd in x
    val = asy.overlap_integral_numeric(*orbits, (-1.0, 1.0), 1.0, fast_term_only=True)
    assert abs(val.imag) < 1e-12


def test_residual_is_second_order_in_hbar(orbits):
    res = []
    for h in (0.5, 0.25, 0.125):
        n = asy.overlap_integral_numeric(*orbits, (0.0, 1.0), h, fast_term_only=True)
        res.append(abs(n - asy.boundary_term_asymptotic(*orbits, (0.0, 1.0), h)))
    for r in (res[0] / res[1], res[1] / res[2]):
        assert 3.0 <= r <= 5.0


def test_endpoint_contribution_linear_in_hbar(orbits):
    b1 = np.abs(asy.boundary_contributions(*orbits, [-1.0, 1.0], 1.0))
    b2 = np.abs(asy.boundary_contributions(*orbits, [-1.0, 1.0], 0.5))
    np.testing.assert_allclose(b1 / b2, 2.0, rtol=1e-12)


def test_shrunk_region_gives_zero(orbits):
    assert asy.overlap_integral_numeric(*orbits, (0.3, 0.3), 1.0) == 0
    assert asy.boundary_term_asymptotic(*orbits, (0.3, 0.3), 1.0) == 0


def test_turning_point_inside_region(orbits):
    with pytest.raises(DomainError):
        asy.boundary_term_asymptotic(*orbits, (-1.0, orbits[0].x_right), 1.0)
    with pytest.raises(DomainError):
        asy.overlap_integral_numeric(*orbits, (0.0, 5.0), 1.0)


@pytest.mark.parametrize("E", [10.5, 20.5, 50.5])
def test_diagonal_overlap_near_classical_probability(E):
    o = sc.classical_orbit(HARMONIC, E)
    val = asy.overlap_integral_numeric(o, o, (-1.0, 1.0), 1.0)
    p = sc.classical_probability(Bipartition.from_interval(-1.0, 1.0), o)
    assert abs(val.imag) < 1e-12
    assert abs(val.real - p) <= 0.01


def test_decomposition_adds_up(orbits):
    d = asy.overlap_decomposition(*orbits, (-0.5, 1.5), 1.0)
    assert d.total == pytest.approx(2 * (d.slow_part + d.fast_part).real)
    assert abs(d.total) <= 1 + 1e-6


def test_stationary_scan():
    o1, o2 = sc.classical_orbit(HARMONIC, 10.5), sc.classical_orbit(HARMONIC, 20.5)
    assert asy.stationary_point_scan(o1, o2, (-1.0, 1.0)) == []
    b1, b2 = sc.classical_orbit(BOX, 3.0), sc.classical_orbit(BOX, 12.0)
    assert asy.stationary_point_scan(b1, b2, (0.1, 0.9)) == []
    with pytest.raises(DomainError):
        asy.stationary_point_scan(o1, o1, (-1.0, 1.0))


def test_phase_derivatives(orbits):
    ph = asy.PhaseFunctions(*orbits)
    x = np.linspace(-1, 1, 5)
    h = 1e-6
    np.testing.assert_allclose((ph.f(x + h) - ph.f(x - h)) / (2 * h), ph.f_prime(x), rtol=1e-7)
    assert np.all(ph.f_prime(x) > 0)


@pytest.fixture(scope="module")
def box_modes():
    return L.continuum_modes(BOX, PhysicalParams(), [3, 5, 7, 10, 20, 40, 80, 5 * 2, 160])


def test_box_limit_check_diagonal(box_modes):
    val, target, err = asy.overlap_limit_check(box_modes, (0.0, 0.3), 7, 7)
    assert val.real == pytest.approx(box_lambda(7), abs=1e-12)
    assert target == pytest.approx(0.3)
    assert err <= 1 / (14 * math.pi)


def test_box_limit_check_off_diagonal(box_modes):
    val, target, err = asy.overlap_limit_check(box_modes, (0.0, 0.3), 3, 5)
    assert target == 0.0
    assert val.real == pytest.approx(box_offdiag(3, 5), abs=1e-12)
    assert err <= 1 / (2 * math.pi * 2) * 2


def test_box_full_region_is_orthonormal(box_modes):
    assert asy.overlap_limit_check(box_modes, (0.0, 1.0), 3, 5)[2] < 1e-12
    assert asy.overlap_limit_check(box_modes, (0.0, 1.0), 7, 7)[0].real == pytest.approx(1.0, abs=1e-12)


def test_off_diagonal_decay(box_modes):
    for eta in (5, 10, 20, 40):
        val = asy.overlap_limit_check(box_modes, (0.0, 0.3), eta, 2 * eta)[0]
        assert abs(val) * eta <= 1.0
        diag = asy.overlap_limit_check(box_modes, (0.0, 0.3), eta, eta)[0].real
        assert abs(diag - 0.3) <= 1 / (2 * math.pi * eta)


def test_harmonic_limit_check_target():
    modes = L.continuum_modes(HARMONIC, PhysicalParams(), [30])
    val, target, err = asy.overlap_limit_check(modes, (-1.0, 1.0), 30, 30, potential=HARMONIC)
    assert err <= 0.01
    with pytest.raises(DomainError):
        asy.overlap_limit_check(modes, (-1.0, 1.0), 30, 31)


@pytest.mark.parametrize("eta", [20, 80, 160])
def test_fixed_label_difference_does_not_decay(eta):
    # int_0^x 2 sin(a pi t) sin(b pi t) dt -> sin(d pi x) / (d pi) for b - a = d fixed
    modes = L.continuum_modes(BOX, PhysicalParams(), [eta, eta + 1])
    val = asy.overlap_limit_check(modes, (0.0, 0.3), eta, eta + 1)[0].real
    assert val == pytest.approx(math.sin(0.3 * math.pi) / math.pi, abs=1 / (2 * math.pi * eta))
