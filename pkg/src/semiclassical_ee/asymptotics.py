"""Stationary-phase analysis of overlaps between semiclassical modes.

With psi_S = N p^{-1/2} cos(A(x)/hbar - pi/4) the product of two modes
splits into a slowly varying term exp(i g / hbar), g = A_eta - A_beta, and a
fast term -i exp(i f / hbar), f = A_eta + A_beta. The fast term has no
stationary points, so its integral over A is given to O(hbar) by the
boundary contribution obtained from one integration by parts.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import brentq

from . import quadrature
from .errors import DomainError
from .rdm import Bipartition, overlap_matrix
from .semiclassics import TURNING_MARGIN, action, classical_probability, classical_orbit

NODES_PER_PERIOD = 12
SCAN_POINTS = 2001


@dataclass(frozen=True)
class PhaseFunctions:
    """f = A_eta + A_beta and g = A_eta - A_beta for a pair of orbits."""

    orbit_eta: object
    orbit_beta: object

    def actions(self, x):
        x = np.asarray(x, dtype=float)
        return (action(self.orbit_eta, x).reshape(x.shape),
                action(self.orbit_beta, x).reshape(x.shape))

    def momenta(self, x):
        return self.orbit_eta.momentum(x), self.orbit_beta.momentum(x)

    def f(self, x):
        a, b = self.actions(x)
        return a + b

    def g(self, x):
        a, b = self.actions(x)
        return a - b

    def f_prime(self, x):
        a, b = self.momenta(x)
        return a + b

    def g_prime(self, x):
        a, b = self.momenta(x)
        return a - b


@dataclass(frozen=True)
class OverlapDecomposition:
    """total = slow_part + fast_part + complex conjugate."""

    slow_part: complex
    fast_part: complex
    total: complex
    eta: object
    beta: object
    region: Bipartition


def _intervals(A):
    if isinstance(A, Bipartition):
        if A.is_lattice:
            raise DomainError("asymptotics need an interval region")
        return A, list(A.intervals)
    lo, hi = A
    return Bipartition.from_interval(lo, hi), [(float(lo), float(hi))]


def _check_margin(orbits, intervals):
    for o in orbits:
        margin = TURNING_MARGIN * o.width
        for lo, hi in intervals:
            if lo < o.x_left + margin or hi > o.x_right - margin:
                raise DomainError(
                    f"[{lo}, {hi}] comes within {margin:.3g} of a turning point of the "
                    f"E={o.energy} orbit in [{o.x_left}, {o.x_right}]")


def _oscillatory(fun, lo, hi, rate, tol):
    """Integrate ``fun`` on [lo, hi] with panels resolving phase rate ``rate``."""
    if hi <= lo:
        return 0j
    periods = rate * (hi - lo) / (2 * math.pi)
    panels = max(2, int(math.ceil(periods * NODES_PER_PERIOD / quadrature.DEFAULT_ORDER)))
    return complex(quadrature.integrate(fun, lo, hi, tol=tol, panels=panels))


def _pieces(orbit_eta, orbit_beta, A, hbar, tol):
    region, intervals = _intervals(A)
    _check_margin((orbit_eta, orbit_beta), intervals)
    ph = PhaseFunctions(orbit_eta, orbit_beta)

    def slow(x):
        pa, pb = ph.momenta(x)
        return np.exp(1j * ph.g(x) / hbar) / np.sqrt(pa * pb)

    def fast(x):
        pa, pb = ph.momenta(x)
        return -1j * np.exp(1j * ph.f(x) / hbar) / np.sqrt(pa * pb)

    s = f = 0j
    for lo, hi in intervals:
        xs = np.linspace(lo, hi, 65)
        rate_f = float(np.max(ph.f_prime(xs))) / hbar
        rate_g = float(np.max(np.abs(ph.g_prime(xs)))) / hbar
        s += _oscillatory(slow, lo, hi, rate_g, tol)
        f += _oscillatory(fast, lo, hi, rate_f, tol)
    return region, s, f


def overlap_integral_numeric(orbit_eta, orbit_beta, A, hbar=1.0, fast_term_only=False, tol=1e-10):
    """int_A psi_S^(eta)* psi_S^(beta) dx, or with ``fast_term_only`` the bare

        I = int_A -i exp(i f / hbar) / sqrt(p_eta p_beta) dx

    without normalisation constants.
    """
    if fast_term_only:
        region, intervals = _intervals(A)
        _check_margin((orbit_eta, orbit_beta), intervals)
        ph = PhaseFunctions(orbit_eta, orbit_beta)

        def fast(x):
            pa, pb = ph.momenta(x)
            return -1j * np.exp(1j * ph.f(x) / hbar) / np.sqrt(pa * pb)

        total = 0j
        for lo, hi in intervals:
            rate = float(np.max(ph.f_prime(np.linspace(lo, hi, 65)))) / hbar
            total += _oscillatory(fast, lo, hi, rate, tol)
        return total
    return overlap_decomposition(orbit_eta, orbit_beta, A, hbar, tol).total


def overlap_decomposition(orbit_eta, orbit_beta, A, hbar=1.0, tol=1e-10):
    region, s, f = _pieces(orbit_eta, orbit_beta, A, hbar, tol)
    m = orbit_eta.params.mass
    pref = m / math.sqrt(orbit_eta.period * orbit_beta.period)
    slow, fast = pref * s, pref * f
    total = slow + fast + (slow + fast).conjugate()
    return OverlapDecomposition(slow, fast, total, orbit_eta.energy, orbit_beta.energy, region)


def boundary_contributions(orbit_eta, orbit_beta, x, hbar=1.0):
    """-hbar exp(i f / hbar) / ((p_eta + p_beta) sqrt(p_eta p_beta)) at ``x``."""
    ph = PhaseFunctions(orbit_eta, orbit_beta)
    x = np.asarray(x, dtype=float)
    pa, pb = ph.momenta(x)
    return -hbar * np.exp(1j * ph.f(x) / hbar) / ((pa + pb) * np.sqrt(pa * pb))


def boundary_term_asymptotic(orbit_eta, orbit_beta, A, hbar=1.0):
    """Leading boundary asymptotics of the fast term, b(hi) - b(lo) per interval."""
    _, intervals = _intervals(A)
    _check_margin((orbit_eta, orbit_beta), intervals)
    total = 0j
    for lo, hi in intervals:
        b = boundary_contributions(orbit_eta, orbit_beta, [lo, hi], hbar)
        total += complex(b[1] - b[0])
    return total


def stationary_point_scan(orbit_eta, orbit_beta, A):
    """Points of A where p_eta = p_beta; expected to be empty for distinct energies."""
    if orbit_eta.energy == orbit_beta.energy:
        raise DomainError("stationary point scan needs distinct energies")
    _, intervals = _intervals(A)
    ph = PhaseFunctions(orbit_eta, orbit_beta)
    lo_ok = max(orbit_eta.x_left, orbit_beta.x_left)
    hi_ok = min(orbit_eta.x_right, orbit_beta.x_right)
    roots = []
    for lo, hi in intervals:
        lo, hi = max(lo, lo_ok), min(hi, hi_ok)
        if hi <= lo:
            continue
        xs = np.linspace(lo, hi, SCAN_POINTS)
        gp = ph.g_prime(xs)
        roots.extend(float(x) for x in xs[gp == 0.0])
        for i in np.flatnonzero(gp[:-1] * gp[1:] < 0):
            roots.append(brentq(lambda t: float(ph.g_prime(np.array([t]))[0]), xs[i], xs[i + 1]))
    return sorted(roots)


def overlap_limit_check(modes_exact, A, eta, beta, potential=None, params=None, tol=1e-12):
    """Exact overlap int_A psi^(eta)* psi^(beta) against delta_{eta beta} P_cl(A).

    ``modes_exact`` is a sequence of continuum modes; ``potential`` is needed
    for the classical target unless the modes come from a box, in which case
    P_cl(A) = |A| / l.
    """
    region, _ = _intervals(A)
    by_label = {m.eta: m for m in modes_exact}
    try:
        me, mb = by_label[eta], by_label[beta]
    except KeyError as exc:
        raise DomainError(f"mode {exc.args[0]} not supplied") from None
    pair = [me] if eta == beta else [me, mb]
    o = overlap_matrix(pair, region, tol=tol).entries
    value = complex(o[0, 0] if eta == beta else o[0, 1])
    if eta != beta:
        target = 0.0
    elif potential is None or potential.kind == "box":
        lo, hi = me.support
        target = region.measure / (hi - lo)
    else:
        from .potentials import PhysicalParams
        orbit = classical_orbit(potential, me.energy, params or PhysicalParams())
        target = classical_probability(region, orbit)
    return value, target, abs(value - target)


__all__ = [
    "PhaseFunctions", "OverlapDecomposition", "overlap_integral_numeric", "overlap_decomposition",
    "boundary_contributions", "boundary_term_asymptotic", "stationary_point_scan",
    "overlap_limit_check",
]
