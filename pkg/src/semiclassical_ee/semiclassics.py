"""Classical orbits, WKB wavefunctions and classical-limit predictions.

All orbit integrals with inverse-square-root endpoint behaviour
(period, time spent in a region) are computed after the substitution
``x = x_turn +/- u**2``, which makes the integrand smooth.
"""
from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import comb, xlogy

from . import quadrature
from .errors import DomainError, UnsupportedError
from .potentials import PhysicalParams
from .rdm import Bipartition, RdmSpectrum, subset_products

#: distance (relative to the orbit width) below which a point counts as a turning point
TURNING_MARGIN = 1e-3
_ACTION_PANELS = 8


@dataclass(frozen=True, eq=False)
class ClassicalOrbit:
    energy: float
    x_left: float
    x_right: float
    period: float
    potential: object
    params: PhysicalParams = PhysicalParams()
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def width(self):
        return self.x_right - self.x_left

    @property
    def is_box(self):
        return self.potential.kind == "box"

    def momentum(self, x):
        return classical_momentum(x, self.energy, self.potential, self.params, clip=True)

    @cached_property
    def half_action(self):
        """Action from the left to the right turning point."""
        return float(action(self, np.array([self.x_right]))[0])


# ---------------------------------------------------------------- orbit geometry


def classical_momentum(x, E, pot, params=PhysicalParams(), clip=False):
    """sqrt(2 m (E - V(x))). Raises DomainError in forbidden regions unless
    ``clip`` (used for quadrature nodes that round past a turning point)."""
    x = np.asarray(x, dtype=float)
    kinetic = E - pot(x, params.mass)
    if not clip:
        tol = 1e-12 * max(1.0, abs(E))
        if np.any(kinetic < -tol):
            raise DomainError("E < V(x): classically forbidden point")
    return np.sqrt(2.0 * params.mass * np.maximum(kinetic, 0.0))


def turning_points(pot, E, params=PhysicalParams()):
    """Roots of E - V(x) bracketing the well around the potential minimum."""
    m = params.mass
    if pot.kind == "box":
        if E <= 0:
            raise DomainError("box orbit needs E > 0")
        return 0.0, pot.length
    x0 = pot.minimum(m)
    if E <= float(pot(x0, m)):
        raise DomainError(f"E={E} is not above the potential minimum")
    lo_dom, hi_dom = pot.domain

    def excess(x):
        return float(pot(x, m)) - E

    def bracket(direction):
        edge = lo_dom if direction < 0 else hi_dom
        step = 1.0 if not math.isfinite(edge) else 0.25 * abs(edge - x0) or 1.0
        inner = x0
        for _ in range(200):
            outer = x0 + direction * step
            if math.isfinite(edge) and direction * (outer - edge) >= 0:
                outer = edge
                if excess(outer) < 0:
                    raise DomainError("no sign change of E - V inside the potential domain")
                return inner, outer
            if excess(outer) > 0:
                return inner, outer
            inner = outer
            step *= 2.0
        raise DomainError("no sign change of E - V found: potential not confining")

    a, b = bracket(-1)
    xl = brentq(excess, b, a, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    a, b = bracket(+1)
    xr = brentq(excess, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    inner = np.linspace(xl, xr, 4003)[1:-1]
    if np.any(pot(inner, m) > E + 1e-12 * max(1.0, abs(E))):
        raise UnsupportedError("E - V changes sign more than twice: multi-well orbit")
    return float(xl), float(xr)


def _time_integral(pot, params, E, xl, xr, a, b, rtol=1e-12):
    """int_a^b m / p(x) dx for x_l <= a <= b <= x_r.

    ``rtol`` is relative to m (x_r - x_l) / p_max. Rounding in E - V(x) next
    to a turning point limits the attainable accuracy to roughly 1e-13 of
    that scale.
    """
    m = params.mass
    if b <= a:
        return 0.0
    if pot.kind == "box":
        return m * (b - a) / math.sqrt(2 * m * E)
    p_max = math.sqrt(2 * m * (E - float(pot(pot.minimum(m), m))))
    tol = rtol * m * (xr - xl) / p_max

    def g(x):
        return m / classical_momentum(x, E, pot, params, clip=True)

    mid = 0.5 * (xl + xr)
    total = 0.0
    if a < mid:
        total += quadrature.integrate_sqrt_endpoint(g, xl, a, min(b, mid), "left", tol=tol, panels=4)
    if b > mid:
        total += quadrature.integrate_sqrt_endpoint(g, xr, max(a, mid), b, "right", tol=tol, panels=4)
    return float(total)


def orbit_period(pot, E, params=PhysicalParams()):
    xl, xr = turning_points(pot, E, params)
    return 2.0 * _time_integral(pot, params, E, xl, xr, xl, xr)


def classical_orbit(pot, E, params=PhysicalParams()):
    xl, xr = turning_points(pot, E, params)
    T = 2.0 * _time_integral(pot, params, E, xl, xr, xl, xr)
    return ClassicalOrbit(float(E), xl, xr, T, pot, params)


def _check_inside(part, orbit):
    if part.is_lattice:
        raise DomainError("classical quantities need an interval bipartition")
    slack = 1e-12 * max(1.0, orbit.width)
    for lo, hi in part.intervals:
        if lo < orbit.x_left - slack or hi > orbit.x_right + slack:
            raise DomainError(f"interval [{lo}, {hi}] leaves the accessible region "
                              f"[{orbit.x_left}, {orbit.x_right}]")


def _clamp(orbit, lo, hi):
    return max(lo, orbit.x_left), min(hi, orbit.x_right)


def classical_probability(part, orbit):
    """Fraction of the period spent in region A."""
    _check_inside(part, orbit)
    t = 0.0
    for lo, hi in part.intervals:
        a, b = _clamp(orbit, lo, hi)
        t += _time_integral(orbit.potential, orbit.params, orbit.energy,
                            orbit.x_left, orbit.x_right, a, b)
    return min(max(2.0 * t / orbit.period, 0.0), 1.0)


def microcanonical_entropy(part, orbit):
    """-log(Gamma(A)/T); ``math.inf`` when A is never visited."""
    p = classical_probability(part, orbit)
    return math.inf if p == 0.0 else -math.log(p)


# ---------------------------------------------------------------- WKB


def action(orbit, x):
    """int_{x_l}^x p(y) dy, vectorised over ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if orbit.is_box:
        p = math.sqrt(2 * orbit.params.mass * orbit.energy)
        return p * (x - orbit.x_left)
    xl, xr = orbit.x_left, orbit.x_right
    gx, gw = quadrature.gauss_legendre_nodes(0.0, 1.0, _ACTION_PANELS)
    mid = 0.5 * (xl + xr)

    def from_turn(x_turn, dist, sign):
        s = np.sqrt(np.maximum(dist, 0.0))
        u = s[:, None] * gx[None, :]
        p = orbit.momentum(x_turn + sign * u * u)
        return np.sum(gw[None, :] * 2.0 * u * p, axis=1) * s

    out = np.empty_like(x)
    left = x <= mid
    out[left] = from_turn(xl, x[left] - xl, 1.0)
    if np.any(~left):
        half = orbit._cache.get("half_action")
        if half is None:
            half = float(from_turn(xl, np.array([mid - xl]), 1.0)[0]
                         + from_turn(xr, np.array([xr - mid]), -1.0)[0])
            orbit._cache["half_action"] = half
        out[~left] = half - from_turn(xr, xr - x[~left], -1.0)
    return out


@dataclass(frozen=True, eq=False)
class WkbMode:
    orbit: ClassicalOrbit
    hbar: float = 1.0
    include_correction: bool = False
    gamma_reference: float = None

    @property
    def normalization(self):
        return 2.0 * math.sqrt(self.orbit.params.mass / self.orbit.period)


def wkb_wavefunction(x, mode):
    """(N / sqrt(p)) cos(A(x)/hbar - pi/4), times (1 - i hbar gamma) with correction."""
    orbit = mode.orbit
    x = np.asarray(x, dtype=float)
    if np.any(x <= orbit.x_left) or np.any(x >= orbit.x_right):
        raise DomainError("WKB wavefunction is evaluated strictly inside the turning points")
    p = orbit.momentum(x)
    psi = mode.normalization / np.sqrt(p) * np.cos(action(orbit, x).reshape(x.shape) / mode.hbar - 0.25 * math.pi)
    psi = psi.astype(complex)
    if mode.include_correction:
        psi = psi * (1.0 - 1j * mode.hbar * gamma_correction(x, orbit, mode.gamma_reference))
    return psi


def gamma_correction(x, orbit, reference=None, method="auto"):
    """First-order WKB amplitude correction gamma(x).

    gamma = p'/(4 p^2) + (1/8) int_ref^x p'^2 / p^3 dt, with ``reference``
    defaulting to the potential minimum. The harmonic potential uses the
    closed form omega y (y^2 - 6) / (48 E (1 - y^2)^{3/2}), y = x / x_turn,
    which is the same function for the default reference; ``method=
    'quadrature'`` forces the generic route.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    margin = TURNING_MARGIN * orbit.width
    if np.any(x - orbit.x_left < margin) or np.any(orbit.x_right - x < margin):
        raise DomainError("gamma is singular at the turning points; stay inside the margin")
    pot, m, E = orbit.potential, orbit.params.mass, orbit.energy
    if pot.kind == "box":
        return np.zeros_like(x)
    ref = pot.minimum(m) if reference is None else float(reference)
    if pot.kind == "harmonic" and method == "auto" and ref == 0.0:
        y = x / orbit.x_right
        return pot.omega * y * (y * y - 6.0) / (48.0 * E * (1.0 - y * y) ** 1.5)

    def p(t):
        return orbit.momentum(t)

    def dp(t):
        return -m * pot.derivative(t, m) / p(t)

    def integrand(t):
        return dp(t) ** 2 / p(t) ** 3

    out = np.empty_like(x)
    for i, xi in enumerate(x):
        tail = quadrature.integrate(integrand, ref, xi, tol=1e-13, panels=2) if xi != ref else 0.0
        out[i] = dp(np.array([xi]))[0] / (4.0 * p(np.array([xi]))[0] ** 2) + 0.125 * tail
    return out


def corrected_occupation(part, orbit, hbar):
    """Occupation of A including the O(hbar^2) weight (1 + hbar^2 gamma^2).

    The cycle-averaged density (m / (T p)) (1 + hbar^2 gamma^2) keeps the
    leading normalisation 2 sqrt(m/T): gamma^2 / p is not integrable up to
    the turning points, so the density cannot be renormalised over the
    whole orbit.
    """
    base = classical_probability(part, orbit)
    if orbit.is_box:
        return base
    m, T = orbit.params.mass, orbit.period
    extra = 0.0
    for lo, hi in part.intervals:
        a, b = _clamp(orbit, lo, hi)
        if b > a:
            extra += quadrature.integrate(
                lambda x: gamma_correction(x, orbit) ** 2 / orbit.momentum(x), a, b, tol=1e-15, panels=2)
    return base + 2.0 * m * hbar ** 2 * extra / T


# ---------------------------------------------------------------- classical predictions


def _check_probs(p_list):
    p = np.asarray(p_list, dtype=float)
    if np.any(p < 0) or np.any(p > 1):
        raise DomainError(f"probabilities must lie in [0, 1], got {p}")
    return p


def classical_rdm_spectrum(p_list):
    p = _check_probs(p_list)
    return RdmSpectrum(subset_products(p), len(p))


def classical_entropy(p_list):
    """Shannon entropy of N independent bits with success probabilities ``p_list``."""
    p = _check_probs(p_list)
    return float(-np.sum(xlogy(p, p) + xlogy(1 - p, 1 - p)))


def binomial_entropy(N, p):
    if N < 1 or not 0 <= p <= 1:
        raise DomainError("need N >= 1 and p in [0, 1]")
    k = np.arange(N + 1)
    probs = comb(N, k) * p ** k * (1 - p) ** (N - k)
    return float(-np.sum(xlogy(probs, probs)))


def classical_prediction(part, orbits):
    """P_cl per particle plus the induced spectrum and entropy."""
    p = [classical_probability(part, o) for o in orbits]
    return {"p_cl": p, "spectrum": classical_rdm_spectrum(p), "entropy": classical_entropy(p)}


__all__ = [
    "Bipartition", "ClassicalOrbit", "WkbMode", "classical_momentum", "turning_points",
    "orbit_period", "classical_orbit", "classical_probability", "microcanonical_entropy",
    "action", "wkb_wavefunction", "gamma_correction", "corrected_occupation",
    "classical_rdm_spectrum", "classical_entropy", "binomial_entropy", "classical_prediction",
]
