"""Composite Gauss-Legendre rules.

Integrands are evaluated on whole node arrays at once, so callables must be
vectorised over numpy arrays.
"""
from functools import lru_cache

import numpy as np

from .errors import NumericalError

DEFAULT_ORDER = 20
MAX_PANELS = 1 << 16


@lru_cache(maxsize=64)
def _leggauss(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre_nodes(a, b, panels=1, order=DEFAULT_ORDER):
    """Nodes and weights of a composite rule with equal panels on [a, b]."""
    x, w = _leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def fixed(f, a, b, panels=1, order=DEFAULT_ORDER):
    nodes, weights = gauss_legendre_nodes(a, b, panels, order)
    return np.sum(weights * f(nodes))


def integrate(f, a, b, tol=1e-12, order=DEFAULT_ORDER, panels=1, max_panels=MAX_PANELS):
    """Integrate ``f`` over [a, b], doubling the panel count until two
    successive estimates differ by at most ``tol`` (absolute).

    ``panels`` is the starting count; pass a value that resolves the
    integrand's oscillations to avoid spurious early agreement.
    """
    if a == b:
        return 0.0 * f(np.array([a]))[0]
    panels = max(1, int(panels))
    prev = fixed(f, a, b, panels, order)
    while True:
        panels *= 2
        if panels > max_panels:
            raise NumericalError(
                f"quadrature on [{a}, {b}] did not reach tol={tol:g}", estimate=prev)
        cur = fixed(f, a, b, panels, order)
        if abs(cur - prev) <= tol:
            return cur
        prev = cur


def integrate_sqrt_endpoint(g, x_turn, a, b, side, tol=1e-12, order=DEFAULT_ORDER, panels=1):
    """Integrate ``g`` over [a, b] where ``g`` may behave like
    ``|x - x_turn|**(-1/2)`` at the turning point ``x_turn``.

    ``side='left'`` means x_turn <= a; the substitution x = x_turn + u**2
    (or x = x_turn - u**2 for ``side='right'``, x_turn >= b) turns the
    integrand into the smooth ``2 u g(x(u))``.
    """
    if side == "left":
        ua, ub = np.sqrt(max(a - x_turn, 0.0)), np.sqrt(max(b - x_turn, 0.0))

        def h(u):
            return 2.0 * u * g(x_turn + u * u)

        return integrate(h, ua, ub, tol=tol, order=order, panels=panels)
    if side == "right":
        ua, ub = np.sqrt(max(x_turn - b, 0.0)), np.sqrt(max(x_turn - a, 0.0))

        def h(u):
            return 2.0 * u * g(x_turn - u * u)

        return integrate(h, ua, ub, tol=tol, order=order, panels=panels)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")
