"""Emptiness formation probability.

Two routes to the probability that region B holds no particle: the
finite-N determinant det(1 - O_B) of the overlap matrix on B, and the
Nystrom discretisation det(1 - W^{1/2} K W^{1/2}) of the Fredholm
determinant of the Christoffel-Darboux kernel restricted to B.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, NumericalError
from .rdm import Bipartition, overlap_matrix

MIN_NODES = 16
MAX_NODES = 1 << 14
NODES_PER_WAVELENGTH = 8
RANGE_TOL = 1e-8


def _as_region(B):
    if isinstance(B, Bipartition):
        if B.is_lattice:
            raise DomainError("EFP needs an interval region")
        return B
    lo, hi = B
    return Bipartition.from_interval(lo, hi)


@dataclass(frozen=True, eq=False)
class CdKernel:
    """K(x, y) = sum_eta conj(psi_eta(x)) psi_eta(y) over the occupied modes."""

    modes: tuple

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        if not self.modes:
            raise DomainError("kernel needs at least one mode")

    def values(self, x):
        return np.array([m(np.asarray(x, dtype=float)) for m in self.modes], dtype=complex)

    def __call__(self, x, y):
        """Kernel matrix K[i, j] = K(x_i, y_j)."""
        return self.values(x).conj().T @ self.values(y)

    def wavelength(self):
        """Shortest mode wavelength estimate: 2 * support / eta_max."""
        top = max(self.modes, key=lambda m: m.eta)
        lo, hi = top.support
        return 2.0 * (hi - lo) / top.eta


@dataclass(frozen=True, eq=False)
class NystromGrid:
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if len(self.nodes) < MIN_NODES:
            raise DomainError(f"Nystrom grid needs at least {MIN_NODES} nodes")
        if np.any(self.weights <= 0):
            raise DomainError("Nystrom weights must be positive")

    @property
    def node_count(self):
        return len(self.nodes)

    @classmethod
    def gauss_legendre(cls, B, n):
        """About ``n`` Gauss-Legendre nodes on B, split by interval length."""
        region = _as_region(B)
        total = region.measure
        xs, ws = [], []
        for lo, hi in region.intervals:
            k = max(MIN_NODES, int(math.ceil(n * (hi - lo) / total)))
            x, w = np.polynomial.legendre.leggauss(k)
            xs.append(0.5 * (hi + lo) + 0.5 * (hi - lo) * x)
            ws.append(0.5 * (hi - lo) * w)
        return cls(np.concatenate(xs), np.concatenate(ws))


def _check_range(p):
    if p < -RANGE_TOL or p > 1 + RANGE_TOL:
        raise NumericalError(f"emptiness probability {p} outside [0, 1]", estimate=p)
    return min(max(p, 0.0), 1.0)


def efp_determinant(modes, B):
    """det(delta_{eta beta} - int_B psi_eta conj(psi_beta))."""
    region = _as_region(B)
    if region.measure == 0:
        return 1.0
    o = overlap_matrix(list(modes), region).entries
    return _check_range(float(np.linalg.det(np.eye(len(o)) - o).real))


def _nystrom_det(kernel, grid):
    s = np.sqrt(grid.weights)
    k = s[:, None] * kernel(grid.nodes, grid.nodes) * s[None, :]
    return float(np.linalg.det(np.eye(len(s)) - k).real)


def efp_fredholm(kernel, B, tol=1e-6, max_nodes=MAX_NODES):
    """det(1 - K) restricted to B.

    With a ``NystromGrid`` the determinant on that grid is returned as is;
    with an interval the node count starts at 8 nodes per shortest
    wavelength and doubles until two determinants differ by <= ``tol``.
    """
    if isinstance(B, NystromGrid):
        return _check_range(_nystrom_det(kernel, B))
    region = _as_region(B)
    if region.measure == 0:
        return 1.0
    n = max(MIN_NODES, int(math.ceil(NODES_PER_WAVELENGTH * region.measure / kernel.wavelength())))
    prev = _nystrom_det(kernel, NystromGrid.gauss_legendre(region, n))
    while True:
        n *= 2
        if n > max_nodes:
            raise NumericalError("Nystrom determinant did not converge", estimate=prev)
        cur = _nystrom_det(kernel, NystromGrid.gauss_legendre(region, n))
        if abs(cur - prev) <= tol:
            return _check_range(cur)
        prev = cur


__all__ = ["CdKernel", "NystromGrid", "efp_determinant", "efp_fredholm"]
