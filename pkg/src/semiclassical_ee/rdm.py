"""Exact reduced-density-matrix spectra for a spatial bipartition.

Two independent routes are provided for Slater-determinant states:

* ``rdm_spectrum_exact`` diagonalises the N x N overlap matrix of the
  occupied modes on region A and builds the spectrum from subset products
  of its eigenvalues;
* ``brute_force_rdm`` builds the many-body amplitudes det[psi_{l_j}^{(eta_i)}]
  and traces out region B literally, sector by sector.
"""
from dataclasses import dataclass, field
from itertools import combinations
import math

import numpy as np

from . import quadrature
from .errors import DomainError, NumericalError, ResourceError, UnsupportedError, UsageError
from .lattice import CONTINUUM, LATTICE

EIGEN_CUTOFF = 1e-12
RANGE_TOL = 1e-10
MAX_MODES_EXACT = 20
MAX_SITES_BRUTE = 14
MAX_PARTICLES_BRUTE = 4


@dataclass(frozen=True)
class Bipartition:
    """Region A, either a set of lattice site indices or a union of closed intervals."""

    sites: tuple = None
    intervals: tuple = None

    def __post_init__(self):
        if (self.sites is None) == (self.intervals is None):
            raise DomainError("give exactly one of sites or intervals")
        if self.sites is not None:
            s = tuple(sorted(int(i) for i in self.sites))
            if len(set(s)) != len(s) or (s and s[0] < 0):
                raise DomainError("sites must be distinct non-negative indices")
            object.__setattr__(self, "sites", s)
        else:
            ivs = tuple(sorted((float(lo), float(hi)) for lo, hi in self.intervals))
            for lo, hi in ivs:
                if not lo <= hi:
                    raise DomainError(f"interval [{lo}, {hi}] has lo > hi")
            object.__setattr__(self, "intervals", ivs)

    @classmethod
    def from_sites(cls, sites):
        return cls(sites=tuple(sites))

    @classmethod
    def from_interval(cls, lo, hi):
        return cls(intervals=((lo, hi),))

    @property
    def is_lattice(self):
        return self.sites is not None

    @property
    def measure(self):
        if self.is_lattice:
            return len(self.sites)
        return sum(hi - lo for lo, hi in self.intervals)

    def complement(self, total):
        """Region B. ``total`` is the site count (lattice) or the (lo, hi)
        support of the system (continuum)."""
        if self.is_lattice:
            keep = set(self.sites)
            return Bipartition.from_sites(i for i in range(int(total)) if i not in keep)
        lo, hi = total
        out, cur = [], lo
        for a, b in self.intervals:
            if a > cur:
                out.append((cur, min(a, hi)))
            cur = max(cur, b)
        if cur < hi:
            out.append((cur, hi))
        return Bipartition(intervals=tuple(out) if out else ((lo, lo),))


@dataclass(frozen=True, eq=False)
class OverlapMatrix:
    entries: np.ndarray
    mode_labels: tuple

    @property
    def size(self):
        return self.entries.shape[0]

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.entries)


@dataclass(eq=False)
class RdmSpectrum:
    """Sector k -> eigenvalues of the k-particle block, descending."""

    sectors: dict
    n_particles: int

    def __post_init__(self):
        self.sectors = {int(k): np.sort(np.asarray(v, dtype=float))[::-1]
                        for k, v in sorted(self.sectors.items())}

    def values(self):
        return np.concatenate([v for v in self.sectors.values()]) if self.sectors else np.zeros(0)

    def total(self):
        return float(np.sum(self.values()))

    def nonzero(self, cutoff=EIGEN_CUTOFF):
        return RdmSpectrum({k: v[v >= cutoff] for k, v in self.sectors.items()}, self.n_particles)

    def sorted_values(self, cutoff=EIGEN_CUTOFF):
        v = self.values()
        return np.sort(v[v >= cutoff])[::-1]


@dataclass(frozen=True, eq=False)
class ManyBodyStateDense:
    """Amplitudes over ordered site tuples l_1 < ... < l_N."""

    tuples: list
    amplitudes: np.ndarray
    site_count: int
    n_particles: int
    index: dict = field(default=None, repr=False)

    def norm(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2))


# ---------------------------------------------------------------- overlaps


def _check_modes(modes):
    if not modes:
        raise UsageError("need at least one mode")
    rep = {m.representation for m in modes}
    if len(rep) != 1:
        raise UsageError("modes mix lattice and continuum representations")
    if LATTICE in rep:
        grids = {m.grid for m in modes}
        if len(grids) != 1:
            raise UsageError("lattice modes live on different grids")
    return rep.pop()


def _continuum_overlap(modes, lo, hi, tol):
    if hi <= lo:
        return np.zeros((len(modes), len(modes)), dtype=complex)
    if all(m.evaluator is not None for m in modes):
        width = max(m.support[1] - m.support[0] for m in modes)
        panels = max(2, int(math.ceil(2 * max(m.eta for m in modes) * (hi - lo) / width)))
        prev = None
        while panels <= quadrature.MAX_PANELS:
            x, w = quadrature.gauss_legendre_nodes(lo, hi, panels)
            phi = np.array([m(x) for m in modes], dtype=complex)
            cur = (phi * w) @ phi.conj().T
            if prev is not None and np.max(np.abs(cur - prev)) <= tol:
                return cur
            prev, panels = cur, panels * 2
        raise NumericalError("overlap quadrature did not converge", estimate=prev)
    # spline-backed modes: piecewise cubic, integrate cell by cell exactly
    knots = set()
    for m in modes:
        a, b = m.support
        knots.update(np.concatenate([[a], m.grid.positions, [b]]).tolist())
    k = np.array(sorted(knots))
    k = np.concatenate([[lo], k[(k > lo) & (k < hi)], [hi]])
    xg, wg = quadrature._leggauss(5)
    half = 0.5 * np.diff(k)
    mid = 0.5 * (k[1:] + k[:-1])
    x = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel()
    phi = np.array([m(x) for m in modes], dtype=complex)
    return (phi * w) @ phi.conj().T


def overlap_matrix(modes, part, tol=1e-13):
    """O_{eta beta} = sum_{l in A} psi_l^(eta) conj(psi_l^(beta)) (or the integral over A)."""
    rep = _check_modes(modes)
    labels = tuple(m.eta for m in modes)
    if rep == LATTICE:
        if not part.is_lattice:
            raise UsageError("lattice modes need a site-set bipartition")
        n = modes[0].grid.site_count
        if part.sites and part.sites[-1] >= n:
            raise DomainError(f"site index {part.sites[-1]} outside lattice of {n} sites")
        phi = np.array([m.amplitudes for m in modes], dtype=complex)[:, list(part.sites)]
        o = phi @ phi.conj().T
    else:
        if part.is_lattice:
            raise UsageError("continuum modes need an interval bipartition")
        o = np.zeros((len(modes), len(modes)), dtype=complex)
        for lo, hi in part.intervals:
            o += _continuum_overlap(modes, lo, hi, tol)
    o = 0.5 * (o + o.conj().T)
    return OverlapMatrix(o, labels)


# ---------------------------------------------------------------- spectra


def single_particle_spectrum(mode, part):
    lam = float(overlap_matrix([mode], part).entries[0, 0].real)
    return RdmSpectrum({0: [1.0 - lam], 1: [lam]}, 1)


def sector_top_eigenvalue(overlap):
    """Only nonzero eigenvalue of the top sector: det of the overlap matrix."""
    entries = overlap.entries if isinstance(overlap, OverlapMatrix) else np.asarray(overlap)
    return float(np.linalg.det(entries).real)


def subset_products(mu):
    """All 2^N products prod_{i in S} mu_i prod_{i not in S} (1 - mu_i), keyed by |S|."""
    vals = np.ones(1)
    ks = np.zeros(1, dtype=np.int64)
    for m in np.asarray(mu, dtype=float):
        vals = np.concatenate([vals * (1.0 - m), vals * m])
        ks = np.concatenate([ks, ks + 1])
    return {k: vals[ks == k] for k in range(len(mu) + 1)}


def rdm_spectrum_exact(modes, part, keep_zeros=False):
    """Fermionic RDM spectrum from the eigenvalues of the overlap matrix.

    With ``keep_zeros`` every sector holds exactly C(N, k) entries; otherwise
    entries below ``EIGEN_CUTOFF`` are dropped.
    """
    if len({m.eta for m in modes}) != len(modes):
        raise UsageError("fermionic mode labels must be distinct")
    if len(modes) > MAX_MODES_EXACT:
        raise ResourceError(f"N={len(modes)} exceeds the 2^N enumeration cap of {MAX_MODES_EXACT}")
    mu = overlap_matrix(modes, part).eigenvalues()
    if np.any(mu < -RANGE_TOL) or np.any(mu > 1 + RANGE_TOL):
        raise NumericalError(f"overlap eigenvalues {mu} outside [0, 1]")
    spec = RdmSpectrum(subset_products(np.clip(mu, 0.0, 1.0)), len(modes))
    return spec if keep_zeros else spec.nonzero()


def many_body_state(modes):
    rep = _check_modes(modes)
    if rep != LATTICE:
        raise UsageError("the dense many-body state needs lattice modes")
    n, N = modes[0].grid.site_count, len(modes)
    psi = np.array([m.amplitudes for m in modes], dtype=complex)
    tuples = list(combinations(range(n), N))
    idx = np.array(tuples, dtype=np.int64).reshape(len(tuples), N)
    mats = psi[:, idx].transpose(1, 0, 2)  # (tuple, eta_i, l_j)
    amps = np.linalg.det(mats) if N else np.ones(1)
    return ManyBodyStateDense(tuples, amps, n, N, {t: i for i, t in enumerate(tuples)})


def _merge_sign(b, a):
    """Parity of sorting the concatenation b + a of two sorted tuples."""
    inv = 0
    for x in b:
        for y in a:
            if x > y:
                inv += 1
    return -1.0 if inv % 2 else 1.0


def brute_force_sector_matrices(modes, part):
    """Sector blocks rho_{A,[N,k]} by the literal partial trace over B.

    Basis states of each block are the k-subsets of A in ascending order.
    """
    if _check_modes(modes) != LATTICE or not part.is_lattice:
        raise UsageError("brute-force RDM works on lattice modes and site bipartitions")
    n, N = modes[0].grid.site_count, len(modes)
    if n > MAX_SITES_BRUTE or N > MAX_PARTICLES_BRUTE:
        raise ResourceError(f"brute force capped at {MAX_SITES_BRUTE} sites and "
                            f"{MAX_PARTICLES_BRUTE} particles (got {n}, {N})")
    state = many_body_state(modes)
    if abs(state.norm() - 1.0) > 1e-10:
        raise NumericalError(f"many-body state norm {state.norm()} != 1")
    a_sites = list(part.sites)
    b_sites = [i for i in range(n) if i not in set(a_sites)]
    blocks = {}
    for k in range(N + 1):
        a_sets = list(combinations(a_sites, k))
        b_sets = list(combinations(b_sites, N - k))
        if not a_sets or not b_sets:
            continue
        m = np.zeros((len(b_sets), len(a_sets)), dtype=complex)
        for i, bs in enumerate(b_sets):
            for j, as_ in enumerate(a_sets):
                key = tuple(sorted(bs + as_))
                m[i, j] = _merge_sign(bs, as_) * state.amplitudes[state.index[key]]
        blocks[k] = m.T @ m.conj()
    return blocks


def brute_force_rdm(modes, grid, part):
    if any(m.grid != grid for m in modes):
        raise UsageError("modes are not defined on the given grid")
    blocks = brute_force_sector_matrices(modes, part)
    sectors = {}
    for k, rho in blocks.items():
        ev = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        sectors[k] = ev[ev >= EIGEN_CUTOFF]
    return RdmSpectrum(sectors, len(modes))


def bosonic_two_particle_spectrum(mode, part, n_particles=2):
    """Two bosons in the same continuum mode: binomial B(2, p) with p = O_11."""
    if n_particles != 2:
        raise UnsupportedError("identical-label bosons are supported for N = 2 only")
    if mode.representation != CONTINUUM:
        raise UsageError("the bosonic formula drops the doubly occupied term; use continuum modes")
    p = float(overlap_matrix([mode], part).entries[0, 0].real)
    p = min(max(p, 0.0), 1.0)
    return RdmSpectrum({0: [(1 - p) ** 2], 1: [2 * p * (1 - p)], 2: [p * p]}, 2)


def entanglement_entropy(spec, cutoff=EIGEN_CUTOFF):
    """Von Neumann entropy in nats, with 0 log 0 = 0."""
    v = spec.values() if isinstance(spec, RdmSpectrum) else np.asarray(spec, dtype=float)
    if np.any(v < -RANGE_TOL):
        raise NumericalError(f"negative eigenvalue {v.min():.3g} in spectrum")
    v = v[v > cutoff]
    return float(-np.sum(v * np.log(v)))


# ---------------------------------------------------------------- linear-algebra checks


def cauchy_binet_check(X, Y):
    """Compare det(Y X) with sum over k-subsets S of det X[S, :] det Y[:, S].

    ``X`` is |A| x k and ``Y`` is k x |A|. Returns (lhs, rhs, |lhs - rhs|).
    """
    X = np.asarray(X)
    Y = np.asarray(Y)
    n, k = X.shape
    if Y.shape != (k, n):
        raise UsageError(f"shapes {X.shape} and {Y.shape} are not compatible")
    if k > n:
        raise DomainError(f"k={k} exceeds |A|={n}")
    lhs = np.linalg.det(Y @ X)
    rhs = 0.0
    for S in combinations(range(n), k):
        S = list(S)
        rhs += np.linalg.det(X[S, :]) * np.linalg.det(Y[:, S])
    return lhs, rhs, abs(lhs - rhs)


def rank_one_sector_check(Q, tol=1e-12):
    """Spectrum of Q Q^dagger; must be {|Q|^2, 0, ..., 0}."""
    Q = np.asarray(Q, dtype=complex).ravel()
    norm2 = float(np.vdot(Q, Q).real)
    if norm2 == 0.0:
        raise DomainError("Q must be nonzero")
    ev = np.linalg.eigvalsh(np.outer(Q, Q.conj()))[::-1]
    if abs(ev[0] - norm2) > tol * max(1.0, norm2) or np.any(np.abs(ev[1:]) > tol * max(1.0, norm2)):
        raise NumericalError(f"rho(Q) is not rank one: {ev}")
    return ev
