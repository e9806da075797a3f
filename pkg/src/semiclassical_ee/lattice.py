"""Lattice discretisation of the single-particle Schroedinger problem.

The lattice Hamiltonian is the symmetric tridiagonal matrix with diagonal
``V_j + hbar^2/(m a^2)`` and constant hopping ``-hbar^2/(2 m a^2)``. Its low
eigenpairs are found with Sturm-sequence bisection followed by inverse
iteration (see ``kernels``). Box geometry: ``L`` interior sites at
``x_j = j a`` (j = 1..L) and hard walls at ``0`` and ``(L + 1) a``.
"""
from dataclasses import dataclass, field, replace
import math

import numpy as np
from scipy.interpolate import CubicSpline

from . import kernels
from .errors import DomainError, NumericalError, ResourceError
from .potentials import PhysicalParams, PotentialSpec

LATTICE = "lattice"
CONTINUUM = "continuum"

#: relative threshold deciding which amplitude counts as "first nonzero"
SIGN_THRESHOLD = 1e-8
POINTS_PER_WAVELENGTH = 160
MAX_SITES = 40000


@dataclass(frozen=True)
class LatticeGrid:
    spacing: float
    site_count: int
    origin: float = 0.0

    def __post_init__(self):
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise DomainError(f"lattice spacing must be positive, got {self.spacing!r}")
        if int(self.site_count) < 1:
            raise DomainError(f"site_count must be >= 1, got {self.site_count!r}")

    @classmethod
    def for_box(cls, sites, length=None, spacing=None):
        """Interior sites of a box with walls at 0 and ``(sites + 1) * spacing``."""
        if spacing is None:
            spacing = (1.0 if length is None else length) / (sites + 1)
        return cls(spacing, sites, spacing)

    @classmethod
    def covering(cls, lo, hi, spacing):
        """Sites strictly inside (lo, hi) with hard walls at lo and hi; the
        effective spacing never exceeds ``spacing``."""
        n = int(math.ceil((hi - lo) / spacing - 1e-9)) - 1
        if n < 1:
            raise DomainError("interval too short for the requested spacing")
        a = (hi - lo) / (n + 1)
        return cls(a, n, lo + a)

    @property
    def positions(self):
        return self.origin + self.spacing * np.arange(self.site_count)

    @property
    def extent(self):
        """Wall-to-wall interval (one spacing beyond each end site)."""
        return (self.origin - self.spacing, self.origin + self.spacing * self.site_count)


@dataclass(frozen=True, eq=False)
class TridiagonalHamiltonian:
    diagonal: np.ndarray
    off_diagonal: float
    grid: LatticeGrid

    @property
    def dimension(self):
        return len(self.diagonal)

    @property
    def norm_inf(self):
        off = 2.0 * abs(self.off_diagonal) if self.dimension > 1 else 0.0
        return float(np.max(np.abs(self.diagonal)) + off)

    def dense(self):
        n = self.dimension
        h = np.diag(self.diagonal.astype(float))
        idx = np.arange(n - 1)
        h[idx, idx + 1] = self.off_diagonal
        h[idx + 1, idx] = self.off_diagonal
        return h

    def matvec(self, v):
        out = self.diagonal * v
        out[:-1] += self.off_diagonal * v[1:]
        out[1:] += self.off_diagonal * v[:-1]
        return out


@dataclass(frozen=True, eq=False)
class SingleParticleMode:
    """One eigenstate. ``amplitudes`` are psi_j (lattice) or psi(x_j)
    samples (continuum); ``evaluator``, when present, is the exact
    continuum wavefunction and takes precedence over interpolation."""

    eta: int
    energy: float
    amplitudes: np.ndarray
    representation: str = LATTICE
    grid: LatticeGrid = None
    evaluator: object = field(default=None, compare=False, repr=False)
    _spline: object = field(default=None, compare=False, repr=False)

    def __call__(self, x):
        if self.representation != CONTINUUM:
            raise DomainError("only continuum modes can be evaluated at arbitrary x")
        x = np.asarray(x, dtype=float)
        if self.evaluator is not None:
            return self.evaluator(x)
        spline = self._spline
        if spline is None:
            spline = _wall_spline(self.grid, self.amplitudes)
            object.__setattr__(self, "_spline", spline)
        lo, hi = self.grid.extent
        inside = (x >= lo) & (x <= hi)
        return np.where(inside, spline(np.clip(x, lo, hi)), 0.0)

    @property
    def support(self):
        if self.grid is None:
            raise DomainError("mode has no grid")
        return self.grid.extent

    def norm(self):
        if self.representation == LATTICE:
            return float(np.sum(np.abs(self.amplitudes) ** 2))
        from . import quadrature
        lo, hi = self.support
        return float(quadrature.integrate(lambda x: np.abs(self(x)) ** 2, lo, hi,
                                          tol=1e-12, panels=max(4, 2 * self.eta)))


def _wall_spline(grid, amplitudes):
    x = np.concatenate([[grid.extent[0]], grid.positions, [grid.extent[1]]])
    y = np.concatenate([[0.0], np.asarray(amplitudes), [0.0]])
    return CubicSpline(x, y)


# ---------------------------------------------------------------- operations


def build_hamiltonian(grid, pot, params=PhysicalParams()):
    x = grid.positions
    if not pot.contains(float(x[0]), float(x[-1])):
        raise DomainError(f"grid [{x[0]}, {x[-1]}] lies outside potential domain {pot.domain}")
    kin = params.hbar ** 2 / (params.mass * grid.spacing ** 2)
    diag = pot(x, params.mass) + kin
    return TridiagonalHamiltonian(np.asarray(diag, dtype=float), -0.5 * kin, grid)


def solve_modes(H, count):
    """Lowest ``count`` eigenmodes of ``H`` in ascending energy, eta = 1, 2, ...

    Raises ``NumericalError`` (with ``index``) if bisection hits its step cap,
    two requested eigenvalues are numerically degenerate, or a residual
    exceeds ``1e-9 * ||H||``.
    """
    n = H.dimension
    if not 1 <= count <= n:
        raise DomainError(f"count must be in [1, {n}], got {count}")
    d = H.diagonal
    e = np.full(n - 1, H.off_diagonal, dtype=float)
    lo, hi = kernels.gershgorin_bounds(d, e)
    norm = max(H.norm_inf, 1.0)
    eps = np.finfo(float).eps
    vals, steps = kernels.bisect_eigenvalues(d, e, np.arange(count), lo, hi, 4 * eps, 2 * eps * norm)
    bad = np.flatnonzero(steps < 0)
    if bad.size:
        raise NumericalError(f"bisection did not converge for eigenvalue {bad[0]}", index=int(bad[0]))
    gap_floor = max(1e-12, 64 * eps * norm)
    gaps = np.diff(vals)
    if np.any(gaps < gap_floor):
        i = int(np.flatnonzero(gaps < gap_floor)[0])
        raise NumericalError(f"degenerate eigenvalues at indices {i}, {i + 1}", index=i + 1)
    start = np.random.default_rng(20240101).uniform(0.5, 1.5, n)
    vecs = kernels.inverse_iteration(d, e, vals, start)
    q, r = np.linalg.qr(vecs.T)
    q *= np.sign(np.diag(r))[None, :]
    vecs = _fix_signs(q.T)
    modes = []
    for k in range(count):
        res = np.linalg.norm(H.matvec(vecs[k]) - vals[k] * vecs[k])
        if res > 1e-9 * norm:
            raise NumericalError(f"eigenpair {k} residual {res:.3g} too large", index=k)
        modes.append(SingleParticleMode(k + 1, float(vals[k]), vecs[k], LATTICE, H.grid))
    return modes


def _fix_signs(vecs):
    vecs = np.array(vecs, copy=True)
    for v in vecs:
        big = np.abs(v) > SIGN_THRESHOLD * np.max(np.abs(v))
        first = np.flatnonzero(big)[0]
        if v[first] < 0:
            v *= -1.0
    return vecs


def box_energy(L, eta, spacing=1.0, params=PhysicalParams()):
    """Lattice box eigenvalue -(hbar^2/(m a^2)) (cos(pi eta/(L+1)) - 1)."""
    if not 1 <= eta <= L:
        raise DomainError(f"eta must be in [1, {L}], got {eta}")
    return -(params.hbar ** 2 / (params.mass * spacing ** 2)) * (math.cos(math.pi * eta / (L + 1)) - 1.0)


def box_analytic_mode(L, eta, spacing=1.0, params=PhysicalParams()):
    energy = box_energy(L, eta, spacing, params)
    j = np.arange(1, L + 1)
    amp = np.sin(math.pi * eta * j / (L + 1))
    amp /= np.sqrt(np.sum(amp * amp))
    return SingleParticleMode(eta, energy, amp, LATTICE, LatticeGrid.for_box(L, spacing=spacing))


def continuum_limit_energy(L, eta, a, params=PhysicalParams()):
    """Lattice box energy at spacing ``a``; tends to hbar^2 pi^2 eta^2/(2 m l^2) as a -> 0
    with ``l = (L + 1) a`` held fixed."""
    if eta < 1:
        raise DomainError("eta must be >= 1")
    return box_energy(L, eta, a, params)


def box_continuum_energy(eta, length=1.0, params=PhysicalParams()):
    return params.hbar ** 2 * math.pi ** 2 * eta ** 2 / (2.0 * params.mass * length ** 2)


def to_continuum(mode, grid=None):
    if mode.representation != LATTICE:
        raise DomainError("mode is already a continuum mode")
    grid = grid or mode.grid
    return replace(mode, amplitudes=np.asarray(mode.amplitudes) / math.sqrt(grid.spacing),
                   representation=CONTINUUM, grid=grid, _spline=None)


def box_continuum_mode(eta, length=1.0, params=PhysicalParams(), samples=257):
    """Exact continuum box eigenfunction sqrt(2/l) sin(pi eta x / l) on [0, l]."""
    if eta < 1:
        raise DomainError("eta must be >= 1")
    norm = math.sqrt(2.0 / length)
    k = math.pi * eta / length

    def psi(x):
        x = np.asarray(x, dtype=float)
        inside = (x >= 0.0) & (x <= length)
        return np.where(inside, norm * np.sin(k * x), 0.0)

    grid = LatticeGrid.for_box(samples, length=length)
    return SingleParticleMode(eta, box_continuum_energy(eta, length, params), psi(grid.positions),
                              CONTINUUM, grid, evaluator=psi)


def lattice_modes(pot, params, count, spacing=None, tail_tol=1e-8, max_sites=MAX_SITES):
    """Lowest ``count`` lattice modes with the grid chosen automatically.

    Finite domains are discretised wall to wall. Infinite domains are
    truncated with hard walls, widening the window until every continuum
    amplitude at the walls is below ``tail_tol``. Without an explicit
    ``spacing`` the grid is refined to ``POINTS_PER_WAVELENGTH`` points per
    local wavelength of the highest mode.
    """
    m, hbar = params.mass, params.hbar
    if pot.is_finite_domain:
        lo, hi = pot.domain
        center, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    else:
        center = pot.minimum(m)
        half = 4.0 * math.sqrt(hbar / m) * max(1.0, math.sqrt(count))
    a = spacing if spacing is not None else half / 100.0
    trimmed = False
    for _ in range(60):
        if pot.is_finite_domain:
            grid = LatticeGrid.covering(lo, hi, a)
        else:
            grid = LatticeGrid.covering(center - half, center + half, a)
        if grid.site_count > max_sites:
            raise ResourceError(f"grid needs {grid.site_count} sites (cap {max_sites})")
        if grid.site_count < count:
            a *= 0.5
            continue
        try:
            modes = solve_modes(build_hamiltonian(grid, pot, params), count)
        except NumericalError:
            # coarse grids can trap wall-localised, near-degenerate states
            a *= 0.5
            continue
        vmin = float(np.min(pot(grid.positions, m)))
        p_max = math.sqrt(max(2.0 * m * (modes[-1].energy - vmin), 1e-300))
        a_needed = 2.0 * math.pi * hbar / p_max / POINTS_PER_WAVELENGTH
        if spacing is None and grid.spacing > a_needed * 1.0001:
            a = a_needed
            continue
        if not pot.is_finite_domain and not trimmed:
            trimmed = True
            fit = _airy_window(pot, params, center, modes[-1].energy, half)
            if fit < 0.8 * half:
                half = fit
                continue
        if not pot.is_finite_domain:
            tails = max(max(abs(md.amplitudes[0]), abs(md.amplitudes[-1])) for md in modes)
            if tails / math.sqrt(grid.spacing) > tail_tol:
                half *= 1.25
                continue
        return modes
    raise NumericalError("automatic lattice selection did not settle")


def _airy_window(pot, params, center, energy, half):
    """Half-width reaching ~12 Airy lengths past the outer turning points."""
    xs = np.linspace(center - half, center + half, 20001)
    allowed = np.flatnonzero(pot(xs, params.mass) <= energy)
    if allowed.size == 0:
        return half
    best = 0.0
    for i in (allowed[0], allowed[-1]):
        force = abs(float(pot.derivative(xs[i], params.mass))) or 1e-12
        airy = (params.hbar ** 2 / (2.0 * params.mass * force)) ** (1.0 / 3.0)
        best = max(best, abs(xs[i] - center) + 12.0 * airy)
    return min(best, half)


def continuum_modes(pot, params, labels, spacing=None):
    """Continuum eigenfunctions for quantum numbers ``labels`` (eta = 1 is the ground state)."""
    labels = [int(l) for l in labels]
    if min(labels) < 1:
        raise DomainError("mode labels start at 1")
    if pot.kind == "box":
        return [box_continuum_mode(l, pot.length, params) for l in labels]
    modes = lattice_modes(pot, params, max(labels), spacing=spacing)
    return [to_continuum(modes[l - 1]) for l in labels]
