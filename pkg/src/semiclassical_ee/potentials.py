"""Physical constants and external potentials."""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError

KINDS = ("box", "harmonic", "polynomial", "tabulated")


@dataclass(frozen=True)
class PhysicalParams:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")


@dataclass(frozen=True)
class PotentialSpec:
    """An external potential V(x) on a closed interval ``domain``.

    Use the constructors ``box``, ``harmonic``, ``polynomial`` and
    ``tabulated`` rather than the raw fields. The harmonic potential is
    ``m omega^2 x^2 / 2`` and therefore depends on the particle mass, which
    is why evaluation takes ``mass``.
    """

    kind: str
    domain: tuple
    length: float = 0.0
    omega: float = 0.0
    coefficients: tuple = ()
    samples_x: tuple = ()
    samples_v: tuple = ()
    _spline: object = field(default=None, compare=False, repr=False)

    @classmethod
    def box(cls, length=1.0):
        if not length > 0:
            raise DomainError(f"box length must be > 0, got {length!r}")
        return cls("box", (0.0, float(length)), length=float(length))

    @classmethod
    def harmonic(cls, omega=1.0):
        if not omega > 0:
            raise DomainError(f"harmonic omega must be > 0, got {omega!r}")
        return cls("harmonic", (-math.inf, math.inf), omega=float(omega))

    @classmethod
    def polynomial(cls, coefficients, domain=(-math.inf, math.inf)):
        """V(x) = sum_k coefficients[k] x**k."""
        coefficients = tuple(float(c) for c in coefficients)
        if not coefficients:
            raise DomainError("polynomial needs at least one coefficient")
        lo, hi = domain
        if not lo < hi:
            raise DomainError(f"empty polynomial domain {domain!r}")
        return cls("polynomial", (float(lo), float(hi)), coefficients=coefficients)

    @classmethod
    def tabulated(cls, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or len(x) < 4:
            raise DomainError("tabulated potential needs matching 1D arrays with >= 4 samples")
        if np.any(np.diff(x) <= 0):
            raise DomainError("tabulated sample grid must be strictly increasing")
        spline = CubicSpline(x, v)
        return cls("tabulated", (float(x[0]), float(x[-1])), samples_x=tuple(x),
                   samples_v=tuple(v), _spline=spline)

    # ------------------------------------------------------------------
    def __call__(self, x, mass=1.0):
        x = np.asarray(x, dtype=float)
        if self.kind == "box":
            return np.zeros_like(x)
        if self.kind == "harmonic":
            return 0.5 * mass * self.omega ** 2 * x * x
        if self.kind == "polynomial":
            return np.polynomial.polynomial.polyval(x, self.coefficients)
        return self._spline(x)

    def derivative(self, x, mass=1.0):
        x = np.asarray(x, dtype=float)
        if self.kind == "box":
            return np.zeros_like(x)
        if self.kind == "harmonic":
            return mass * self.omega ** 2 * x
        if self.kind == "polynomial":
            c = np.polynomial.polynomial.polyder(self.coefficients)
            return np.polynomial.polynomial.polyval(x, c) + 0.0 * x
        return self._spline(x, 1)

    def contains(self, lo, hi):
        return self.domain[0] <= lo and hi <= self.domain[1]

    @property
    def is_finite_domain(self):
        return math.isfinite(self.domain[0]) and math.isfinite(self.domain[1])

    def minimum(self, mass=1.0, window=None):
        """Location of the global minimum of V on its domain (or ``window``)."""
        if self.kind == "box":
            return 0.5 * self.length
        if self.kind == "harmonic":
            return 0.0
        lo, hi = window if window is not None else self.domain
        if not (math.isfinite(lo) and math.isfinite(hi)):
            lo, hi = _confining_window(self, mass)
        xs = np.linspace(lo, hi, 4001)
        i = int(np.argmin(self(xs, mass)))
        from scipy.optimize import minimize_scalar
        a, b = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
        if a == b:
            return float(xs[i])
        res = minimize_scalar(lambda t: float(self(t, mass)), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-12})
        return float(res.x)

    def to_json(self):
        if self.kind == "box":
            return {"kind": "box", "length": self.length}
        if self.kind == "harmonic":
            return {"kind": "harmonic", "omega": self.omega}
        if self.kind == "polynomial":
            return {"kind": "polynomial", "coefficients": list(self.coefficients),
                    "domain": [_json_float(d) for d in self.domain]}
        return {"kind": "tabulated", "x": list(self.samples_x), "v": list(self.samples_v)}


def _json_float(v):
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


def _confining_window(pot, mass):
    """A finite window that contains the bottom of a confining polynomial."""
    lo, hi = pot.domain
    w = 1.0
    for _ in range(60):
        a, b = max(lo, -w), min(hi, w)
        va, vb = float(pot(a, mass)), float(pot(b, mass))
        vm = float(np.min(pot(np.linspace(a, b, 257), mass)))
        if va > vm and vb > vm:
            return a, b
        w *= 2.0
    raise DomainError("polynomial potential does not appear to be confining")
