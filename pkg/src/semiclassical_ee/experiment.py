"""Configuration-driven experiments: sweeps, reference reproduction and output.

Configuration schema (JSON object)::

    {
      "potential":   {"kind": "box", "length": 1.0}
                     | {"kind": "harmonic", "omega": 1.0}
                     | {"kind": "polynomial", "coefficients": [...], "domain": [lo, hi]}
                     | {"kind": "tabulated", "x": [...], "v": [...]},
      "params":      {"hbar": 1.0, "mass": 1.0},               (optional)
      "particles":   "fermions" | "bosons",                    (default fermions)
      "mode_labels": [eta, ...],                               (eta = 1 is the ground state)
      "label_offsets": [int, ...],                             (optional, see eta_scale)
      "bipartition": {"interval": [lo, hi]} | {"intervals": [[lo, hi], ...]},
      "sweep":       {"variable": "eta_scale" | "hbar" | "interval_edge",
                      "values": [...]},                        (optional)
      "statistics":  ["exact_spectrum", "classical_spectrum", "entropies",
                      "overlaps", "efp", "corrected_occupation"],
      "spacing":     lattice spacing for non-box potentials,   (optional)
      "output_path": default output file,                      (optional)
      "workers":     process count for sweep points            (default 1)
    }

Sweep variables: ``eta_scale`` uses labels ``s * eta + offset``; ``hbar``
sets Planck's constant; ``interval_edge`` moves the right edge of a single
interval.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import hashlib
import json
import math
from pathlib import Path
import time

import numpy as np

from . import __version__
from .asymptotics import boundary_term_asymptotic, overlap_integral_numeric, stationary_point_scan
from .efp import CdKernel, efp_determinant, efp_fredholm
from .errors import ConfigError, DomainError, OutputError, ReproductionError, SemiclassicalError
from .lattice import LatticeGrid, build_hamiltonian, continuum_modes, solve_modes
from .potentials import KINDS, PhysicalParams, PotentialSpec
from .rdm import (Bipartition, RdmSpectrum, bosonic_two_particle_spectrum, entanglement_entropy,
                  overlap_matrix, rdm_spectrum_exact)
from .semiclassics import (binomial_entropy, classical_entropy, classical_orbit,
                           classical_probability, classical_rdm_spectrum, corrected_occupation)

CSV_HEADER = ("sweep_value,k,eigenvalue_exact,eigenvalue_classical,"
              "entropy_exact,entropy_classical,abs_error")
EFP_HEADER = "sweep_value,efp_determinant,efp_fredholm,abs_difference"
STATISTICS = ("exact_spectrum", "classical_spectrum", "entropies", "overlaps", "efp",
              "corrected_occupation")
DEFAULT_STATISTICS = ("exact_spectrum", "classical_spectrum", "entropies")
SWEEP_VARIABLES = ("eta_scale", "hbar", "interval_edge")
TOP_LEVEL = ("potential", "params", "particles", "mode_labels", "label_offsets", "bipartition",
             "sweep", "statistics", "spacing", "output_path", "workers")

REFERENCE_NUMERIC = complex(0.03446, -0.00437)
REFERENCE_ASYMPTOTIC = complex(0.03445, -0.00437)
REPRO_TOL = 2e-4


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    potential: PotentialSpec
    params: PhysicalParams
    mode_labels: tuple
    label_offsets: tuple
    particles: str
    bipartition: Bipartition
    sweep_variable: str
    sweep_values: tuple
    statistics: frozenset
    spacing: float = None
    output_path: str = None
    workers: int = 1
    normalized: dict = field(default_factory=dict)

    @property
    def config_hash(self):
        blob = json.dumps(self.normalized, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def labels_at(self, value):
        scale = int(round(value)) if self.sweep_variable == "eta_scale" else 1
        return [scale * l + o for l, o in zip(self.mode_labels, self.label_offsets)]

    def params_at(self, value):
        if self.sweep_variable == "hbar":
            return PhysicalParams(hbar=float(value), mass=self.params.mass)
        return self.params

    def region_at(self, value):
        if self.sweep_variable == "interval_edge":
            lo = self.bipartition.intervals[0][0]
            return Bipartition.from_interval(lo, float(value))
        return self.bipartition


@dataclass
class PointResult:
    sweep_value: float
    exact: RdmSpectrum = None
    classical: RdmSpectrum = None
    entropy_exact: float = None
    entropy_classical: float = None
    extras: dict = field(default_factory=dict)


@dataclass
class SweepResult:
    """Rows of (sweep_value, k, eigenvalue_exact, eigenvalue_classical,
    entropy_exact, entropy_classical, abs_error); ``None`` marks a statistic
    that was not requested."""

    rows: list
    points: list
    metadata: dict


# ---------------------------------------------------------------- configuration


def _number(value, name, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(name, f"expected a finite number, got {value!r}")
    if positive and value <= 0:
        raise ConfigError(name, f"must be > 0, got {value!r}")
    return float(value)


def _parse_potential(raw):
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError("potential", "expected an object with a 'kind'")
    kind = raw["kind"]
    if kind not in KINDS:
        raise ConfigError("potential.kind", f"unknown kind {kind!r}; allowed: {', '.join(KINDS)}")
    try:
        if kind == "box":
            return PotentialSpec.box(_number(raw.get("length", 1.0), "potential.length", True))
        if kind == "harmonic":
            return PotentialSpec.harmonic(_number(raw.get("omega", 1.0), "potential.omega", True))
        if kind == "polynomial":
            coeffs = raw.get("coefficients")
            if not isinstance(coeffs, list) or not coeffs:
                raise ConfigError("potential.coefficients", "expected a non-empty list")
            dom = raw.get("domain", ["-inf", "inf"])
            dom = tuple(float(d) for d in dom)
            return PotentialSpec.polynomial([_number(c, "potential.coefficients") for c in coeffs], dom)
        return PotentialSpec.tabulated(raw.get("x"), raw.get("v"))
    except (DomainError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("potential", str(exc)) from None


def _parse_bipartition(raw):
    if not isinstance(raw, dict):
        raise ConfigError("bipartition", "expected an object")
    if "interval" in raw:
        ivs = [raw["interval"]]
    elif "intervals" in raw:
        ivs = raw["intervals"]
    else:
        raise ConfigError("bipartition", "expected 'interval' or 'intervals'")
    try:
        ivs = [(_number(lo, "bipartition"), _number(hi, "bipartition")) for lo, hi in ivs]
        return Bipartition(intervals=tuple(ivs))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("bipartition", str(exc)) from None


def parse_config(raw):
    """Validate a decoded JSON config and fill defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("config", "expected a JSON object")
    for key in raw:
        if key not in TOP_LEVEL:
            raise ConfigError(key, f"unknown field; allowed: {', '.join(TOP_LEVEL)}")
    for key in ("potential", "mode_labels", "bipartition"):
        if key not in raw:
            raise ConfigError(key, "required field is missing")
    pot = _parse_potential(raw["potential"])
    p = raw.get("params", {})
    if not isinstance(p, dict):
        raise ConfigError("params", "expected an object")
    for key in p:
        if key not in ("hbar", "mass"):
            raise ConfigError(f"params.{key}", "unknown field; allowed: hbar, mass")
    params = PhysicalParams(hbar=_number(p.get("hbar", 1.0), "params.hbar", True),
                            mass=_number(p.get("mass", 1.0), "params.mass", True))

    particles = raw.get("particles", "fermions")
    if particles not in ("fermions", "bosons"):
        raise ConfigError("particles", f"expected 'fermions' or 'bosons', got {particles!r}")
    labels = raw["mode_labels"]
    if not isinstance(labels, list) or not labels:
        raise ConfigError("mode_labels", "expected a non-empty list")
    if any(isinstance(l, bool) or not isinstance(l, int) or l < 1 for l in labels):
        raise ConfigError("mode_labels", "labels must be integers >= 1")
    offsets = raw.get("label_offsets", [0] * len(labels))
    if (not isinstance(offsets, list) or len(offsets) != len(labels)
            or any(isinstance(o, bool) or not isinstance(o, int) for o in offsets)):
        raise ConfigError("label_offsets", "expected one integer per mode label")
    if particles == "fermions" and len(set(zip(labels, offsets))) != len(labels):
        raise ConfigError("mode_labels", "fermionic labels must be distinct")
    if particles == "bosons" and (len(labels) != 2 or labels[0] != labels[1]
                                  or offsets[0] != offsets[1]):
        raise ConfigError("mode_labels", "bosons are supported as two particles in one mode")

    part = _parse_bipartition(raw["bipartition"])
    sweep = raw.get("sweep")
    if sweep is None:
        variable, values = "none", (0.0,)
    else:
        if not isinstance(sweep, dict):
            raise ConfigError("sweep", "expected an object")
        variable = sweep.get("variable")
        if variable not in SWEEP_VARIABLES:
            raise ConfigError("sweep.variable",
                              f"unknown variable {variable!r}; allowed: {', '.join(SWEEP_VARIABLES)}")
        values = sweep.get("values")
        if not isinstance(values, list) or not values:
            raise ConfigError("sweep.values", "expected a non-empty list")
        values = tuple(_number(v, "sweep.values") for v in values)
        d = np.diff(values)
        if len(values) > 1 and not (np.all(d > 0) or np.all(d < 0)):
            raise ConfigError("sweep.values", "values must be strictly monotone")
        if variable == "eta_scale" and any(v < 1 or v != int(v) for v in values):
            raise ConfigError("sweep.values", "eta_scale values must be positive integers")
        if variable == "hbar" and any(v <= 0 for v in values):
            raise ConfigError("sweep.values", "hbar values must be > 0")
        if variable == "interval_edge":
            if len(part.intervals) != 1:
                raise ConfigError("sweep.variable", "interval_edge needs a single interval")
            if any(v < part.intervals[0][0] for v in values):
                raise ConfigError("sweep.values", "interval edges must not precede the left edge")

    stats = raw.get("statistics", list(DEFAULT_STATISTICS))
    if not isinstance(stats, list):
        raise ConfigError("statistics", "expected a list")
    for s in stats:
        if s not in STATISTICS:
            raise ConfigError("statistics", f"unknown statistic {s!r}; allowed: {', '.join(STATISTICS)}")
    if "efp" in stats and particles != "fermions":
        raise ConfigError("statistics", "efp is defined for fermions only")

    spacing = raw.get("spacing")
    if spacing is not None:
        spacing = _number(spacing, "spacing", True)
    out = raw.get("output_path")
    if out is not None and not isinstance(out, str):
        raise ConfigError("output_path", "expected a string")
    workers = raw.get("workers", 1)
    if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
        raise ConfigError("workers", "expected an integer >= 1")

    normalized = {
        "potential": pot.to_json(),
        "params": {"hbar": params.hbar, "mass": params.mass},
        "particles": particles,
        "mode_labels": list(labels),
        "label_offsets": list(offsets),
        "bipartition": [list(iv) for iv in part.intervals],
        "sweep": {"variable": variable, "values": list(values)},
        "statistics": sorted(set(stats)),
        "spacing": spacing,
    }
    return ExperimentConfig(pot, params, tuple(labels), tuple(offsets), particles, part, variable,
                            values, frozenset(stats), spacing, out, workers, normalized)


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"{path} is not valid JSON: {exc}") from None
    return parse_config(raw)


# ---------------------------------------------------------------- sweeps


def _system_support(cfg, modes):
    if cfg.potential.kind == "box":
        return 0.0, cfg.potential.length
    return modes[0].support


def _run_point(cfg, value):
    stats = cfg.statistics
    params = cfg.params_at(value)
    region = cfg.region_at(value)
    labels = cfg.labels_at(value)
    if min(labels) < 1:
        raise DomainError(f"mode labels {labels} fall below 1")
    uniq = sorted(set(labels))
    modes_by_label = dict(zip(uniq, continuum_modes(cfg.potential, params, uniq, cfg.spacing)))
    modes = [modes_by_label[l] for l in labels]
    res = PointResult(float(value))
    fermions = cfg.particles == "fermions"

    if "exact_spectrum" in stats or "entropies" in stats:
        res.exact = (rdm_spectrum_exact(modes, region, keep_zeros=True) if fermions
                     else bosonic_two_particle_spectrum(modes[0], region))
        if "entropies" in stats:
            res.entropy_exact = entanglement_entropy(res.exact)
        if "exact_spectrum" not in stats:
            res.exact = None
    if "classical_spectrum" in stats or "entropies" in stats or "corrected_occupation" in stats:
        orbits = [classical_orbit(cfg.potential, m.energy, params) for m in modes]
        p_cl = [classical_probability(region, o) for o in orbits]
        res.extras["p_cl"] = p_cl
        if fermions:
            res.classical = classical_rdm_spectrum(p_cl)
            ent = classical_entropy(p_cl)
        else:
            p = p_cl[0]
            res.classical = RdmSpectrum({0: [(1 - p) ** 2], 1: [2 * p * (1 - p)], 2: [p * p]}, 2)
            ent = binomial_entropy(2, p)
        if "entropies" in stats:
            res.entropy_classical = ent
        if "classical_spectrum" not in stats:
            res.classical = None
        if "corrected_occupation" in stats:
            res.extras["corrected_occupation"] = [
                corrected_occupation(region, o, params.hbar) for o in orbits]
    if "overlaps" in stats:
        o = overlap_matrix([modes_by_label[l] for l in uniq], region).entries
        res.extras["overlaps"] = {"labels": uniq, "real": o.real.tolist(), "imag": o.imag.tolist()}
    if "efp" in stats:
        b = region.complement(_system_support(cfg, modes))
        res.extras["efp"] = {"determinant": efp_determinant(modes, b),
                             "fredholm": efp_fredholm(CdKernel(modes), b)}
    return res


def _annotated(cfg, value):
    try:
        return _run_point(cfg, value)
    except SemiclassicalError as exc:
        exc.args = (f"at {cfg.sweep_variable}={value:g}: {exc.args[0] if exc.args else exc}",)
        raise


def _rows(point):
    rows = []
    sectors = sorted(set(point.exact.sectors if point.exact else {})
                     | set(point.classical.sectors if point.classical else {}))
    for k in sectors:
        ex = list(point.exact.sectors.get(k, [])) if point.exact else []
        cl = list(point.classical.sectors.get(k, [])) if point.classical else []
        for i in range(max(len(ex), len(cl))):
            e = float(ex[i]) if i < len(ex) else None
            c = float(cl[i]) if i < len(cl) else None
            err = abs(e - c) if e is not None and c is not None else None
            rows.append((point.sweep_value, k, e, c, point.entropy_exact, point.entropy_classical, err))
    return rows


def _row_key(row):
    v, k, e, c = row[:4]
    return (v, k, -(e if e is not None else c if c is not None else 0.0))


def run_points(cfg):
    values = list(cfg.sweep_values)
    if cfg.workers > 1 and len(values) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            points = list(pool.map(_annotated, [cfg] * len(values), values))
    else:
        points = [_annotated(cfg, v) for v in values]
    return sorted(points, key=lambda p: p.sweep_value)


def _metadata(cfg, points):
    return {
        "config": cfg.normalized,
        "config_hash": cfg.config_hash,
        "tool_version": __version__,
        "extras": [{"sweep_value": p.sweep_value, **p.extras} for p in points if p.extras],
    }


def run_convergence_sweep(cfg):
    """Evaluate the requested statistics at every sweep value."""
    points = run_points(cfg)
    rows = sorted((r for p in points for r in _rows(p)), key=_row_key)
    return SweepResult(rows, points, _metadata(cfg, points))


def run_single(cfg):
    """The ``solve`` verb: the first sweep value only."""
    first = ExperimentConfig(**{**cfg.__dict__, "sweep_values": cfg.sweep_values[:1]})
    return run_convergence_sweep(first)


def run_efp(cfg):
    """Emptiness probability of the complement of A by both routes, per sweep value."""
    if cfg.particles != "fermions":
        raise ConfigError("particles", "efp is defined for fermions only")
    cfg = ExperimentConfig(**{**cfg.__dict__, "statistics": frozenset({"efp"})})
    points = run_points(cfg)
    rows = []
    for p in points:
        d, f = p.extras["efp"]["determinant"], p.extras["efp"]["fredholm"]
        rows.append((p.sweep_value, d, f, abs(d - f)))
    return rows, _metadata(cfg, points)


# ---------------------------------------------------------------- reference reproduction


@dataclass
class ReproReport:
    numeric: complex
    asymptotic: complex
    difference: float
    numeric_error: float
    asymptotic_error: float
    numeric_pass: bool
    asymptotic_pass: bool
    energies: tuple
    hbar: float
    lattice_spacing: float
    stationary_points: list
    config_hash: str
    runtime_s: float

    @property
    def passed(self):
        return self.numeric_pass and self.asymptotic_pass

    def to_dict(self):
        c = lambda z: [z.real, z.imag]
        return {
            "numeric": c(self.numeric), "asymptotic": c(self.asymptotic),
            "reference_numeric": c(REFERENCE_NUMERIC), "reference_asymptotic": c(REFERENCE_ASYMPTOTIC),
            "difference": self.difference, "numeric_error": self.numeric_error,
            "asymptotic_error": self.asymptotic_error, "tolerance": REPRO_TOL,
            "numeric_pass": self.numeric_pass, "asymptotic_pass": self.asymptotic_pass,
            "energies": list(self.energies), "hbar": self.hbar,
            "lattice_spacing": self.lattice_spacing, "stationary_points": self.stationary_points,
            "config_hash": self.config_hash, "runtime_s": self.runtime_s,
        }

    def format_text(self):
        z = lambda v: f"{v.real:+.6f} {v.imag:+.6f}i"
        flag = lambda ok: "PASS" if ok else "FAIL"
        return "\n".join([
            f"energies          {self.energies[0]:.10g} {self.energies[1]:.10g}  hbar={self.hbar:g}",
            f"numeric I         {z(self.numeric)}  ref {z(REFERENCE_NUMERIC)}  "
            f"err {self.numeric_error:.2e}  {flag(self.numeric_pass)}",
            f"boundary term     {z(self.asymptotic)}  ref {z(REFERENCE_ASYMPTOTIC)}  "
            f"err {self.asymptotic_error:.2e}  {flag(self.asymptotic_pass)}",
            f"|I - boundary|    {self.difference:.3e}",
            f"stationary points {len(self.stationary_points)}",
            f"config hash       {self.config_hash}",
            f"runtime           {self.runtime_s:.3f} s",
        ])


def _component_error(z, ref):
    return max(abs(z.real - ref.real), abs(z.imag - ref.imag))


def run_appendix_b_repro(hbar=1.0, lattice_spacing=None, eta=10, beta=20, interval=(-1.0, 1.0),
                         omega=1.0):
    """Fast-term overlap I and its boundary asymptotics for V = omega^2 x^2 / 2.

    Quantum numbers count from 0, E = omega (n + 1/2), and the orbits are
    held at these energies when ``hbar`` varies. With ``lattice_spacing``
    the energies are instead the lattice eigenvalues at that spacing.
    """
    t0 = time.perf_counter()
    pot = PotentialSpec.harmonic(omega)
    unit = PhysicalParams()
    if lattice_spacing is None:
        energies = (omega * (eta + 0.5), omega * (beta + 0.5))
    else:
        half = 12.0 / math.sqrt(omega)
        grid = LatticeGrid.covering(-half, half, float(lattice_spacing))
        modes = solve_modes(build_hamiltonian(grid, pot, unit), max(eta, beta) + 1)
        energies = (modes[eta].energy, modes[beta].energy)
    o1 = classical_orbit(pot, energies[0], unit)
    o2 = classical_orbit(pot, energies[1], unit)
    numeric = overlap_integral_numeric(o1, o2, interval, hbar, fast_term_only=True)
    asym = boundary_term_asymptotic(o1, o2, interval, hbar)
    stationary = stationary_point_scan(o1, o2, interval)
    ne, ae = _component_error(numeric, REFERENCE_NUMERIC), _component_error(asym, REFERENCE_ASYMPTOTIC)
    key = {"eta": eta, "beta": beta, "hbar": hbar, "omega": omega, "interval": list(interval),
           "lattice_spacing": lattice_spacing}
    digest = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()
    return ReproReport(numeric, asym, abs(numeric - asym), ne, ae, ne <= REPRO_TOL, ae <= REPRO_TOL,
                       tuple(float(e) for e in energies), float(hbar), lattice_spacing,
                       stationary, digest, time.perf_counter() - t0)


def check_repro(report):
    if not report.passed:
        raise ReproductionError(
            f"reference numbers missed: numeric error {report.numeric_error:.2e}, "
            f"boundary error {report.asymptotic_error:.2e} (tolerance {REPRO_TOL:g})")
    return report


# ---------------------------------------------------------------- output


def _fmt(x):
    return "" if x is None else "%.12g" % x


def write_text(path, text):
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from None


def meta_path(path):
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def _meta_json(meta):
    return json.dumps(meta, sort_keys=True, indent=2, default=float) + "\n"


def emit_csv(result, path):
    """Fixed-header CSV plus a deterministic ``<path>.meta.json`` sidecar."""
    write_text(path, csv_text(result))
    write_text(meta_path(path), _meta_json(result.metadata))


def emit_plot_data(result, path):
    """Whitespace-separated sweep_value, entropy_exact, entropy_classical."""
    nan = lambda x: "nan" if x is None else "%.12g" % x
    lines = ["# sweep_value entropy_exact entropy_classical"]
    for p in sorted(result.points, key=lambda p: p.sweep_value):
        lines.append(" ".join([nan(p.sweep_value), nan(p.entropy_exact), nan(p.entropy_classical)]))
    write_text(path, "\n".join(lines) + "\n")


def emit_efp_csv(rows, meta, path):
    lines = [EFP_HEADER] + [",".join(_fmt(x) for x in row) for row in rows]
    write_text(path, "\n".join(lines) + "\n")
    write_text(meta_path(path), _meta_json(meta))


def csv_text(result):
    """CSV body as a string (for stdout)."""
    lines = [CSV_HEADER]
    for row in result.rows:
        lines.append(",".join([_fmt(row[0]), str(int(row[1]))] + [_fmt(x) for x in row[2:]]))
    return "\n".join(lines) + "\n"
