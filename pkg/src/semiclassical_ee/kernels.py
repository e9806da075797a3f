"""Hot loops of the symmetric tridiagonal eigensolver.

Every kernel has two implementations with identical signatures:

* ``*_numba``: scalar loops compiled with numba, one eigenvalue at a time;
* ``*_numpy``: the same recurrences vectorised across eigenvalues, looping
  in Python only over the matrix dimension.

The public names (``sturm_count``, ``bisect_eigenvalues``,
``inverse_iteration``) dispatch on ``_accel.USE_NUMBA``.
"""
import numpy as np

from . import _accel
from ._accel import njit

MAX_BISECTION_STEPS = 256
INVERSE_ITERATION_STEPS = 3


def gershgorin_bounds(d, e):
    """Interval guaranteed to contain every eigenvalue."""
    d = np.asarray(d, dtype=np.float64)
    ae = np.abs(np.asarray(e, dtype=np.float64))
    radius = np.zeros_like(d)
    radius[:-1] += ae
    radius[1:] += ae
    return float(np.min(d - radius)), float(np.max(d + radius))


# ---------------------------------------------------------------- numba path


@njit
def _sturm_scalar(d, e2, shift, pivmin):
    q = d[0] - shift
    if abs(q) < pivmin:
        q = -pivmin
    count = 1 if q < 0.0 else 0
    for i in range(1, d.shape[0]):
        q = d[i] - shift - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


@njit
def sturm_count_numba(d, e, shifts):
    e2 = e * e
    pivmin = 1e-290 * max(1.0, np.max(np.abs(d)))
    out = np.empty(shifts.shape[0], dtype=np.int64)
    for k in range(shifts.shape[0]):
        out[k] = _sturm_scalar(d, e2, shifts[k], pivmin)
    return out


@njit
def bisect_eigenvalues_numba(d, e, indices, lower, upper, rtol, atol):
    e2 = e * e
    pivmin = 1e-290 * max(1.0, np.max(np.abs(d)))
    m = indices.shape[0]
    values = np.empty(m)
    steps = np.zeros(m, dtype=np.int64)
    for k in range(m):
        target = indices[k] + 1
        a = lower
        b = upper
        it = 0
        while b - a > rtol * max(abs(a), abs(b)) + atol:
            if it >= MAX_BISECTION_STEPS:
                steps[k] = -1
                break
            mid = 0.5 * (a + b)
            if _sturm_scalar(d, e2, mid, pivmin) >= target:
                b = mid
            else:
                a = mid
            it += 1
        values[k] = 0.5 * (a + b)
        if steps[k] == 0:
            steps[k] = it
    return values, steps


@njit
def _gttrf_solve(d, e, lam, rhs, n_iter, pivfloor):
    """Inverse iteration for one shift with a partially pivoted LU (LAPACK gttrf/gtts2)."""
    n = d.shape[0]
    dl = e.copy()
    dd = d - lam
    du = e.copy()
    du2 = np.zeros(max(n - 2, 0))
    swap = np.zeros(max(n - 1, 0), dtype=np.bool_)
    for i in range(n - 1):
        if abs(dd[i]) >= abs(dl[i]):
            if dd[i] == 0.0:
                dd[i] = pivfloor
            fact = dl[i] / dd[i]
            dl[i] = fact
            dd[i + 1] -= fact * du[i]
        else:
            fact = dd[i] / dl[i]
            dd[i] = dl[i]
            dl[i] = fact
            temp = du[i]
            du[i] = dd[i + 1]
            dd[i + 1] = temp - fact * dd[i + 1]
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
            swap[i] = True
    if dd[n - 1] == 0.0:
        dd[n - 1] = pivfloor
    x = rhs.copy()
    for _ in range(n_iter):
        for i in range(n - 1):
            if swap[i]:
                temp = x[i]
                x[i] = x[i + 1]
                x[i + 1] = temp - dl[i] * x[i]
            else:
                x[i + 1] -= dl[i] * x[i]
        x[n - 1] /= dd[n - 1]
        if n > 1:
            x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / dd[n - 2]
        for i in range(n - 3, -1, -1):
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dd[i]
        x /= np.sqrt(np.sum(x * x))
    return x


@njit
def inverse_iteration_numba(d, e, lams, start, n_iter, pivfloor):
    out = np.empty((lams.shape[0], d.shape[0]))
    for k in range(lams.shape[0]):
        out[k] = _gttrf_solve(d, e, lams[k], start, n_iter, pivfloor)
    return out


# ---------------------------------------------------------------- numpy path


def sturm_count_numpy(d, e, shifts):
    shifts = np.asarray(shifts, dtype=np.float64)
    e2 = np.asarray(e) ** 2
    pivmin = 1e-290 * max(1.0, float(np.max(np.abs(d))))
    q = d[0] - shifts
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0).astype(np.int64)
    for i in range(1, len(d)):
        q = d[i] - shifts - e2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def bisect_eigenvalues_numpy(d, e, indices, lower, upper, rtol, atol):
    targets = np.asarray(indices, dtype=np.int64) + 1
    a = np.full(len(targets), float(lower))
    b = np.full(len(targets), float(upper))
    steps = np.zeros(len(targets), dtype=np.int64)
    active = np.ones(len(targets), dtype=bool)
    for it in range(MAX_BISECTION_STEPS + 1):
        active = b - a > rtol * np.maximum(np.abs(a), np.abs(b)) + atol
        steps[active] = it + 1
        if not active.any():
            break
        if it == MAX_BISECTION_STEPS:
            steps[active] = -1
            break
        mid = 0.5 * (a[active] + b[active])
        hit = sturm_count_numpy(d, e, mid) >= targets[active]
        ia = np.flatnonzero(active)
        b[ia[hit]] = mid[hit]
        a[ia[~hit]] = mid[~hit]
    return 0.5 * (a + b), steps


def inverse_iteration_numpy(d, e, lams, start, n_iter, pivfloor):
    lams = np.asarray(lams, dtype=np.float64)
    m, n = len(lams), len(d)
    dl = np.tile(e, (m, 1))
    du = np.tile(e, (m, 1))
    dd = d[None, :] - lams[:, None]
    du2 = np.zeros((m, max(n - 2, 0)))
    swap = np.zeros((m, max(n - 1, 0)), dtype=bool)
    for i in range(n - 1):
        s = np.abs(dd[:, i]) < np.abs(dl[:, i])
        ns = ~s
        # no interchange
        piv = np.where(dd[ns, i] == 0.0, pivfloor, dd[ns, i])
        dd[ns, i] = piv
        fact = dl[ns, i] / piv
        dl[ns, i] = fact
        dd[ns, i + 1] -= fact * du[ns, i]
        # row interchange
        if s.any():
            fact = dd[s, i] / dl[s, i]
            dd[s, i] = dl[s, i]
            dl[s, i] = fact
            temp = du[s, i].copy()
            du[s, i] = dd[s, i + 1]
            dd[s, i + 1] = temp - fact * dd[s, i + 1]
            if i < n - 2:
                du2[s, i] = du[s, i + 1]
                du[s, i + 1] = -fact * du[s, i + 1]
            swap[s, i] = True
    dd[:, n - 1] = np.where(dd[:, n - 1] == 0.0, pivfloor, dd[:, n - 1])
    x = np.tile(np.asarray(start, dtype=np.float64), (m, 1))
    for _ in range(n_iter):
        for i in range(n - 1):
            sw = swap[:, i]
            xi = x[:, i].copy()
            xi1 = x[:, i + 1].copy()
            x[:, i] = np.where(sw, xi1, xi)
            x[:, i + 1] = np.where(sw, xi - dl[:, i] * xi1, xi1 - dl[:, i] * xi)
        x[:, n - 1] /= dd[:, n - 1]
        if n > 1:
            x[:, n - 2] = (x[:, n - 2] - du[:, n - 2] * x[:, n - 1]) / dd[:, n - 2]
        for i in range(n - 3, -1, -1):
            x[:, i] = (x[:, i] - du[:, i] * x[:, i + 1] - du2[:, i] * x[:, i + 2]) / dd[:, i]
        x /= np.sqrt(np.sum(x * x, axis=1))[:, None]
    return x


# ---------------------------------------------------------------- dispatch


def sturm_count(d, e, shifts):
    """Number of eigenvalues strictly below each shift."""
    fn = sturm_count_numba if _accel.USE_NUMBA else sturm_count_numpy
    return fn(np.asarray(d, np.float64), np.asarray(e, np.float64), np.asarray(shifts, np.float64))


def bisect_eigenvalues(d, e, indices, lower, upper, rtol, atol):
    fn = bisect_eigenvalues_numba if _accel.USE_NUMBA else bisect_eigenvalues_numpy
    return fn(np.asarray(d, np.float64), np.asarray(e, np.float64),
              np.asarray(indices, np.int64), float(lower), float(upper), float(rtol), float(atol))


def inverse_iteration(d, e, lams, start, n_iter=INVERSE_ITERATION_STEPS, pivfloor=None):
    d = np.asarray(d, np.float64)
    e = np.asarray(e, np.float64)
    if pivfloor is None:
        pivfloor = np.finfo(np.float64).eps * max(1.0, float(np.max(np.abs(d))) + 2 * float(np.max(np.abs(e), initial=0.0)))
    fn = inverse_iteration_numba if _accel.USE_NUMBA else inverse_iteration_numpy
    return fn(d, e, np.asarray(lams, np.float64), np.asarray(start, np.float64), int(n_iter), float(pivfloor))
