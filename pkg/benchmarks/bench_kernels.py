"""Compare the numba and numpy eigensolver kernels.

Usage::

    python benchmarks/bench_kernels.py [--sizes 200 800 3200] [--modes 50] [--repeat 3]

Both implementations are called directly, so the environment flag does not
matter here. The first numba call (compilation) is excluded from the timings.
"""
import argparse
import time

import numpy as np

from semiclassical_ee import kernels
from semiclassical_ee._accel import NUMBA_AVAILABLE


def problem(n, rng):
    d = 2.0 + rng.uniform(-0.5, 0.5, n)
    e = -np.ones(n - 1)
    return d, e


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def run(sizes, modes, repeat, seed=0):
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        d, e = problem(n, rng)
        k = min(modes, n)
        idx = np.arange(k, dtype=np.int64)
        lo, hi = kernels.gershgorin_bounds(d, e)
        eps = np.finfo(float).eps
        args = (d, e, idx, lo, hi, 4 * eps, 2 * eps * max(abs(lo), abs(hi)))
        start = rng.normal(size=n)
        pivfloor = eps * (np.max(np.abs(d)) + 2.0)
        vals, _ = kernels.bisect_eigenvalues_numpy(*args)
        iters = (d, e, vals, start, kernels.INVERSE_ITERATION_STEPS, pivfloor)
        cases = {
            "bisect": (kernels.bisect_eigenvalues_numpy, kernels.bisect_eigenvalues_numba, args),
            "inverse_iteration": (kernels.inverse_iteration_numpy, kernels.inverse_iteration_numba, iters),
        }
        for name, (f_np, f_nb, a) in cases.items():
            t_np, r_np = best_of(lambda: f_np(*a), repeat)
            if NUMBA_AVAILABLE:
                f_nb(*a)  # compile
                t_nb, r_nb = best_of(lambda: f_nb(*a), repeat)
                first = lambda r: r[0] if isinstance(r, tuple) else r
                diff = float(np.max(np.abs(np.abs(first(r_np)) - np.abs(first(r_nb)))))
            else:
                t_nb, diff = float("nan"), float("nan")
            rows.append((name, n, k, t_np, t_nb, t_np / t_nb, diff))
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[200, 800, 3200])
    parser.add_argument("--modes", type=int, default=50)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    print(f"{'kernel':<18}{'sites':>7}{'modes':>7}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>9}{'max diff':>11}")
    for name, n, k, t_np, t_nb, speed, diff in run(args.sizes, args.modes, args.repeat):
        print(f"{name:<18}{n:>7}{k:>7}{t_np:>12.4f}{t_nb:>12.4f}{speed:>9.1f}{diff:>11.1e}")


if __name__ == "__main__":
    main()
