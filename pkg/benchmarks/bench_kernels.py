"""Time the numba kernels against their numpy fallbacks.

Usage: ``python3 benchmarks/bench_kernels.py [--repeat N]``. Prints one CSV
row per kernel with the best wall time of each backend (compile time is
excluded by a warm-up call) and the speed-up.
"""
from __future__ import annotations

import argparse
import csv
import sys
import time

import numpy as np

from brjunolab import kernels
from brjunolab._accel import HAVE_NUMBA


def _best(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    xs = np.sort(rng.random(200_000))
    ws = rng.random(200_000)
    yield "atom_sum", (0.41421356237309503, 1e-17, xs, ws, 1.3)
    yield "farey_rows", (0.41421356237309503, 1e-17, 2000, np.array([1.0, 2.2]))
    pts = np.sort(rng.random(1500)) * 0.9
    yield "offdiag_energy", (pts, rng.random(1500), 1.0)
    yield "kernel_matrix", (pts, np.full(1500, 5.0), 1.0)
    grid = np.linspace(0, 0.5, 1001)
    M = kernels._kernel_matrix_numpy(grid, np.full(1001, 1.5 - np.log(0.5 / 1000)), 1.0)
    yield "frank_wolfe", (M, np.full(1001, 1 / 1001), 1e-4, 200_000)
    yield "lattice_2d", (0.41421356237309503, -1.0, 2000, kernels.NORM_TAIL, 1e-12)
    feas = rng.random(1 << 14) < 0.05
    feas[[1 << k for k in range(14)]] = True
    feas[0] = False
    yield "min_cover", (feas,)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not active (unset BRJUNOLAB_NO_NUMBA or install numba)", file=sys.stderr)
        return 1
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["kernel", "numba_s", "fallback_s", "fallback", "speedup"])
    for name, a in cases():
        jit = getattr(kernels, f"_{name}_jit")
        fallback = getattr(kernels, f"_{name}_numpy", None)
        label = "numpy"
        if fallback is None:
            fallback, label = getattr(kernels, f"_{name}_loop"), "python"
        copy = lambda a=a: tuple(x.copy() if isinstance(x, np.ndarray) else x for x in a)
        t_jit = _best(lambda: jit(*copy()), (), args.repeat)
        t_fb = _best(lambda: fallback(*copy()), (), args.repeat)
        w.writerow([name, f"{t_jit:.4g}", f"{t_fb:.4g}", label, f"{t_fb / t_jit:.1f}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
