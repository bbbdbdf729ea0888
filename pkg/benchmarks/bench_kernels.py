"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--n 4096] [--repeat 5]

The first numba call compiles (or loads the on-disk cache); it is run once
before timing.
"""

import argparse
import time

import numpy as np

from roughwz import _accel, kernels
from roughwz.path_core import pair_gaps


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n, rng):
    x = np.cumsum(rng.standard_normal(n + 1)) / np.sqrt(n)
    y = np.cumsum(rng.standard_normal(n + 1)) / np.sqrt(n)
    bx, by = 0.5 * np.diff(x) ** 2, 0.5 * np.diff(y) ** 2
    gaps = pair_gaps(n)
    db = rng.standard_normal((200, n)) / np.sqrt(n)
    dq = np.full((200, n), 1.0 / n)
    sin, cos = (kernels.FIELD_SIN, 1.0), (kernels.FIELD_COS, 0.5)
    zero = (kernels.FIELD_ZERO, 0.0)
    y0 = np.ones(200)
    speed = db.reshape(200, 32, n // 32).sum(axis=2) * 32
    return {
        f"holder_sup (N={n}, exact)": lambda: kernels.holder_sup(x, 1.0 / n, 0.4, gaps),
        f"level2_diff_sup (N={n}, exact)": lambda: kernels.level2_diff_sup(x, bx, y, by, 1.0 / n, 0.8, gaps),
        f"taylor2 (200 x {n})": lambda: kernels.taylor2(y0, db, 0.5 * dq, dq, 1.0 / n, sin, cos, zero, 1e6),
        f"wz_ode (200 x 32 cells, m={n // 32})": lambda: kernels.wz_ode(y0, speed, dq, 1.0 / n, n // 32, sin, cos, zero, 1e6),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    table = cases(args.n, np.random.default_rng(0))
    print(f"{'kernel':42s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s}")
    for name, fn in table.items():
        timings = {}
        for use in (True, False):
            _accel.USE_NUMBA = use
            timings[use] = best_of(fn, args.repeat)
        _accel.USE_NUMBA = _accel.HAVE_NUMBA
        print(f"{name:42s} {1e3 * timings[True]:11.2f} {1e3 * timings[False]:11.2f} {timings[False] / timings[True]:8.1f}x")


if __name__ == "__main__":
    main()
