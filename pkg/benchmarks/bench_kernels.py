"""Timing comparison of the compiled and numpy generator kernels.

Run directly:  python3 benchmarks/bench_kernels.py [--points N] [--repeat R]

Both backends evaluate the identical quadrature, so the printed max
difference is a parity check as much as a benchmark.
"""

import argparse
import time

import numpy as np

from onestable import QuadSpec, cylindrical, gaussian_bump, poly_window, trig
from onestable._kernels import get_backend


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n-rho", type=int, default=2048)
    args = ap.parse_args()

    try:
        ck = get_backend("c")
    except ImportError:
        print("compiled backend unavailable; nothing to compare")
        return
    pk = get_backend("python")

    mu = cylindrical(2)
    dirs, weights = mu.angular_nodes(64)
    rho, rho_w = QuadSpec(n_rho=args.n_rho).nodes()
    rng = np.random.default_rng(5)
    pts = np.ascontiguousarray(rng.uniform(-8.0, 8.0, size=(args.points, 2)))

    cases = {
        "gaussian_bump": gaussian_bump(center=[0.0, 0.0], sigma=1.5),
        "trig": trig(omega=[1.0, -0.7]),
        "poly_window": poly_window([0.0, 0.0], 4.0, [1.0, 0.0], [0.0, 1.0, 0.5, 0.0]),
    }
    print(f"{args.points} points, {len(dirs)} ray pairs, {args.n_rho} radial nodes")
    print(f"{'family':<14} {'c (ms)':>9} {'python (ms)':>12} {'speedup':>8} {'max|diff|':>10}")
    for name, phi in cases.items():
        code, params = phi.kernel_params()
        run = lambda impl: impl.generator_batch(
            pts, code, params, dirs, weights, rho, rho_w, 1e-4
        )
        tc, out_c = _time(lambda: run(ck), args.repeat)
        tp, out_p = _time(lambda: run(pk), args.repeat)
        diff = float(np.max(np.abs(out_c - out_p)))
        print(f"{name:<14} {tc * 1e3:>9.2f} {tp * 1e3:>12.2f} {tp / tc:>7.2f}x {diff:>10.2e}")


if __name__ == "__main__":
    main()
