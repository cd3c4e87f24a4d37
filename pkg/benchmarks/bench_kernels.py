"""Benchmark the compiled flow kernel against the pure-Python fallback.

Runs the projected-gradient inner loop on the standard H = 0.3 instance
and reports steps per second for each backend.

Usage: python benchmarks/bench_kernels.py [--n 201] [--steps 20000]
"""

import argparse
import time

import numpy as np

from elastic_obstacle import _kernels_py, kernels
from elastic_obstacle.flow import initial_cap, stability_dt
from elastic_obstacle.obstacle import ObstacleSC


def bench(flow_steps, u0, psi, h, dt, nsteps, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        u = u0.copy()
        t0 = time.perf_counter()
        done, _, _, unstable = flow_steps(u, psi, h, dt, nsteps, 1e-8)
        elapsed = time.perf_counter() - t0
        assert done == nsteps and not unstable
        best = min(best, elapsed)
    return nsteps / best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=201, help="grid points")
    ap.add_argument("--steps", type=int, default=20_000, help="steps per run")
    args = ap.parse_args()

    obs = ObstacleSC(psi0=-0.1, psiHalf=0.3)
    xs = np.linspace(0.0, 1.0, args.n)
    psi = np.asarray(obs.psi(xs))
    u0 = initial_cap(0.3, args.n, obs)
    h = xs[1] - xs[0]
    dt = stability_dt(args.n)

    print(f"n = {args.n}, dt = {dt:.3e}, {args.steps} steps, best of 3")
    rate_py = bench(_kernels_py.flow_steps, u0, psi, h, dt, args.steps)
    print(f"  python fallback : {rate_py:12.0f} steps/s")
    if kernels.BACKEND == "cython":
        rate_cy = bench(kernels.flow_steps, u0, psi, h, dt, args.steps)
        print(f"  cython kernel   : {rate_cy:12.0f} steps/s")
        print(f"  speedup         : {rate_cy / rate_py:12.1f}x")
    else:
        print("  compiled kernel not available (BACKEND = python)")


if __name__ == "__main__":
    main()
