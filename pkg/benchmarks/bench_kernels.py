#!/usr/bin/env python3
"""Time the hot kernels on the numba path vs the pure-NumPy/Python fallback.

Each mode runs in a child interpreter because the path is chosen at import
time from HARDYLAB_DISABLE_NUMBA.  Usage: python benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys

SNIPPET = r"""
import json
import time

import numpy as np

from hardylab import _kernels

rng = np.random.default_rng(7)
M = 4096
d = np.abs(rng.standard_normal(M)) + 2.0
e = 0.3 * rng.standard_normal(M - 1)
w = np.abs(rng.standard_normal(M)) + 0.5
b = rng.standard_normal(M)
u = np.abs(rng.standard_normal(M + 1)) + 0.1
wq = np.abs(rng.standard_normal((M, 16)))
tq = np.linspace(0.02, 0.98, 16)


def bench(fn, *args, repeat=200):
    fn(*args)  # warm-up (includes JIT compilation when enabled)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat


out = {
    "mode": "numba" if _kernels.HAVE_NUMBA else "numpy-fallback",
    "negcount_ms": 1e3 * bench(_kernels.negcount, d - 0.5 * w, e),
    "tridiag_solve_ms": 1e3 * bench(_kernels.tridiag_solve, d, e, b),
    "power_moment_ms": 1e3 * bench(_kernels.power_moment, u, wq, tq, 2.6667),
    "power_moment_grad_ms": 1e3 * bench(_kernels.power_moment_grad, u, wq, tq, 2.6667),
}
print(json.dumps(out))
"""


def run(disable: bool) -> dict:
    env = dict(os.environ, HARDYLAB_DISABLE_NUMBA="1" if disable else "0")
    proc = subprocess.run(
        [sys.executable, "-c", SNIPPET], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    rows = [run(disable=False), run(disable=True)]
    keys = ["negcount_ms", "tridiag_solve_ms", "power_moment_ms", "power_moment_grad_ms"]
    header = f"{'kernel':24s} " + " ".join(f"{r['mode']:>16s}" for r in rows) + f" {'speedup':>9s}"
    print(header)
    print("-" * len(header))
    for key in keys:
        vals = [r[key] for r in rows]
        speedup = vals[1] / vals[0] if vals[0] > 0 else float("inf")
        print(f"{key:24s} " + " ".join(f"{v:13.4f} ms" for v in vals) + f" {speedup:8.1f}x")


if __name__ == "__main__":
    main()
