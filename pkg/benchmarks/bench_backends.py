"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the three hot paths (symbol-program evaluation inside compact moments,
large-order Bessel quadrature, oscillatory segment sums) on both backends and
prints a timing table.  Usage:

    python benchmarks/bench_backends.py

The same switch is available to users via RADIAL_TOEPLITZ_BACKEND=numpy.
"""

import time

import numpy as np

from radial_toeplitz import backend
from radial_toeplitz.quadrature import abs_oscillatory_moment, bessel_weighted, moment_compact
from radial_toeplitz.symbols import parse_symbol


def bench_compact_moments():
    V = parse_symbol("chi(0,0.3)-2*chi(0.4,0.6)+0.25*chi(0.1,0.9)")
    for k in range(0, 400, 2):
        moment_compact(V, 2 * k + 1, 1.0, 1e-10)


def bench_bessel_ball():
    one = parse_symbol("1")
    for k in range(60, 260, 4):
        bessel_weighted(one, float(k), "ball", 1e-10, R=2.0)


def bench_oscillatory_abs():
    for k in range(180, 230, 2):
        abs_oscillatory_moment(2.0, 4.0, k, 1e-8)


WORKLOADS = [
    ("compact moments (symbol program)", bench_compact_moments),
    ("bessel ball quadrature (series kernel)", bench_bessel_ball),
    ("oscillatory |sin| segments", bench_oscillatory_abs),
]


def run(repeat=3):
    results = {}
    for name in ("numba", "numpy"):
        try:
            backend.set_backend(name)
        except Exception as exc:
            print(f"backend {name} unavailable: {exc}")
            continue
        for label, fn in WORKLOADS:
            fn()  # warm up (JIT compile, caches)
            best = min(_timed(fn) for _ in range(repeat))
            results.setdefault(label, {})[name] = best
    width = max(len(label) for label, _ in WORKLOADS)
    print(f"{'workload'.ljust(width)}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for label, _ in WORKLOADS:
        r = results.get(label, {})
        nb, npy = r.get("numba"), r.get("numpy")
        ratio = f"{npy / nb:7.2f}x" if nb and npy else "     n/a"
        print(f"{label.ljust(width)}  {_fmt(nb):>10}  {_fmt(npy):>10}  {ratio}")


def _timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def _fmt(t):
    return f"{t * 1e3:8.1f}ms" if t is not None else "n/a"


if __name__ == "__main__":
    run()
