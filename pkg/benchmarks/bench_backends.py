#!/usr/bin/env python3
"""Benchmark the compiled core against the NumPy fallback.

Times the three hot loops (double-quadrature dephasing oracle, OU path
updates, trapezoidal phase accumulation) on representative workloads and
prints one row per case with the speedup.  Both implementations are imported
directly, so this runs regardless of which backend the package selected.
"""
import time

import numpy as np

from qprobe import _fallback

try:
    from qprobe import _core
except ImportError:
    _core = None


def best_of(fn, repeats=3):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_quad():
    cases = [
        ("quad ou    n=1024", (0, 0.0, 1.0, 1.0, 1024, 1)),
        ("quad gauss n=1024", (1, 0.0, 1.0, 1.0, 1024, 1)),
        ("quad pl    n=1024", (2, 3.0, 1.0, 1.0, 1024, 1)),
        ("quad ou    n=8192", (0, 0.0, 100.0, 2.0, 8192, 1)),
        ("quad pl    n=8192", (2, 3.0, 100.0, 2.0, 8192, 1)),
    ]
    for name, args in cases:
        yield name, (lambda a=args: _core.quad_beta(*a)), (
            lambda a=args: _fallback.quad_beta(*a)
        )


def bench_paths():
    rng = np.random.default_rng(0)
    draws = rng.standard_normal((2000, 5001))

    def compiled():
        buf = draws.copy()
        _core.ou_paths_inplace(buf, 1.0, 1e-3)

    def fallback():
        buf = draws.copy()
        _fallback.ou_paths_inplace(buf, 1.0, 1e-3)

    yield "ou paths 2000x5001", compiled, fallback

    paths = draws.copy()
    _fallback.ou_paths_inplace(paths, 1.0, 1e-3)
    out = np.empty(2000)

    yield (
        "phases   2000x5001",
        lambda: _core.trapezoid_phases(paths, 5001, 1e-3, out),
        lambda: _fallback.trapezoid_phases(paths, 5001, 1e-3, out),
    )


def main():
    if _core is None:
        print("compiled core not built; nothing to compare")
        return
    print(f"{'case':22s} {'compiled':>10s} {'python':>10s} {'speedup':>8s}")
    for name, compiled, fallback in list(bench_quad()) + list(bench_paths()):
        t_c = best_of(compiled)
        t_f = best_of(fallback)
        print(f"{name:22s} {t_c * 1e3:9.2f}ms {t_f * 1e3:9.2f}ms {t_f / t_c:7.1f}x")


if __name__ == "__main__":
    main()
