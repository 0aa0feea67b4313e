"""Timing comparison of the compiled kernels against the pure-python fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

Sizes mirror production use: the canonical vector at n = 200 over a beta
sweep, and one simulation block (4096 paths x 1024 steps) per call for the
path kernels.
"""

import math
import time

import numpy as np

from longrun._kernels import fallback

try:
    from longrun._kernels import _core
except ImportError:
    _core = None


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_canonical(mod):
    betas = np.linspace(0.0, 12.0, 200)

    def run():
        for b in betas:
            mod.log_canonical_vector(200, float(b))

    return run


def bench_gbm(mod, inc):
    def run():
        paths = inc.shape[0]
        w = np.zeros(paths)
        g = np.ones(paths)
        acc = np.zeros(paths)
        mod.gbm_trapezoid_chunk(w, g, acc, inc, 1.5, 0.0, 1e-3)

    return run


def bench_euler(mod, inc):
    def run():
        x = np.zeros(inc.shape[0])
        mod.euler_linear_sde_chunk(x, inc, 1.5, 1e-3)

    return run


def main():
    rng = np.random.default_rng(1)
    inc = rng.normal(0.0, math.sqrt(1e-3), size=(4096, 1024))

    cases = [
        ("log_canonical_vector (n=200, 200 betas)", bench_canonical),
        ("gbm_trapezoid_chunk (4096x1024)", lambda mod: bench_gbm(mod, inc)),
        ("euler_linear_sde_chunk (4096x1024)", lambda mod: bench_euler(mod, inc)),
    ]

    header = f"{'kernel':42s} {'python':>10s} {'cython':>10s} {'speedup':>9s}"
    print(header)
    print("-" * len(header))
    for name, make in cases:
        t_py = best_of(make(fallback))
        if _core is None:
            print(f"{name:42s} {t_py * 1e3:9.2f}ms {'n/a':>10s} {'n/a':>9s}")
            continue
        t_cy = best_of(make(_core))
        print(f"{name:42s} {t_py * 1e3:9.2f}ms {t_cy * 1e3:9.2f}ms "
              f"{t_py / t_cy:8.1f}x")
    if _core is None:
        print("\ncompiled extension not available; showing fallback only")


if __name__ == "__main__":
    main()
