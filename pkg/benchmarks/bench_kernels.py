"""Benchmark the numba kernels against the pure-numpy fallbacks.

Run with the default backend so both variants are importable:

    python benchmarks/bench_kernels.py

The first numba call pays JIT compilation (cached on disk afterwards); it is
excluded by a warmup pass.
"""

import time

import numpy as np

from resolvkit import TypeClassTable, bernoulli
from resolvkit import _kernels
from resolvkit._backend import BACKEND


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def bench_class_smooth():
    print("class_smooth_entropy (type-class ball minimizer)")
    for n in (10_000, 100_000, 1_000_000):
        table = TypeClassTable.build([bernoulli(0.3)], np.array([1.0]), n)
        log_q, mass = table.sorted_classes()
        args = (log_q, mass, 0.1)
        t_np, v_np = timeit(_kernels._smooth_entropy_numpy, *args)
        if BACKEND == "numba":
            _kernels._smooth_entropy_numba(*args)  # warmup / JIT
            t_nb, v_nb = timeit(_kernels._smooth_entropy_numba, *args)
            assert abs(v_np - v_nb) <= 1e-9 * n
            print(f"  n={n:>9,}  numpy {t_np*1e3:8.3f} ms   numba {t_nb*1e3:8.3f} ms   "
                  f"speedup x{t_np/t_nb:5.2f}")
        else:
            print(f"  n={n:>9,}  numpy {t_np*1e3:8.3f} ms   (numba backend inactive)")


def bench_ball_dominance():
    print("ball_dominance (sampled-ball entropy/majorization check)")
    rng = np.random.default_rng(1)
    for s_count, size in ((200_000, 3), (50_000, 8)):
        samples = rng.dirichlet(np.ones(size), size=s_count)
        v = np.sort(rng.dirichlet(np.ones(size)))[::-1]
        partials = np.ascontiguousarray(np.cumsum(v))
        args = (samples, partials)
        t_np, v_np = timeit(_kernels._ball_dominance_numpy, *args, repeat=3)
        if BACKEND == "numba":
            _kernels._ball_dominance_numba(*args)  # warmup / JIT
            t_nb, v_nb = timeit(_kernels._ball_dominance_numba, *args, repeat=3)
            assert abs(v_np[0] - v_nb[0]) <= 1e-9 and abs(v_np[1] - v_nb[1]) <= 1e-12
            print(f"  S={s_count:>7,} N={size}  numpy {t_np*1e3:8.2f} ms   "
                  f"numba {t_nb*1e3:8.2f} ms   speedup x{t_np/t_nb:5.2f}")
        else:
            print(f"  S={s_count:>7,} N={size}  numpy {t_np*1e3:8.2f} ms   "
                  f"(numba backend inactive)")


if __name__ == "__main__":
    print(f"active backend: {BACKEND}")
    bench_class_smooth()
    bench_ball_dominance()
