"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_backends.py [--repeats N]

Each kernel runs on the same inputs under both backends; the best of N
repeats is reported after one untimed warm-up call (which also triggers JIT
compilation).
"""

import argparse
import time

import numpy as np

from irsmiso import (
    SystemConfig,
    build_qcqp,
    grid_oracle,
    initial_point,
    largest_eigenvector,
    rcg_solve,
    sample_channels,
    solve_fixed_point,
)
from irsmiso._jit import HAVE_NUMBA


def instance(m, nt=5, seed=0):
    cfg = SystemConfig(num_tx_antennas=nt, num_irs_elements=m, d_ap_irs_m=60, d_ap_user_m=60, d_irs_user_m=10)
    q, _ = build_qcqp(sample_channels(cfg, np.random.default_rng(seed))).normalized()
    return q


def best_time(fn, repeats):
    fn()
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    for m in (20, 80, 160):
        q = instance(m)
        v0 = initial_point(q)
        yield f"fixed_point M={m} (50 it)", lambda b, q=q, v0=v0: solve_fixed_point(q, v0, eps=1e-300, max_iter=50, backend=b)
        yield f"rcg M={m}", lambda b, q=q, v0=v0: rcg_solve(q, v0[:-1], backend=b)
        yield f"power iteration M={m}", lambda b, q=q: largest_eigenvector(q, backend=b)
    q = instance(4, nt=4)
    yield "grid oracle M=4 K=24", lambda b, q=q: grid_oracle(q, 24, backend=b)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    backends = ["numpy", "numba"] if HAVE_NUMBA else ["numpy"]
    print(f"{'kernel':<28}" + "".join(f"{b + ' ms':>12}" for b in backends) + (f"{'speedup':>10}" if HAVE_NUMBA else ""))
    for name, fn in cases():
        ts = [best_time(lambda: fn(b), args.repeats) * 1e3 for b in backends]
        row = f"{name:<28}" + "".join(f"{t:12.3f}" for t in ts)
        if len(ts) == 2:
            row += f"{ts[0] / ts[1]:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
