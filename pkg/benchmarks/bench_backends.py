"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_backends.py [--repeat N]

Both kernel modules are imported directly, so PERMUBUF_NO_NUMBA has no effect
here. Numba timings exclude the first (compiling) call.
"""

import argparse
import math
import time

import numpy as np

from permubuf import _kernels_np
from permubuf.model import compile_schedule, counterexample_schedule, systematic_schedule
from permubuf.montecarlo import block_generator, sample_permutations
from permubuf.opt import arrival_masks

try:
    from permubuf import _kernels_nb
except ImportError:  # pragma: no cover
    _kernels_nb = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    ce = compile_schedule(counterexample_schedule())
    total = math.factorial(10)
    yield "enumerate 10! (counterexample)", lambda k: k.count_rank_range(10, ce.step_ptr, ce.ev_buf, 0, total)

    s6 = compile_schedule(systematic_schedule(6))
    perms = sample_permutations(block_generator(0, 0), 6, 1_000_000)
    yield "simulate 1e6 sampled orders (m=6)", lambda k: k.count_perms(perms, s6.step_ptr, s6.ev_buf)

    masks = arrival_masks(systematic_schedule(14))
    yield "OPT bitmask DP (systematic m=14)", lambda k: k.opt_dp(14, masks)[0]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    print(f"{'case':36s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for name, fn in cases():
        t_np, out_np = best_of(lambda: fn(_kernels_np), args.repeat)
        if _kernels_nb is None:
            print(f"{name:36s} {t_np:9.3f}s {'n/a':>10s}")
            continue
        fn(_kernels_nb)  # compile
        t_nb, out_nb = best_of(lambda: fn(_kernels_nb), args.repeat)
        assert np.array_equal(out_np, out_nb), name
        print(f"{name:36s} {t_np:9.3f}s {t_nb:9.3f}s {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
