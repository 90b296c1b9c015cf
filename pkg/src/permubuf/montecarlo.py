"""Seeded Monte Carlo estimates of the acceptance profile.

Trials are cut into fixed blocks of ``BLOCK`` consecutive trial indices.
Block ``k`` draws from ``SeedSequence(seed, spawn_key=(k,))``, so the output
depends on ``(schedule, trials, seed)`` only, never on the thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidParameterError
from .model import ArrivalSchedule, compile_schedule

BLOCK = 1 << 16
_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class MCEstimate:
    trials: int
    seed: int
    accept_counts: tuple[int, ...]

    @property
    def estimates(self) -> tuple[float, ...]:
        return tuple(c / self.trials for c in self.accept_counts)

    @property
    def standard_errors(self) -> tuple[float, ...]:
        return tuple(math.sqrt(p * (1 - p) / self.trials) for p in self.estimates)

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "accept_counts": list(self.accept_counts),
            "estimates": list(self.estimates),
            "standard_errors": list(self.standard_errors),
        }


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed & _U64, spawn_key=(block,))))


def sample_permutations(rng: np.random.Generator, m: int, size: int) -> np.ndarray:
    # Generator.permuted is an unbiased Fisher-Yates over each row
    base = np.broadcast_to(np.arange(m, dtype=np.int64), (size, m))
    return rng.permuted(base, axis=1)


def estimate_profile(
    schedule: ArrivalSchedule, trials: int, seed: int, *, threads: int = 1
) -> MCEstimate:
    if not isinstance(trials, int) or trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials!r}")
    cs = compile_schedule(schedule)
    n_blocks = -(-trials // BLOCK)

    def work(k):
        size = min(BLOCK, trials - k * BLOCK)
        perms = sample_permutations(block_generator(seed, k), cs.m, size)
        return kernels.count_perms(perms, cs.step_ptr, cs.ev_buf)

    threads = max(1, int(threads))
    if threads == 1:
        parts = [work(k) for k in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, range(n_blocks)))
    total = np.sum(parts, axis=0, dtype=np.int64)
    return MCEstimate(trials, seed, tuple(int(total[k]) for k in cs.noninit))
