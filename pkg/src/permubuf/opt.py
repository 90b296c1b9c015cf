"""Offline optimum for B=1 schedules by DP over buffer-occupancy bitmasks.

OPT obeys the same step semantics as the online algorithm: one optional
transmission per step ``t >= 1``, then that step's arrivals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .errors import StateSpaceInfeasibleError
from .model import ArrivalSchedule, replay_transmissions

MAX_M = 16
MAX_CELLS = 50_000_000


@dataclass(frozen=True)
class OptResult:
    accepted_count: int
    total: int
    witness: tuple[tuple[int, Optional[int]], ...]

    @property
    def accepts_all_noninit(self) -> bool:
        # initializing packets are always accepted, so this is "accepts everything"
        return self.accepted_count == self.total

    def to_json(self) -> dict:
        return {
            "accepted_count": self.accepted_count,
            "total": self.total,
            "accepts_all_noninit": self.accepts_all_noninit,
            "witness": [[t, b] for t, b in self.witness],
        }


def arrival_masks(schedule: ArrivalSchedule) -> np.ndarray:
    masks = np.zeros(schedule.horizon + 1, dtype=np.int64)
    for t, b in schedule.events:
        masks[t] |= 1 << b
    return masks


def opt_throughput(schedule: ArrivalSchedule) -> OptResult:
    m = schedule.m
    if m > MAX_M:
        raise StateSpaceInfeasibleError(f"m = {m} exceeds {MAX_M}: 2^m occupancy states")
    masks = arrival_masks(schedule)
    if masks.shape[0] * (1 << m) > MAX_CELLS:
        raise StateSpaceInfeasibleError(
            f"{masks.shape[0]} steps x 2^{m} states exceeds {MAX_CELLS:,} DP cells"
        )
    last, parent, choice = kernels.opt_dp(m, masks)
    best = int(last.max())
    mask = int(np.flatnonzero(last == best)[0])
    witness = []
    for t in range(masks.shape[0] - 1, 0, -1):
        c = int(choice[t, mask])
        witness.append((t, c if c < m else None))
        mask = int(parent[t, mask])
    witness.reverse()
    return OptResult(best, len(schedule), tuple(witness))


def opt_accommodates_all(schedule: ArrivalSchedule) -> bool:
    return opt_throughput(schedule).accepts_all_noninit


def certify(schedule: ArrivalSchedule, result: OptResult) -> bool:
    """Replay the witness and confirm it attains ``accepted_count``."""
    return len(replay_transmissions(schedule, result.witness)) == result.accepted_count
