"""Exhaustive search for inputs on which sum(p) falls below sum(q).

Every schedule in a family starts with one initializing packet per buffer at
time 0. The ``general`` family then places ``n`` non-initializing packets on
distinct ``(time, buffer)`` slots with times in ``[1, max_time]``. The
``systematic`` family keeps the systematic targets (packet ``i`` to buffer
``i-1``, so ``n <= m``) and only delays the injection times, which are
non-decreasing, so several buffers may fill in the same step.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .errors import CostRefusalError, InvalidParameterError
from .exact import ENUM_LIMIT, acceptance_profile, compare_sums, q_table
from .model import ArrivalSchedule, noninit_positions
from .opt import opt_accommodates_all

FAMILIES = ("general", "systematic")
DEFAULT_BUDGET = 10**10


@dataclass(frozen=True)
class SearchSpace:
    m: int
    n: Optional[int] = None
    max_time: Optional[int] = None
    family: str = "general"
    canonical_labels: bool = False

    def __post_init__(self):
        if self.m < 1 or self.m > ENUM_LIMIT:
            raise InvalidParameterError(f"m must be in [1, {ENUM_LIMIT}], got {self.m}")
        if self.n is None:
            object.__setattr__(self, "n", self.m)
        if self.max_time is None:
            object.__setattr__(self, "max_time", self.m + 4)
        if self.n < 0 or self.max_time < 1:
            raise InvalidParameterError("need n >= 0 and max_time >= 1")
        if self.family not in FAMILIES:
            raise InvalidParameterError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.family == "systematic" and self.n > self.m:
            raise InvalidParameterError("the systematic family has at most m non-initializing packets")


def _init_events(m):
    return tuple((0, b) for b in range(m))


def canonical_form(schedule: ArrivalSchedule) -> ArrivalSchedule:
    """Representative of ``schedule`` under buffer relabeling.

    A buffer is described by its sorted arrival times; buffers are relabeled
    in increasing order of that tuple.
    """
    sigs = [[] for _ in range(schedule.m)]
    for t, b in schedule.events:
        sigs[b].append(t)
    sigs.sort()
    events = tuple((t, b) for b, sig in enumerate(sigs) for t in sig)
    return ArrivalSchedule(schedule.m, events)


def _general(space: SearchSpace) -> Iterator[ArrivalSchedule]:
    slots = [(t, b) for t in range(1, space.max_time + 1) for b in range(space.m)]
    init = _init_events(space.m)
    for combo in itertools.combinations(slots, space.n):
        yield ArrivalSchedule(space.m, init + combo)


def _general_canonical(space: SearchSpace) -> Iterator[ArrivalSchedule]:
    # multisets of per-buffer time sets, listed as non-decreasing sequences
    times = range(1, space.max_time + 1)
    subsets = sorted(
        s for k in range(min(space.n, space.max_time) + 1) for s in itertools.combinations(times, k)
    )

    def rec(start, left_buffers, left_packets, chosen):
        if left_buffers == 0:
            if left_packets == 0:
                yield chosen
            return
        for idx in range(start, len(subsets)):
            s = subsets[idx]
            if len(s) <= left_packets:
                yield from rec(idx, left_buffers - 1, left_packets - len(s), chosen + [s])

    for chosen in rec(0, space.m, space.n, []):
        events = tuple((t, b) for b, s in enumerate(chosen) for t in (0,) + s)
        yield ArrivalSchedule(space.m, events)


def _systematic(space: SearchSpace) -> Iterator[ArrivalSchedule]:
    init = _init_events(space.m)
    for times in itertools.combinations_with_replacement(range(1, space.max_time + 1), space.n):
        extra = tuple((t, i) for i, t in enumerate(times))
        yield ArrivalSchedule(space.m, init + extra)


def enumerate_family(space: SearchSpace) -> Iterator[ArrivalSchedule]:
    """Every schedule of the family once, in a deterministic order."""
    if space.family == "general":
        yield from (_general_canonical if space.canonical_labels else _general)(space)
        return
    if not space.canonical_labels:
        yield from _systematic(space)
        return
    seen = set()
    for s in _systematic(space):
        c = canonical_form(s)
        if c.events not in seen:
            seen.add(c.events)
            yield c


def family_size(space: SearchSpace) -> int:
    """Schedules ``enumerate_family`` yields; an upper bound for canonical systematic."""
    m, n, T = space.m, space.n, space.max_time
    if space.family == "general":
        if not space.canonical_labels:
            return math.comb(T * m, n)
        # multisets of m subsets of [T] whose sizes add to n
        ways = [[0] * (n + 1) for _ in range(m + 1)]
        ways[0][0] = 1
        for k in range(0, min(n, T) + 1):
            kinds = math.comb(T, k)
            new = [[0] * (n + 1) for _ in range(m + 1)]
            for used in range(m + 1):
                for w in range(n + 1):
                    if not ways[used][w]:
                        continue
                    for j in range(0, m - used + 1):
                        if w + j * k > n:
                            break
                        new[used + j][w + j * k] += ways[used][w] * math.comb(kinds + j - 1, j)
            ways = new
        return ways[m][n]
    return math.comb(T + n - 1, n)


def in_family(space: SearchSpace, schedule: ArrivalSchedule) -> bool:
    if schedule.m != space.m:
        return False
    init = _init_events(space.m)
    if schedule.events[: space.m] != init:
        return False
    extra = schedule.events[space.m :]
    if len(extra) != space.n or len(set(extra)) != len(extra):
        return False
    if any(not 1 <= t <= space.max_time for t, _ in extra):
        return False
    if space.family == "systematic":
        if space.canonical_labels:
            # relabeled: n distinct buffers with one delayed packet each
            if len({b for _, b in extra}) != space.n:
                return False
        # with n <= m targets are distinct, so sorted order is packet order
        elif [b for _, b in extra] != list(range(space.n)):
            return False
    if space.canonical_labels:
        return canonical_form(schedule) == schedule
    return True


def estimate_cost(space: SearchSpace) -> int:
    """Elementary simulation steps: schedules x m! x (steps + events)."""
    per_run = space.max_time + 1 + space.m + space.n
    return family_size(space) * math.factorial(space.m) * per_run


@dataclass(frozen=True)
class Violation:
    schedule: ArrivalSchedule
    sum_p: int
    sum_q: int

    def to_json(self) -> dict:
        return {"schedule": self.schedule.to_json(), "sum_p": self.sum_p, "sum_q": self.sum_q}


@dataclass
class SearchReport:
    examined: int = 0
    skipped: int = 0
    proviso_failures: int = 0
    violations: list[Violation] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "examined": self.examined,
            "skipped": self.skipped,
            "proviso_failures": self.proviso_failures,
            "violations": [v.to_json() for v in self.violations],
        }


def _evaluate(schedule: ArrivalSchedule):
    if len(noninit_positions(schedule)) != schedule.m:
        return "skipped", None
    if not opt_accommodates_all(schedule):
        return "proviso", None
    cmp = compare_sums(acceptance_profile(schedule), q_table(schedule.m))
    if cmp.ordering < 0:
        return "violation", Violation(schedule, cmp.sum_p, cmp.sum_q)
    return "ok", None


def scan_schedules(schedules: Iterable[ArrivalSchedule], *, threads: int = 1) -> SearchReport:
    """Evaluate arbitrary schedules the way ``find_violations`` does."""
    report = SearchReport()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_evaluate, schedules))
    else:
        results = map(_evaluate, schedules)
    for status, v in results:
        report.examined += 1
        if status == "skipped":
            report.skipped += 1
        elif status == "proviso":
            report.proviso_failures += 1
        elif status == "violation":
            report.violations.append(v)
    report.violations.sort(key=lambda v: (v.schedule.m, v.schedule.events))
    return report


def find_violations(
    space: SearchSpace, *, budget: int = DEFAULT_BUDGET, threads: int = 1
) -> SearchReport:
    cost = estimate_cost(space)
    if cost > budget:
        raise CostRefusalError(f"estimated {cost:.3e} simulation steps exceeds budget {budget:.3e}", cost)
    return scan_schedules(enumerate_family(space), threads=threads)
