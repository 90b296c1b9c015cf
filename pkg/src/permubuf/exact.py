"""Exact acceptance probabilities of Random Permutation by full enumeration.

Every probability is an integer count over ``m!``. Counting runs in the
kernels over contiguous lexicographic rank ranges; merging is integer
addition, so the result does not depend on how the ranks are split.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import kernels
from .errors import (
    EnumerationInfeasibleError,
    ExactArithmeticError,
    InvalidComparisonError,
    InvalidParameterError,
)
from .model import ArrivalSchedule, compile_schedule, counterexample_schedule

ENUM_LIMIT = 11
OVERRIDE_LIMIT = 12
# 20! < 2**63: the widest factorial the int64 kernels can count up to
EXACT_LIMIT = 20


def decimal_str(num: int, den: int, places: int = 6) -> str:
    """``num/den`` rounded half-up to ``places`` decimals, without floats."""
    scaled = (2 * num * 10**places + den) // (2 * den)
    whole, frac = divmod(scaled, 10**places)
    return f"{whole}.{frac:0{places}d}" if places else str(whole)


@dataclass(frozen=True, order=True)
class ExactProb:
    """``count / m!``, kept unreduced."""

    count: int
    m: int

    def __post_init__(self):
        if not 0 <= self.count <= math.factorial(self.m):
            raise ExactArithmeticError(f"count {self.count} outside [0, {self.m}!]")

    @property
    def denominator(self) -> int:
        return math.factorial(self.m)

    def as_fraction(self) -> Fraction:
        return Fraction(self.count, self.denominator)

    def decimal(self, places: int = 6) -> str:
        return decimal_str(self.count, self.denominator, places)

    def __str__(self):
        return f"{self.count}/{self.m}! ({self.decimal()})"


@dataclass(frozen=True)
class AcceptanceProfile:
    m: int
    probs: tuple[ExactProb, ...]

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(p.count for p in self.probs)

    def p(self, i: int) -> ExactProb:
        """1-based, as in ``p_i``."""
        if not 1 <= i <= len(self.probs):
            raise IndexError(f"no non-initializing packet {i}")
        return self.probs[i - 1]

    def __len__(self):
        return len(self.probs)


@dataclass(frozen=True)
class QTable:
    m: int
    numerators: tuple[int, ...]  # position i-1 holds q_i * m!

    def q(self, i: int) -> ExactProb:
        if not 1 <= i <= self.m:
            raise IndexError(f"q_i is only defined for 1 <= i <= {self.m}")
        return ExactProb(self.numerators[i - 1], self.m)

    def __len__(self):
        return len(self.numerators)


@dataclass(frozen=True)
class SumComparison:
    m: int
    sum_p: int
    sum_q: int

    @property
    def ordering(self) -> int:
        """Sign of ``sum_p - sum_q``."""
        return (self.sum_p > self.sum_q) - (self.sum_p < self.sum_q)

    @property
    def relation_holds(self) -> bool:
        return self.sum_p >= self.sum_q

    @property
    def verdict(self) -> str:
        return {-1: "VIOLATED", 0: "EQUAL", 1: "HOLDS"}[self.ordering]

    def swapped(self) -> "SumComparison":
        return SumComparison(self.m, self.sum_q, self.sum_p)


def _check_enum_limit(m: int, limit: int, limit_override: bool) -> None:
    if m > EXACT_LIMIT:
        raise ExactArithmeticError(f"{m}! does not fit 64-bit counters (max m = {EXACT_LIMIT})")
    if m <= limit:
        return
    if limit_override and m <= max(limit, OVERRIDE_LIMIT):
        warnings.warn(
            f"enumerating {m}! = {math.factorial(m):,} permutations; this will be slow",
            RuntimeWarning,
            stacklevel=3,
        )
        return
    hint = f" (up to {OVERRIDE_LIMIT} with limit_override)" if m <= OVERRIDE_LIMIT else ""
    raise EnumerationInfeasibleError(f"m = {m} exceeds the enumeration limit {limit}{hint}")


def rank_partitions(m: int, k: int) -> list[tuple[int, int]]:
    """``k`` contiguous lexicographic rank ranges covering ``[0, m!)``."""
    if k < 1:
        raise InvalidParameterError(f"partitions must be >= 1, got {k}")
    total = math.factorial(m)
    bounds = [total * i // k for i in range(k + 1)]
    return list(zip(bounds[:-1], bounds[1:]))


def event_counts(
    schedule: ArrivalSchedule,
    *,
    partitions: Optional[int] = None,
    threads: int = 1,
    limit: int = ENUM_LIMIT,
    limit_override: bool = False,
) -> np.ndarray:
    """Number of permutations accepting each event, in schedule order."""
    _check_enum_limit(schedule.m, limit, limit_override)
    threads = max(1, int(threads))
    if partitions is None:
        partitions = threads
    cs = compile_schedule(schedule)
    ranges = rank_partitions(schedule.m, partitions)

    def work(rng):
        return kernels.count_rank_range(cs.m, cs.step_ptr, cs.ev_buf, rng[0], rng[1])

    if threads == 1 or len(ranges) == 1:
        parts = [work(r) for r in ranges]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, ranges))
    total = np.zeros(len(schedule), dtype=np.int64)
    for part in parts:
        total += part
    if total.size and (total.min() < 0 or int(total.max()) > math.factorial(schedule.m)):
        raise ExactArithmeticError("permutation counts out of range; counter overflow")
    return total


def acceptance_profile(
    schedule: ArrivalSchedule,
    *,
    partitions: Optional[int] = None,
    threads: int = 1,
    limit: int = ENUM_LIMIT,
    limit_override: bool = False,
) -> AcceptanceProfile:
    """Exact ``p_i`` for every non-initializing packet of ``schedule``."""
    counts = event_counts(
        schedule,
        partitions=partitions,
        threads=threads,
        limit=limit,
        limit_override=limit_override,
    )
    cs = compile_schedule(schedule)
    probs = tuple(ExactProb(int(counts[k]), schedule.m) for k in cs.noninit)
    return AcceptanceProfile(schedule.m, probs)


def q_table(m: int, limit: int = EXACT_LIMIT) -> QTable:
    """Numerators ``q_i * m!`` of the closed-form bound for ``i = 1..m``."""
    if not isinstance(m, int) or m < 1:
        raise InvalidParameterError(f"m must be a positive integer, got {m!r}")
    if m > limit:
        raise ExactArithmeticError(f"m = {m} exceeds the exact-arithmetic limit {limit}")
    fm = math.factorial(m)
    nums = []
    for i in range(1, m + 1):
        s = sum((-1) ** (j - 1) * math.comb(i, j) * math.factorial(m - j) for j in range(1, i + 1))
        if not 0 < s <= fm:
            raise ExactArithmeticError(f"q_{i} numerator {s} outside (0, {m}!]")
        nums.append(s)
    return QTable(m, tuple(nums))


def compare_sums(profile: AcceptanceProfile, qtable: QTable) -> SumComparison:
    if profile.m != qtable.m:
        raise InvalidComparisonError(f"profile has m={profile.m}, q-table has m={qtable.m}")
    if len(profile) != qtable.m:
        raise InvalidComparisonError(
            f"profile has {len(profile)} packets; the bound covers exactly m={qtable.m}"
        )
    return SumComparison(profile.m, sum(profile.counts), sum(qtable.numerators))


# -- published values ---------------------------------------------------------

EXPECTED_TABLE = {
    "m": 10,
    "p": {8: 2_374_894, 9: 2_374_894, 10: 1_716_050},
    "q": {8: 2_012_014, 9: 2_160_343, 10: 2_293_839},
    "systematic_prefix": 7,
}


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    expected: object
    actual: object

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "expected": self.expected, "actual": self.actual}


@dataclass
class VerificationReport:
    m: int
    p_numerators: list[int]
    q_numerators: list[int]
    sum_p: int
    sum_q: int
    relation_holds: Optional[bool]
    checks: list[Check] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, passed, expected, actual):
        self.checks.append(Check(name, bool(passed), expected, actual))

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "p_numerators": self.p_numerators,
            "q_numerators": self.q_numerators,
            "sum_p": self.sum_p,
            "sum_q": self.sum_q,
            "relation_holds": self.relation_holds,
            "checks": [c.to_json() for c in self.checks],
        }


def verify_paper_values(
    schedule: Optional[ArrivalSchedule] = None,
    *,
    expected: Optional[dict] = None,
    threads: int = 1,
) -> VerificationReport:
    """Recompute the m=10 table and check it against the published numbers.

    Failures are recorded in the report rather than raised.
    """
    expected = EXPECTED_TABLE if expected is None else expected
    if schedule is None:
        schedule = counterexample_schedule()
    m = expected["m"]
    profile = acceptance_profile(schedule, threads=threads, limit=max(ENUM_LIMIT, schedule.m))
    qt = q_table(m)
    p = list(profile.counts)
    q = list(qt.numerators)

    def p_at(i):
        return p[i - 1] if i <= len(p) else None

    try:
        cmp = compare_sums(profile, qt)
        sum_p, sum_q, holds = cmp.sum_p, cmp.sum_q, cmp.relation_holds
    except InvalidComparisonError:
        sum_p, sum_q, holds = sum(p), sum(q), None

    report = VerificationReport(m, p, q, sum_p, sum_q, holds)
    for i, want in sorted(expected["p"].items()):
        report.add(f"p_{i} * {m}!", p_at(i) == want, want, p_at(i))
    for i, want in sorted(expected["q"].items()):
        got = q[i - 1] if i <= len(q) else None
        report.add(f"q_{i} * {m}!", got == want, want, got)
    for i in range(1, expected["systematic_prefix"] + 1):
        report.add(f"p_{i} = q_{i}", p_at(i) == q[i - 1], q[i - 1], p_at(i))
    half = math.factorial(m) // 2
    last = p_at(m)
    report.add(f"p_{m} * {m}! < {m}!/2", last is not None and last < half, f"< {half}", last)
    report.add(
        "sum p < sum q",
        holds is False,
        f"< {sum_q}",
        sum_p if holds is not None else f"length mismatch ({len(p)} packets)",
    )
    return report
