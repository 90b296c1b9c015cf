"""The m-buffer, B=1 packet buffering model.

Timing: step 0 carries arrivals only. Every later step ``t`` first performs at
most one transmission, then the arrivals stamped ``t`` in increasing buffer
order. An arrival is accepted iff its buffer is empty at that instant. The
simulation stops after the arrivals of the last event time.

Buffers are 0-based here; packet indices i are 1-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import InvalidParameterError, InvalidPermutationError, ScheduleFormatError

Event = tuple[int, int]


@dataclass(frozen=True)
class ArrivalSchedule:
    """``m`` buffers plus injections ``(time, buffer)`` sorted by time then buffer.

    Duplicate ``(time, buffer)`` pairs are kept in input order; the second
    one is necessarily rejected.
    """

    m: int
    events: tuple[Event, ...] = ()

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise InvalidParameterError(f"m must be a positive integer, got {self.m!r}")
        evs = []
        for ev in self.events:
            try:
                t, b = (int(x) for x in ev)
            except (TypeError, ValueError) as exc:
                raise InvalidParameterError(f"malformed event {ev!r}") from exc
            if t < 0:
                raise InvalidParameterError(f"negative time in event {ev!r}")
            if not 0 <= b < self.m:
                raise InvalidParameterError(f"buffer {b} out of range [0, {self.m})")
            evs.append((t, b))
        # stable: duplicates stay in input order
        evs.sort()
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "events", tuple(evs))

    @property
    def horizon(self) -> int:
        """Last event time, or -1 for an empty schedule."""
        return self.events[-1][0] if self.events else -1

    def __len__(self) -> int:
        return len(self.events)

    def to_text(self) -> str:
        lines = [f"m={self.m}"]
        lines += [f"{t} {b}" for t, b in self.events]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"m": self.m, "events": [[t, b] for t, b in self.events]}


@dataclass(frozen=True)
class PacketRecord:
    time: int
    buffer: int
    # None marks an initializing packet, else the 1-based non-initializing index
    index: Optional[int] = None

    @property
    def is_initializing(self) -> bool:
        return self.index is None


@dataclass(frozen=True)
class RunTrace:
    permutation: tuple[int, ...]
    accepted: frozenset[int]  # positions into schedule.events
    transmissions: tuple[tuple[int, Optional[int]], ...]
    final_occupancy: int


def classify_packets(schedule: ArrivalSchedule) -> list[PacketRecord]:
    seen: set[int] = set()
    out = []
    n = 0
    for t, b in schedule.events:
        if b in seen:
            n += 1
            out.append(PacketRecord(t, b, n))
        else:
            seen.add(b)
            out.append(PacketRecord(t, b))
    return out


def noninit_positions(schedule: ArrivalSchedule) -> list[int]:
    """Event positions of the non-initializing packets, in index order."""
    return [k for k, rec in enumerate(classify_packets(schedule)) if not rec.is_initializing]


def _simulate(schedule: ArrivalSchedule, pick: Callable[[int, int], Optional[int]]):
    occ = 0
    accepted = set()
    sent = []
    events = schedule.events
    k = 0
    for t in range(schedule.horizon + 1):
        if t >= 1:
            b = pick(t, occ)
            if b is not None:
                occ &= ~(1 << b)
            sent.append((t, b))
        while k < len(events) and events[k][0] == t:
            b = events[k][1]
            if not occ >> b & 1:
                occ |= 1 << b
                accepted.add(k)
            k += 1
    return frozenset(accepted), tuple(sent), occ


def _check_permutation(m: int, permutation: Sequence[int]) -> tuple[int, ...]:
    try:
        perm = tuple(int(b) for b in permutation)
    except (TypeError, ValueError) as exc:
        raise InvalidPermutationError(f"not a permutation: {permutation!r}") from exc
    if sorted(perm) != list(range(m)):
        raise InvalidPermutationError(f"{perm} is not a bijection on [0, {m})")
    return perm


def run_deterministic(schedule: ArrivalSchedule, permutation: Sequence[int]) -> RunTrace:
    """Run Random Permutation with its random ordering fixed to ``permutation``.

    ``permutation[0]`` is the buffer at the front. This is the plain-Python
    reference; the enumeration kernels are checked against it.
    """
    perm = _check_permutation(schedule.m, permutation)

    def pick(t, occ):
        for b in perm:
            if occ >> b & 1:
                return b
        return None

    accepted, sent, occ = _simulate(schedule, pick)
    return RunTrace(perm, accepted, sent, occ)


def replay_transmissions(
    schedule: ArrivalSchedule, transmissions: Iterable[tuple[int, Optional[int]]]
) -> frozenset[int]:
    """Accepted event positions when steps transmit exactly as listed.

    Steps missing from ``transmissions`` idle. Transmitting from an empty
    buffer raises ``InvalidParameterError``.
    """
    plan = {}
    for t, b in transmissions:
        if t < 1 or t > schedule.horizon:
            raise InvalidParameterError(f"transmission at step {t} outside [1, {schedule.horizon}]")
        if t in plan:
            raise InvalidParameterError(f"two transmissions at step {t}")
        plan[t] = b

    def pick(t, occ):
        b = plan.get(t)
        if b is not None and not occ >> b & 1:
            raise InvalidParameterError(f"step {t} transmits from empty buffer {b}")
        return b

    return _simulate(schedule, pick)[0]


def systematic_schedule(m: int) -> ArrivalSchedule:
    """All buffers initialized at 0, then packet ``i`` at time ``i`` to buffer ``i-1``."""
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise InvalidParameterError(f"m must be >= 1, got {m!r}")
    events = [(0, b) for b in range(m)] + [(i, i - 1) for i in range(1, m + 1)]
    return ArrivalSchedule(m, tuple(events))


def counterexample_schedule() -> ArrivalSchedule:
    """The m=10 input on which Random Permutation falls below the claimed bound.

    Systematic through time 7, silent at time 8, two injections at time 9
    and a repeat into the first of them at time 10.
    """
    m = 10
    events = [(0, b) for b in range(m)]
    events += [(i, i - 1) for i in range(1, 8)]
    events += [(9, 7), (9, 8), (10, 7)]
    return ArrivalSchedule(m, tuple(events))


# -- file formats -------------------------------------------------------------


def parse_schedule_text(text: str) -> ArrivalSchedule:
    m = None
    events = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if m is None:
            key, sep, val = line.partition("=")
            if not sep or key.strip() != "m":
                raise ScheduleFormatError(f"line {lineno}: expected header 'm=<int>'")
            try:
                m = int(val)
            except ValueError:
                raise ScheduleFormatError(f"line {lineno}: bad m value {val.strip()!r}") from None
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ScheduleFormatError(f"line {lineno}: expected '<time> <buffer>'")
        try:
            events.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ScheduleFormatError(f"line {lineno}: non-integer field") from None
    if m is None:
        raise ScheduleFormatError("missing 'm=<int>' header")
    if events != sorted(events):
        raise ScheduleFormatError("events are not sorted by (time, buffer)")
    try:
        return ArrivalSchedule(m, tuple(events))
    except InvalidParameterError as exc:
        raise ScheduleFormatError(str(exc)) from exc


def parse_schedule_json(doc) -> ArrivalSchedule:
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ScheduleFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "m" not in doc or "events" not in doc:
        raise ScheduleFormatError("JSON schedule needs fields 'm' and 'events'")
    m = doc["m"]
    if not isinstance(m, int) or isinstance(m, bool):
        raise ScheduleFormatError(f"'m' must be an integer, got {m!r}")
    try:
        events = [(int(t), int(b)) for t, b in doc["events"]]
    except (TypeError, ValueError) as exc:
        raise ScheduleFormatError(f"malformed events: {exc}") from exc
    try:
        return ArrivalSchedule(m, tuple(events))
    except InvalidParameterError as exc:
        raise ScheduleFormatError(str(exc)) from exc


def load_schedule(path) -> ArrivalSchedule:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScheduleFormatError(f"cannot read {path}: {exc}") from exc
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        return parse_schedule_json(text)
    return parse_schedule_text(text)


def save_schedule(schedule: ArrivalSchedule, path, as_json: bool | None = None) -> Path:
    path = Path(path)
    if as_json is None:
        as_json = path.suffix == ".json"
    if as_json:
        path.write_text(json.dumps(schedule.to_json()) + "\n")
    else:
        path.write_text(schedule.to_text())
    return path


# -- kernel input -------------------------------------------------------------


@dataclass(frozen=True)
class CompiledSchedule:
    """Flat arrays consumed by the kernels: events grouped by step (CSR)."""

    m: int
    step_ptr: np.ndarray  # int64, len horizon + 2
    ev_buf: np.ndarray  # int64, buffer of each event in schedule order
    noninit: np.ndarray = field(repr=False)  # event positions of packets 1..n


def compile_schedule(schedule: ArrivalSchedule) -> CompiledSchedule:
    T = schedule.horizon
    times = np.array([t for t, _ in schedule.events], dtype=np.int64)
    ev_buf = np.array([b for _, b in schedule.events], dtype=np.int64)
    step_ptr = np.searchsorted(times, np.arange(T + 2), side="left").astype(np.int64)
    noninit = np.array(noninit_positions(schedule), dtype=np.int64)
    return CompiledSchedule(schedule.m, step_ptr, ev_buf, noninit)
