import math
from fractions import Fraction

import pytest

from oracles import brute_force_counts, exhaustive_opt, q_fraction
from permubuf.errors import CostRefusalError, InvalidParameterError
from permubuf.model import ArrivalSchedule, counterexample_schedule, systematic_schedule
from permubuf.search import (
    SearchSpace,
    canonical_form,
    enumerate_family,
    estimate_cost,
    family_size,
    find_violations,
    in_family,
    scan_schedules,
)

# found by find_violations(SearchSpace(7, max_time=8, canonical_labels=True))
M7_VIOLATION = ArrivalSchedule(
    7,
    tuple((0, b) for b in range(7)) + ((1, 2), (2, 3), (3, 4), (5, 5), (5, 6), (6, 5), (7, 6)),
)


def oracle_verdict(s):
    """(accommodated, sum p < sum q) by brute force, independent of the engine."""
    if exhaustive_opt(s) != len(s):
        return False, None
    sum_p = Fraction(sum(brute_force_counts(s)), math.factorial(s.m))
    sum_q = sum(q_fraction(s.m, i) for i in range(1, s.m + 1))
    return True, sum_p < sum_q


@pytest.mark.parametrize(
    "space",
    [
        SearchSpace(2, max_time=3),
        SearchSpace(3, n=2, max_time=3),
        SearchSpace(2, max_time=4, canonical_labels=True),
        SearchSpace(3, max_time=3, canonical_labels=True),
        SearchSpace(3, max_time=4, family="systematic"),
        SearchSpace(4, n=3, max_time=3, family="systematic", canonical_labels=True),
    ],
    ids=str,
)
def test_family_size_and_uniqueness(space):
    got = list(enumerate_family(space))
    assert len({s.events for s in got}) == len(got)
    assert all(in_family(space, s) for s in got)
    if space.family == "general" or not space.canonical_labels:
        assert len(got) == family_size(space)
    else:
        assert len(got) <= family_size(space)


@pytest.mark.parametrize("m,T,n", [(2, 3, 2), (3, 3, 3), (3, 4, 2), (4, 2, 4)])
def test_canonical_classes_match_brute_force(m, T, n):
    plain = SearchSpace(m, n=n, max_time=T)
    classes = {canonical_form(s).events for s in enumerate_family(plain)}
    canon = SearchSpace(m, n=n, max_time=T, canonical_labels=True)
    assert {s.events for s in enumerate_family(canon)} == classes
    assert family_size(canon) == len(classes)


def test_systematic_family_small():
    space = SearchSpace(2, n=2, max_time=2, family="systematic")
    got = [s.events[2:] for s in enumerate_family(space)]
    assert got == [((1, 0), (1, 1)), ((1, 0), (2, 1)), ((2, 0), (2, 1))]
    assert systematic_schedule(2) in list(enumerate_family(space))


def test_single_slot_family():
    assert len(list(enumerate_family(SearchSpace(1, n=1, max_time=1)))) == 1


def test_empty_family():
    (only,) = enumerate_family(SearchSpace(3, n=0, max_time=2))
    assert only.events == ((0, 0), (0, 1), (0, 2))


def test_counterexample_in_general_family():
    space = SearchSpace(10, max_time=10)
    assert in_family(space, counterexample_schedule())
    assert not in_family(SearchSpace(10, max_time=10, family="systematic"), counterexample_schedule())
    assert in_family(SearchSpace(10, max_time=10, family="systematic"), systematic_schedule(10))


def test_space_validation():
    with pytest.raises(InvalidParameterError):
        SearchSpace(12)
    with pytest.raises(InvalidParameterError):
        SearchSpace(3, family="weird")
    with pytest.raises(InvalidParameterError):
        SearchSpace(3, n=4, family="systematic")
    assert SearchSpace(5).max_time == 9


def test_counterexample_only_space():
    rep = scan_schedules([counterexample_schedule()])
    assert rep.examined == 1 and len(rep.violations) == 1
    v = rep.violations[0]
    assert (v.sum_p, v.sum_q) == (14_684_212, 14_684_570)
    assert v.sum_q == 362880 + 685440 + 972720 + 1229040 + 1458120 + 1663176 + 1846998 + 2012014 + 2160343 + 2293839


def test_systematic_schedules_never_violate():
    rep = scan_schedules([systematic_schedule(m) for m in range(1, 9)])
    assert rep.examined == 8 and rep.violations == []


def test_skips_wrong_packet_count_and_counts_proviso():
    rep = scan_schedules([
        ArrivalSchedule(2, ((0, 0), (0, 1), (1, 0))),
        ArrivalSchedule(2, ((0, 0), (0, 1), (1, 0), (1, 1))),
    ])
    assert rep.skipped == 1 and rep.proviso_failures == 1


def test_m3_general_exhaustive_against_oracle():
    space = SearchSpace(3, max_time=5)
    rep = find_violations(space)
    accommodated = violated = 0
    for s in enumerate_family(space):
        ok, bad = oracle_verdict(s)
        accommodated += ok
        violated += bool(bad)
    assert rep.examined == 455
    assert rep.proviso_failures == 455 - accommodated == 47
    assert len(rep.violations) == violated == 0


def test_m7_violation_recomputed_independently():
    ok, bad = oracle_verdict(M7_VIOLATION)
    assert ok and bad
    rep = scan_schedules([M7_VIOLATION])
    (v,) = rep.violations
    assert (v.sum_p, v.sum_q) == (sum(brute_force_counts(M7_VIOLATION)), 14833)
    assert v.sum_p == 14686


def test_m7_violation_is_in_searched_family():
    assert in_family(SearchSpace(7, max_time=8, canonical_labels=True), M7_VIOLATION)


def test_reported_violations_self_certify():
    rep = scan_schedules([counterexample_schedule(), M7_VIOLATION, systematic_schedule(5)])
    assert len(rep.violations) == 2
    again = scan_schedules([v.schedule for v in rep.violations])
    assert again.violations == rep.violations
    # sorted canonically regardless of input order
    assert [v.schedule.m for v in rep.violations] == [7, 10]


def test_thread_count_does_not_change_report():
    space = SearchSpace(4, max_time=5, canonical_labels=True)
    assert find_violations(space).to_json() == find_violations(space, threads=3).to_json()


def test_cost_refusal():
    space = SearchSpace(10, max_time=10)
    with pytest.raises(CostRefusalError) as err:
        find_violations(space)
    assert err.value.estimate == estimate_cost(space) > 10**10
