import itertools

import pytest

from lgopt.graphs import UndirectedGraph
from lgopt.schedules import (
    LoadingSchedule,
    ScheduleError,
    enumerate_schedules,
    format_schedule,
    parse_schedule,
    prefix_sets,
    validate,
)

K2 = UndirectedGraph(2, frozenset({(1, 2)}))
K3 = UndirectedGraph(3, frozenset({(1, 2), (2, 3), (1, 3)}))
PATH5 = UndirectedGraph(5, frozenset({(1, 2), (2, 3), (3, 4), (4, 5)}))

TRIANGLE_SCHED = LoadingSchedule((1, 2, (1, 2), 3, (2, 3), (1, 3)))
ASSOC_SCHED = LoadingSchedule((1, 2, 4, 3, (2, 1), (2, 3), (3, 4), 5, (5, 4)))


def test_triangle_schedule_ok():
    assert validate(TRIANGLE_SCHED, K3) is None


def test_associativity_schedule_ok():
    assert validate(ASSOC_SCHED, PATH5) is None


def test_edge_before_endpoints_flagged_at_position_1():
    bad = LoadingSchedule(((1, 2), 1, 2))
    v = validate(bad, K2)
    assert v is not None and v.position == 1
    assert "before its endpoints" in v.message


def test_validate_catches_duplicates_and_missing():
    v = validate(LoadingSchedule((1, 1, 2, (1, 2))), K2)
    assert v is not None and v.position == 2
    v = validate(LoadingSchedule((1, 2)), K2)
    assert v is not None and "missing edges" in v.message
    v = validate(LoadingSchedule((1, 2, (1, 2), (1, 2))), K2)
    assert v is not None and v.position == 4


def test_prefix_sets_examples():
    vs, es = prefix_sets(TRIANGLE_SCHED, 4)
    assert vs == {1, 2} and es == {(1, 2)}
    vs, es = prefix_sets(ASSOC_SCHED, 1)
    assert vs == set() and es == set()
    vs, es = prefix_sets(ASSOC_SCHED, 9)
    assert vs == {1, 2, 3, 4, 5} and es == {(1, 2), (2, 3), (3, 4)}


def test_prefix_sets_out_of_range():
    with pytest.raises(ScheduleError):
        prefix_sets(TRIANGLE_SCHED, 0)
    with pytest.raises(ScheduleError):
        prefix_sets(TRIANGLE_SCHED, 7)


def test_prefix_sets_monotone():
    for t in range(1, len(ASSOC_SCHED)):
        vs1, es1 = prefix_sets(ASSOC_SCHED, t)
        vs2, es2 = prefix_sets(ASSOC_SCHED, t + 1)
        assert vs1 <= vs2 and es1 <= es2


def test_enumerate_k2():
    scheds = list(enumerate_schedules(K2))
    assert [s.items for s in scheds] == [(1, 2, (1, 2)), (2, 1, (1, 2))]


def _filter_count(h):
    """Permutation-filter oracle, exhaustive for k+m <= 7."""
    items = [i for i in range(1, h.k + 1)] + sorted(h.edges)
    count = 0
    for perm in itertools.permutations(items):
        if validate(LoadingSchedule(perm), h) is None:
            count += 1
    return count


def _downset_count(h):
    """Linear-extension count by DP over downsets (independent of the enumerator)."""
    from functools import lru_cache

    edges = sorted(h.edges)
    k, m = h.k, len(edges)

    @lru_cache(maxsize=None)
    def rec(vmask, emask):
        if vmask == (1 << k) - 1 and emask == (1 << m) - 1:
            return 1
        total = 0
        for i in range(k):
            if not vmask >> i & 1:
                total += rec(vmask | 1 << i, emask)
        for b, (u, v) in enumerate(edges):
            if not emask >> b & 1 and vmask >> (u - 1) & 1 and vmask >> (v - 1) & 1:
                total += rec(vmask, emask | 1 << b)
        return total

    return rec(0, 0)


def test_enumerate_k3_matches_permutation_filter():
    scheds = list(enumerate_schedules(K3))
    assert len(scheds) == _filter_count(K3)
    assert len(scheds) == len(set(s.items for s in scheds))
    for s in scheds:
        assert validate(s, K3) is None


def test_enumerate_path5_matches_downset_oracle():
    scheds = list(enumerate_schedules(PATH5))
    assert len(scheds) == _downset_count(PATH5)
    assert len(scheds) == len(set(s.items for s in scheds))


@pytest.mark.parametrize(
    "h",
    [
        K2,
        K3,
        UndirectedGraph(3, frozenset({(1, 2), (2, 3)})),
        UndirectedGraph(4, frozenset({(1, 2), (3, 4)})),
        UndirectedGraph(3, frozenset()),
    ],
)
def test_enumerate_counts_and_validity_small(h):
    scheds = list(enumerate_schedules(h))
    assert len(scheds) == _filter_count(h)
    for s in scheds:
        assert validate(s, h) is None


def test_enumerate_deterministic_lexicographic():
    scheds = list(enumerate_schedules(K3))
    assert scheds == sorted(scheds, key=lambda s: [(0, i, 0) if isinstance(i, int) else (1,) + i for i in s.items])
    assert scheds == list(enumerate_schedules(K3))


def test_enumerate_cap():
    big = UndirectedGraph(
        6, frozenset({(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 6), (1, 3)})
    )
    with pytest.raises(ScheduleError):
        next(enumerate_schedules(big, cap=12))


def test_schedule_text_roundtrip():
    text = format_schedule(TRIANGLE_SCHED)
    assert text == "1,2,e(1,2),3,e(2,3),e(1,3)"
    assert parse_schedule(text) == TRIANGLE_SCHED
    assert parse_schedule("1,2,e(2,1)") == LoadingSchedule((1, 2, (1, 2)))
    with pytest.raises(ScheduleError):
        parse_schedule("1,,2")
    with pytest.raises(ScheduleError):
        parse_schedule("e(1)")
