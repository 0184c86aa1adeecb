"""Loading schedules: validation, prefix bookkeeping, exhaustive enumeration.

A schedule for an undirected graph is a sequence of its k vertices and m edges
with each item appearing exactly once and every edge after both endpoints.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .graphs import UndirectedGraph

# A schedule item is a vertex (int) or an edge ((i, j) with i < j).
ENUMERATION_CAP = 12


class ScheduleError(ValueError):
    pass


def normalize_item(item):
    if isinstance(item, int):
        return item
    i, j = item
    return (min(i, j), max(i, j))


def item_key(item):
    # vertices sort before edges; used for the deterministic enumeration order
    if isinstance(item, int):
        return (0, item, 0)
    return (1, item[0], item[1])


@dataclass(frozen=True)
class LoadingSchedule:
    items: tuple

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(normalize_item(it) for it in self.items))

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def position_of(self, item) -> int:
        """1-based position of an item."""
        return self.items.index(normalize_item(item)) + 1

    def __str__(self):
        return format_schedule(self)


@dataclass(frozen=True)
class ScheduleViolation:
    position: int  # 1-based; 0 when the defect is global (missing items)
    message: str


def validate(s: LoadingSchedule, h: UndirectedGraph):
    """None when s is a loading schedule for h, else the first violation."""
    vertices = set(range(1, h.k + 1))
    seen_v, seen_e = set(), set()
    for pos, item in enumerate(s.items, start=1):
        if isinstance(item, int):
            if item not in vertices:
                return ScheduleViolation(pos, f"unknown vertex {item}")
            if item in seen_v:
                return ScheduleViolation(pos, f"vertex {item} loaded twice")
            seen_v.add(item)
        else:
            if item not in h.edges:
                return ScheduleViolation(pos, f"unknown edge {item}")
            if item in seen_e:
                return ScheduleViolation(pos, f"edge {item} loaded twice")
            i, j = item
            if i not in seen_v or j not in seen_v:
                return ScheduleViolation(pos, f"edge {item} before its endpoints")
            seen_e.add(item)
    if seen_v != vertices:
        missing = sorted(vertices - seen_v)
        return ScheduleViolation(0, f"missing vertices {missing}")
    if seen_e != h.edges:
        missing = sorted(h.edges - seen_e)
        return ScheduleViolation(0, f"missing edges {missing}")
    return None


def prefix_sets(s: LoadingSchedule, t: int):
    """(VS_t, ES_t): vertices and edges strictly before 1-based position t."""
    if not 1 <= t <= len(s.items):
        raise ScheduleError(f"position {t} out of range 1..{len(s.items)}")
    vs, es = set(), set()
    for item in s.items[: t - 1]:
        (vs if isinstance(item, int) else es).add(item)
    return vs, es


def enumerate_schedules(h: UndirectedGraph, cap: int = ENUMERATION_CAP):
    """Yield every loading schedule of h exactly once, lexicographically.

    Backtracking over the precedence order; items compare with vertices first,
    then edges, each by label.
    """
    total = h.k + h.m
    if total > cap:
        raise ScheduleError(f"k + m = {total} exceeds enumeration cap {cap}")
    items = sorted(
        [i for i in range(1, h.k + 1)] + list(h.edges), key=item_key
    )
    chosen = []
    loaded_v, loaded_e = set(), set()

    def available(it):
        if isinstance(it, int):
            return it not in loaded_v
        return it not in loaded_e and it[0] in loaded_v and it[1] in loaded_v

    def rec():
        if len(chosen) == total:
            yield LoadingSchedule(tuple(chosen))
            return
        for it in items:
            if available(it):
                chosen.append(it)
                if isinstance(it, int):
                    loaded_v.add(it)
                else:
                    loaded_e.add(it)
                yield from rec()
                chosen.pop()
                if isinstance(it, int):
                    loaded_v.discard(it)
                else:
                    loaded_e.discard(it)

    yield from rec()


def format_schedule(s: LoadingSchedule) -> str:
    """Text form: vertices as integers, edges as e(i,j), comma-separated."""
    parts = []
    for item in s.items:
        if isinstance(item, int):
            parts.append(str(item))
        else:
            parts.append(f"e({item[0]},{item[1]})")
    return ",".join(parts)


_ITEM_RE = re.compile(r"\s*(?:e\(\s*(\d+)\s*,\s*(\d+)\s*\)|(\d+))\s*")


def parse_schedule(text: str) -> LoadingSchedule:
    items = []
    pos = 0
    expecting_item = True
    while pos < len(text):
        if not expecting_item:
            if text[pos] == ",":
                pos += 1
                expecting_item = True
                continue
            raise ScheduleError(f"expected ',' at offset {pos} in {text!r}")
        m = _ITEM_RE.match(text, pos)
        if not m:
            raise ScheduleError(f"bad schedule item at offset {pos} in {text!r}")
        if m.group(3) is not None:
            items.append(int(m.group(3)))
        else:
            items.append((int(m.group(1)), int(m.group(2))))
        pos = m.end()
        expecting_item = False
    if expecting_item:
        raise ScheduleError(f"empty schedule item in {text!r}")
    return LoadingSchedule(tuple(items))
