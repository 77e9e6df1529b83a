"""Occupation-timestamp ledger arithmetic.

Fragments are half-open ``[start, end)`` integer-second intervals, so
abutting actions never conflict. Position occupation fragments (POF) are
append-only during one schedule construction; UAV occupation fragments (UOF)
are revised as insertions re-route the connecting flights between committed
tasks.

Recharge stations are exempt from POF bookkeeping: they can hold any number
of UAVs at once.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import OverlapViolation, UnknownUAV
from .domain import Task

Fragment = tuple[int, int]


def trim_occupied(window: Fragment, occupied: list[Fragment]) -> list[Fragment]:
    """Maximal sub-fragments of ``window`` disjoint from every occupied
    fragment. ``occupied`` must be sorted and pairwise disjoint."""
    lo, hi = window
    out: list[Fragment] = []
    cur = lo
    for s, e in occupied:
        if e <= cur:
            continue
        if s >= hi:
            break
        if s > cur:
            out.append((cur, min(s, hi)))
        cur = max(cur, e)
        if cur >= hi:
            return out
    if cur < hi:
        out.append((cur, hi))
    return out


def complement(horizon: Fragment, fragments: list[Fragment]) -> list[Fragment]:
    """Gaps of ``horizon`` not covered by the (sorted, disjoint) fragments."""
    return trim_occupied(horizon, fragments)


def insert_disjoint(fragments: list[Fragment], frag: Fragment) -> None:
    """Insert ``frag`` into a sorted disjoint list in place; overlap is an
    error, zero-length fragments are never stored."""
    s, e = frag
    if s >= e:
        return
    lo, hi = 0, len(fragments)
    while lo < hi:
        mid = (lo + hi) // 2
        if fragments[mid][0] < s:
            lo = mid + 1
        else:
            hi = mid
    if lo > 0 and fragments[lo - 1][1] > s:
        raise OverlapViolation(f"fragment {frag} overlaps {fragments[lo - 1]}")
    if lo < len(fragments) and fragments[lo][0] < e:
        raise OverlapViolation(f"fragment {frag} overlaps {fragments[lo]}")
    fragments.insert(lo, frag)


def total_length(fragments: list[Fragment]) -> int:
    return sum(e - s for s, e in fragments)


def occupation_fragments(task: Task, start: int, load_time: int) -> list[tuple[str, Fragment]]:
    """Position occupation implied by executing ``task`` at ``start``.

    An inspection occupies its single position for the whole execution. A
    material-handling task occupies the start position while loading and the
    end position while unloading (``load_time`` each, half the combined
    load/unload duration).
    """
    end = start + task.processing
    if task.is_inspection:
        return [(task.start, (start, end))]
    hold = min(load_time, task.processing)
    return [(task.start, (start, start + hold)), (task.end, (end - hold, end))]


@dataclass(frozen=True)
class TaskPlacement:
    task: Task
    uav: int
    start: int

    @property
    def end(self) -> int:
        return self.start + self.task.processing


class OccupationLedger:
    """POF/UOF bookkeeping for one schedule construction.

    The ledger belongs to exactly one construction; concurrent constructions
    own distinct ledgers. ``flight`` is a callable ``(from_id, to_id) -> int``
    (the route table), used to materialize just-in-time connecting flights in
    the UOF: each committed task is preceded by its approach flight ending
    exactly at the task start, and inserting a task between two committed
    ones replaces the now-obsolete direct flight.
    """

    def __init__(self, flight, initial_position: dict[int, str],
                 station_ids, load_time: int):
        self._flight = flight
        self._init = dict(initial_position)
        self._stations = frozenset(station_ids)
        self._load = load_time
        self.pof: dict[str, list[Fragment]] = {}
        self.placements: dict[int, list[TaskPlacement]] = {k: [] for k in self._init}
        self.uof: dict[int, list[tuple[int, int, str, int | None]]] = {
            k: [] for k in self._init}

    def free_fragments(self, pos: str, window: Fragment) -> list[Fragment]:
        """Sub-fragments of ``window`` free of position occupation. Recharge
        stations are always fully free."""
        if pos in self._stations:
            return [window] if window[0] < window[1] else []
        return trim_occupied(window, self.pof.get(pos, []))

    def unallocated(self, uav: int, horizon: Fragment) -> list[Fragment]:
        """Gaps in the UAV's occupation fragments within ``horizon``."""
        if uav not in self.uof:
            raise UnknownUAV(f"unknown UAV id {uav}")
        busy = [(s, e) for s, e, _, _ in self.uof[uav]]
        return complement(horizon, busy)

    def workload(self, uav: int) -> int:
        """Total occupied seconds (task executions plus connecting flights)."""
        if uav not in self.uof:
            raise UnknownUAV(f"unknown UAV id {uav}")
        return sum(e - s for s, e, _, _ in self.uof[uav])

    def commit(self, placement: TaskPlacement) -> None:
        """Commit a placement: POF gains the task's occupation fragments
        (append-only), the UAV's fragment list gains the execution and has its
        connecting flights re-derived around the insertion point."""
        uav = placement.uav
        if uav not in self.placements:
            raise UnknownUAV(f"unknown UAV id {uav}")
        new_pof = [
            (pos, frag)
            for pos, frag in occupation_fragments(placement.task, placement.start, self._load)
            if pos not in self._stations
        ]
        # validate everything before mutating anything: commit is atomic
        for pos, frag in new_pof:
            probe = list(self.pof.get(pos, []))
            insert_disjoint(probe, frag)
        timeline = sorted(self.placements[uav] + [placement], key=lambda p: p.start)
        rebuilt = self._rebuild_uof(uav, timeline)
        for pos, frag in new_pof:
            insert_disjoint(self.pof.setdefault(pos, []), frag)
        self.placements[uav] = timeline
        self.uof[uav] = rebuilt

    def _rebuild_uof(self, uav: int, timeline: list[TaskPlacement]):
        frags: list[tuple[int, int, str, int | None]] = []
        prev_pos = self._init[uav]
        prev_end = 0
        for p in timeline:
            f = self._flight(prev_pos, p.task.start)
            if p.start - f < prev_end:
                raise OverlapViolation(
                    f"UAV {uav}: task {p.task.id} at {p.start} leaves no room for "
                    f"the {f}s connecting flight after t={prev_end}")
            if f > 0:
                frags.append((p.start - f, p.start, "fly", None))
            frags.append((p.start, p.end, "exec", p.task.id))
            prev_pos = p.task.end
            prev_end = p.end
        return frags
