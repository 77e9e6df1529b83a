"""Exhaustive ground-truth optimizer for desk-scale instances.

Serves as the in-repo exact baseline in place of an external MILP solver:
it enumerates every task-to-UAV assignment, every per-UAV execution order
consistent with precedence, and, for each time-windowed task, both an
earliest- and a latest-start timing choice. Each candidate is materialized
into a full schedule (with the shared idle-disposition rule) and audited by
the independent validator; the minimum-consumption valid schedule wins.

No attempt is made to reproduce the wall-clock times of solver-based
baselines: they are machine- and solver-specific, and this module trades
their generality for a dependency-free exact reference on instances of at
most a handful of tasks. Timing within one fixed assignment and order is
resolved greedily per task (earliest or latest feasible start), which can,
in rare hover-versus-recharge trade-offs, miss an interior-start optimum;
the per-task two-way timing split keeps that residual gap negligible at
this scale.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from .domain import EnergyModel, TaskSet, UAVSpec
from .errors import LimitExceeded
from .intervals import occupation_fragments, trim_occupied
from .mapgraph import INF, MapGraph
from .scheduler import (ACT_INSPECT, ACT_MH, Action, OPEN_END, Schedule, plan_idle)
from .validate import validate_schedule


@dataclass
class OracleResult:
    energy: int | None
    schedule: Schedule | None
    exhausted: bool          # time budget hit: result is not a proven optimum
    candidates: int          # timings materialized
    valid: int               # candidates that passed the validator


def brute_force_optimal(ts: TaskSet, fleet: list[UAVSpec], graph: MapGraph,
                        energy: EnergyModel, max_tasks: int = 6,
                        max_uavs: int = 2,
                        time_budget: float | None = None) -> OracleResult:
    if len(ts) > max_tasks:
        raise LimitExceeded(f"{len(ts)} tasks exceed the oracle cap of {max_tasks}")
    if len(fleet) > max_uavs:
        raise LimitExceeded(f"{len(fleet)} UAVs exceed the oracle cap of {max_uavs}")
    fleet = sorted(fleet, key=lambda u: u.id)
    rt = graph.routes()
    stations = set(graph.station_ids)
    ids = sorted(ts.ids())
    n, v = len(ids), len(fleet)
    windowed = [tid for tid in ids if ts[tid].has_time_window]
    deadline = None if time_budget is None else time.monotonic() + time_budget

    best_energy = None
    best_schedule = None
    candidates = valid = 0
    exhausted = False

    for assignment in itertools.product(range(v), repeat=n):
        if exhausted:
            break
        per_uav = [[tid for tid, k in zip(ids, assignment) if k == ki]
                   for ki in range(v)]
        order_pools = [_orders(ts, sub) for sub in per_uav]
        for orders in itertools.product(*order_pools):
            if exhausted:
                break
            for mask in range(1 << len(windowed)):
                late = {windowed[b] for b in range(len(windowed)) if mask >> b & 1}
                candidates += 1
                sched = _materialize(ts, fleet, rt, stations, energy, orders, late)
                if sched is None:
                    continue
                report = validate_schedule(sched, ts, fleet, graph, energy)
                if not report.ok:
                    continue
                valid += 1
                if best_energy is None or report.energy < best_energy:
                    best_energy = report.energy
                    best_schedule = sched
                if deadline is not None and time.monotonic() > deadline:
                    exhausted = True
                    break

    return OracleResult(best_energy, best_schedule, exhausted, candidates, valid)


def _orders(ts: TaskSet, sub: list[int]):
    """Permutations of one UAV's tasks that do not put a task before its own
    predecessor on the same vehicle."""
    out = []
    for perm in itertools.permutations(sub):
        seen: set[int] = set()
        ok = True
        for tid in perm:
            if ts[tid].predecessors & set(sub) - seen:
                ok = False
                break
            seen.add(tid)
        if ok:
            out.append(perm)
    return out


def _materialize(ts, fleet, rt, stations, energy, orders, late):
    """Greedy timing for fixed per-UAV orders: place tasks in a merged
    precedence-respecting order, each at its earliest (or latest, for tasks
    in ``late``) start that fits the position occupations; then emit actions
    with the shared idle rule. Returns None when the combination deadlocks
    or a task fits nowhere."""
    v = len(fleet)
    ptr = [0] * v
    placed: dict[int, tuple[int, int]] = {}
    uav_end = [(0, fleet[k].initial_position) for k in range(v)]
    pof: dict[str, list] = {}
    timelines: list[list[tuple[int, int]]] = [[] for _ in range(v)]  # (tid, start)
    hold = energy.load_unload_time // 2
    total = sum(len(o) for o in orders)

    while len(placed) < total:
        progressed = False
        for k in range(v):
            if ptr[k] >= len(orders[k]):
                continue
            tid = orders[k][ptr[k]]
            t = ts[tid]
            if any(p not in placed for p in t.predecessors):
                continue
            t_prev, p_prev = uav_end[k]
            f1 = rt.time(p_prev, t.start)
            if f1 >= INF:
                return None
            lb = max(t.release or 0, t_prev + f1,
                     max((placed[p][1] for p in t.predecessors), default=0))
            ub = (t.due - t.processing) if t.has_time_window else OPEN_END
            if lb > ub:
                return None
            start = _fit(t, lb, ub, pof, stations, hold, latest=tid in late)
            if start is None:
                return None
            for pos, frag in occupation_fragments(t, start, hold):
                if pos not in stations:
                    lst = pof.setdefault(pos, [])
                    lst.append(frag)
                    lst.sort()
            placed[tid] = (start, start + t.processing)
            timelines[k].append((tid, start))
            uav_end[k] = (start + t.processing, t.end)
            ptr[k] += 1
            progressed = True
        if not progressed:
            return None  # cross-UAV precedence deadlock for these orders

    per_uav: dict[int, list[Action]] = {}
    gamma, alpha = energy.full_recharge_duration, fleet[0].battery_capacity
    e_total = 0
    makespan = 0
    for k, u in enumerate(fleet):
        acts: list[Action] = []
        level = alpha * gamma
        t0, p0 = 0, u.initial_position
        for tid, start in timelines[k]:
            t = ts[tid]
            level, used = plan_idle(rt, gamma, alpha, energy.min_recharge_fragment,
                                    level, t0, p0, start, t.start, acts)
            e_total += used
            kind = ACT_INSPECT if t.is_inspection else ACT_MH
            acts.append(Action(kind, start, start + t.processing, t.start, t.end, tid))
            level -= t.processing * gamma
            e_total += t.processing
            t0, p0 = start + t.processing, t.end
            makespan = max(makespan, t0)
        per_uav[u.id] = acts
    return Schedule(per_uav, e_total, makespan)


def _fit(t, lb, ub, pof, stations, hold, latest):
    """Earliest (or latest) start in [lb, ub] whose occupation fragments
    avoid the committed position occupations."""
    windows = []
    probe = (lb, ub + t.processing)
    if t.is_inspection:
        if t.start in stations:
            spans = [probe]
        else:
            spans = trim_occupied(probe, pof.get(t.start, []))
        windows.append([(s, e - t.processing) for s, e in spans
                        if e - s >= t.processing])
    else:
        h = min(hold, t.processing)
        s_spans = ([probe] if t.start in stations
                   else trim_occupied(probe, pof.get(t.start, [])))
        e_spans = ([probe] if t.end in stations
                   else trim_occupied(probe, pof.get(t.end, [])))
        windows.append([(s, e - h) for s, e in s_spans if e - s >= h])
        windows.append([(s - t.processing + h, e - t.processing)
                        for s, e in e_spans if e - s >= h])
    for union in windows:
        if not union:
            return None
    for a in _candidates(windows, (lb, ub), latest):
        return a
    return None


def _candidates(windows, lohi, latest):
    lo, hi = lohi
    u1 = windows[0]
    u2 = windows[1] if len(windows) > 1 else None
    span = reversed(u1) if latest else iter(u1)
    for flo, fhi in span:
        cur_lo, cur_hi = max(flo, lo), min(fhi, hi)
        if cur_lo > cur_hi:
            continue
        if u2 is None:
            yield cur_hi if latest else cur_lo
            return
        inner = reversed(u2) if latest else iter(u2)
        for glo, ghi in inner:
            x_lo, x_hi = max(cur_lo, glo), min(cur_hi, ghi)
            if x_lo <= x_hi:
                yield x_hi if latest else x_lo
                return
