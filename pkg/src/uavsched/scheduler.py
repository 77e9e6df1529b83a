"""Sequence-to-schedule heuristic.

Given one task sequence, the builder tries to produce a feasible schedule
that keeps idle time consolidated enough to recharge in:

* Phase A groups tasks by start position, walks the positions from the most
  loaded one down, and places each time-windowed task at the *latest*
  feasible start inside its (precedence- and occupation-trimmed) window.
  Late placement leaves the left side of the horizon open for the remaining
  tasks and for recharging.
* Phase B sweeps the leftovers (failed windowed tasks and windowless tasks)
  in sequence order and places each at the *earliest* feasible start,
  filling the gaps Phase A left. The first task that fits nowhere makes the
  whole sequence infeasible (the optimizer will try another permutation).
* Phase C turns the committed timelines into explicit action lists: every
  idle range becomes either a station round trip with a recharge, a ground
  wait (when already at a station), or a hover.

Battery feasibility is enforced during placement by the engine backend; the
emitter here re-derives the same dispositions to materialize actions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .domain import EnergyModel, Task, TaskSet, UAVSpec
from .engine import Engine
from .errors import InvalidSequence, MalformedSchedule, ParseError
from .intervals import OccupationLedger, TaskPlacement
from .mapgraph import INF, MapGraph
from .rules import position_load

ACT_FLY = "FlyTo"
ACT_INSPECT = "PerformInspection"
ACT_MH = "PerformMaterialHandling"
ACT_HOVER = "Hover"
ACT_WAIT = "WaitOnGround"
ACT_RECHARGE = "Recharge"

#: window bound for tasks without a due date
OPEN_END = 1 << 40


@dataclass(frozen=True)
class Action:
    kind: str
    start: int
    end: int
    frm: str
    to: str
    task: int | None = None

    @property
    def duration(self) -> int:
        return self.end - self.start


@dataclass
class Schedule:
    """Per-UAV time-ordered action lists plus the reported consumption."""
    uavs: dict[int, list[Action]]
    energy: int
    makespan: int
    battery_samples: list[tuple[int, int, Fraction]] = field(default_factory=list)

    def to_document(self) -> dict:
        return {
            "uavs": [
                {"id": uid, "actions": [_action_doc(a) for a in acts]}
                for uid, acts in sorted(self.uavs.items())
            ],
            "energy": self.energy,
            "makespan": self.makespan,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), indent=2) + "\n"

    @staticmethod
    def from_document(doc: dict) -> "Schedule":
        try:
            uavs = {
                int(u["id"]): [
                    Action(str(a["kind"]), int(a["start"]), int(a["end"]),
                           str(a["from"]), str(a["to"]),
                           None if a.get("task") is None else int(a["task"]))
                    for a in u["actions"]
                ]
                for u in doc["uavs"]
            }
            return Schedule(uavs, int(doc.get("energy", 0)), int(doc.get("makespan", 0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedSchedule(f"bad schedule document: {exc}") from None


def _action_doc(a: Action) -> dict:
    doc = {"kind": a.kind, "start": a.start, "end": a.end, "from": a.frm, "to": a.to}
    if a.task is not None:
        doc["task"] = a.task
    return doc


def _ceildiv(p: int, q: int) -> int:
    return -((-p) // q)


def plan_idle(rt, gamma: int, alpha: int, min_frag: int, level: int,
              t0: int, p0: str, a_n: int, s_n: str,
              acts: list["Action"] | None) -> tuple[int, int]:
    """Dispose of the idle range between two duties with the shared rule.

    ``level`` is the scaled battery (units of 1/gamma battery-seconds) when
    the previous duty ended at ``p0`` at time ``t0``; the next duty starts at
    ``s_n`` at ``a_n``. Returns (level at a_n, battery consumed). When
    ``acts`` is given, the materialized actions are appended to it.

    A station round trip with a recharge is inserted whenever the gap leaves
    at least the minimum recharge fragment on the pad and the battery can
    reach the station; otherwise the UAV waits on the ground when it is
    already at a station, and hovers when it is not.
    """
    G, A = gamma, alpha
    cap = alpha * gamma
    gap = a_n - t0
    f = rt.time(p0, s_n)
    c1 = int(rt.to_station[rt.index[p0]])
    st = rt.ids[int(rt.station_of[rt.index[p0]])]
    c2 = rt.time(st, s_n)
    usable = gap - c1 - c2 if c2 < INF else -1
    if usable >= min_frag and level - c1 * G >= 1:
        lv_st = level - c1 * G
        if lv_st >= cap:
            r = 0
        elif lv_st + usable * A <= cap:
            r = usable
        else:
            r = max(min_frag, _ceildiv(cap - lv_st, A))
        if acts is not None:
            cur = t0
            if c1 > 0:
                acts.append(Action(ACT_FLY, cur, cur + c1, p0, st))
                cur += c1
            if r > 0:
                acts.append(Action(ACT_RECHARGE, cur, cur + r, st, st))
                cur += r
            if usable - r > 0:
                acts.append(Action(ACT_WAIT, cur, cur + usable - r, st, st))
                cur += usable - r
            if c2 > 0:
                acts.append(Action(ACT_FLY, cur, cur + c2, st, s_n))
        return min(cap, lv_st + r * A) - c2 * G, c1 + c2
    if c1 == 0:
        if acts is not None:
            if gap - f > 0:
                acts.append(Action(ACT_WAIT, t0, a_n - f, p0, p0))
            if f > 0:
                acts.append(Action(ACT_FLY, a_n - f, a_n, p0, s_n))
        return level - f * G, f
    idle = gap - f
    if acts is not None:
        if idle > 0:
            acts.append(Action(ACT_HOVER, t0, t0 + idle, p0, p0))
        if f > 0:
            acts.append(Action(ACT_FLY, a_n - f, a_n, p0, s_n))
    return level - gap * G, gap


class ScheduleBuilder:
    """One schedule construction. Owns its ledger and engine; not reusable."""

    def __init__(self, ts: TaskSet, fleet: list[UAVSpec], graph: MapGraph,
                 energy: EnergyModel):
        if not fleet:
            raise ParseError("fleet is empty")
        ids = [u.id for u in fleet]
        if len(set(ids)) != len(ids):
            raise ParseError("duplicate UAV ids in fleet")
        caps = {u.battery_capacity for u in fleet}
        if len(caps) > 1:
            raise ParseError("heterogeneous battery capacities are not supported")
        stations = set(graph.station_ids)
        for u in fleet:
            u.validate(stations)
        self.ts = ts
        self.fleet = sorted(fleet, key=lambda u: u.id)
        self.graph = graph
        self.energy_model = energy
        self.rt = graph.routes()
        self.alpha = self.fleet[0].battery_capacity
        self.gamma = energy.full_recharge_duration
        self.cap = self.alpha * self.gamma
        self.min_frag = energy.min_recharge_fragment
        self.hold = energy.load_unload_time // 2
        self.uav_ids = [u.id for u in self.fleet]
        init_idx = [self.rt.index[u.initial_position] for u in self.fleet]
        self.engine = Engine(self.rt.matrix, self.rt.to_station, self.rt.station_of,
                             init_idx, self.alpha, self.gamma, self.min_frag)
        self.ledger = OccupationLedger(
            self.rt.time, {u.id: u.initial_position for u in self.fleet},
            stations, self.hold)
        self.placed: dict[int, tuple[int, int, int]] = {}  # tid -> (uav, start, end)
        self._succ = {t.id: ts.successors(t.id) for t in ts}

    # -- phases A and B ---------------------------------------------------------

    def assign_all(self, seq: list[int]) -> bool:
        if sorted(seq) != sorted(self.ts.ids()):
            raise InvalidSequence("sequence is not a permutation of the task set")
        groups: dict[str, list[int]] = {}
        for tid in seq:
            groups.setdefault(self.ts[tid].start, []).append(tid)
        load = position_load(self.ts)
        ranked = sorted(groups, key=lambda p: (-load.get(p, 0), p))
        remaining = list(seq)
        for pos in ranked:
            for tid in groups[pos]:
                t = self.ts[tid]
                if t.has_time_window and self._place_backward(t):
                    remaining.remove(tid)
        for tid in list(remaining):
            if not self._place_forward(self.ts[tid]):
                return False
        return True

    def _window(self, t: Task) -> tuple[int, int]:
        lo = t.release if t.has_time_window else 0
        hi = t.due if t.has_time_window else OPEN_END
        for p in t.predecessors:
            got = self.placed.get(p)
            if got is not None:
                lo = max(lo, got[2])
        for s in self._succ[t.id]:
            got = self.placed.get(s)
            if got is not None:
                hi = min(hi, got[1])
        return lo, hi

    def _occupation_unions(self, t: Task, lo: int, hi: int):
        w = t.processing
        if t.is_inspection:
            frags = self.ledger.free_fragments(t.start, (lo, hi))
            return [(fs, fe - w) for fs, fe in frags if fe - fs >= w], None
        hold = min(self.hold, w)
        sf = self.ledger.free_fragments(t.start, (lo, hi))
        ef = self.ledger.free_fragments(t.end, (lo, hi))
        u1 = [(fs, fe - hold) for fs, fe in sf if fe - fs >= hold]
        u2 = [(fs - w + hold, fe - w) for fs, fe in ef if fe - fs >= hold]
        return u1, u2

    def preferred_uavs(self, t: Task) -> list[int]:
        """Engine indices of the fleet, most preferred first: least loaded,
        then the UAV of the earliest scheduled successor, then the UAV of the
        latest scheduled predecessor at the very front."""
        order = sorted(range(len(self.fleet)),
                       key=lambda k: (self.engine.workload(k), self.uav_ids[k]))
        succ_at = [(got[1], s) for s in sorted(self._succ[t.id])
                   if (got := self.placed.get(s)) is not None]
        pred_at = [(got[2], p) for p in sorted(t.predecessors)
                   if (got := self.placed.get(p)) is not None]
        if succ_at:
            k = self.uav_ids.index(self.placed[min(succ_at)[1]][0])
            order.remove(k)
            order.insert(0, k)
        if pred_at:
            best_end = max(e for e, _ in pred_at)
            pid = min(p for e, p in pred_at if e == best_end)
            k = self.uav_ids.index(self.placed[pid][0])
            order.remove(k)
            order.insert(0, k)
        return order

    def _place_backward(self, t: Task) -> bool:
        """Latest-start placement for a windowed task; False when no UAV of
        the preference list admits any feasible start."""
        if not t.has_time_window:
            return False
        lo, hi = self._window(t)
        if lo + t.processing > hi:
            return False
        u1, u2 = self._occupation_unions(t, lo, hi)
        if not u1 or (u2 is not None and not u2):
            return False
        s, e = self.rt.index[t.start], self.rt.index[t.end]
        for k in self.preferred_uavs(t):
            start = self.engine.solve_latest(k, t.processing, s, e, lo, hi, u1, u2)
            if start >= 0:
                self._commit(t, k, start)
                return True
        return False

    def _place_forward(self, t: Task) -> bool:
        """Earliest-start placement: left of each committed task per UAV in
        preference order, then after the last task of each UAV."""
        lo, hi = self._window(t)
        if lo + t.processing > hi:
            return False
        u1, u2 = self._occupation_unions(t, lo, hi)
        if not u1 or (u2 is not None and not u2):
            return False
        s, e = self.rt.index[t.start], self.rt.index[t.end]
        pref = self.preferred_uavs(t)
        for k in pref:
            for slot in range(self.engine.count(k)):
                start = self.engine.solve_slot_earliest(
                    k, slot, t.processing, s, e, lo, hi, u1, u2)
                if start >= 0:
                    self._commit(t, k, start)
                    return True
        for k in pref:
            start = self.engine.solve_slot_earliest(
                k, self.engine.count(k), t.processing, s, e, lo, hi, u1, u2)
            if start >= 0:
                self._commit(t, k, start)
                return True
        return False

    def _commit(self, t: Task, k: int, start: int) -> None:
        self.engine.insert(k, t.id, start, t.processing,
                           self.rt.index[t.start], self.rt.index[t.end])
        self.ledger.commit(TaskPlacement(t, self.uav_ids[k], start))
        self.placed[t.id] = (self.uav_ids[k], start, start + t.processing)

    # -- phase C -----------------------------------------------------------------

    def finalize(self, emit: bool = True):
        """Dispose every idle range, returning (energy, makespan, actions,
        samples). With ``emit`` False only the tallies are produced (the
        optimizer's fitness path)."""
        G = self.gamma
        eng = self.engine
        energy = 0
        makespan = 0
        per_uav: dict[int, list[Action]] = {}
        samples: list[tuple[int, int, Fraction]] = []
        for k, uid in enumerate(self.uav_ids):
            acts: list[Action] = []
            level = self.cap
            t0, p0 = 0, self.fleet[k].initial_position
            for a, z, tid in eng.entries(k):
                t = self.ts[tid]
                level, used = plan_idle(self.rt, G, self.alpha, self.min_frag,
                                        level, t0, p0, a, t.start,
                                        acts if emit else None)
                energy += used
                if emit:
                    kind = ACT_INSPECT if t.is_inspection else ACT_MH
                    acts.append(Action(kind, a, z, t.start, t.end, t.id))
                level -= t.processing * G
                energy += t.processing
                samples.append((uid, t.id, Fraction(level, G)))
                t0, p0 = z, t.end
                makespan = max(makespan, z)
            per_uav[uid] = acts
        return energy, makespan, per_uav, samples


def schedule_sequence(seq, ts: TaskSet, fleet, graph, energy) -> Schedule | None:
    """Full run: returns the emitted schedule, or None when the sequence
    admits no feasible schedule."""
    b = ScheduleBuilder(ts, fleet, graph, energy)
    if not b.assign_all(list(seq)):
        return None
    total, makespan, per_uav, samples = b.finalize(emit=True)
    return Schedule(per_uav, total, makespan, samples)


def evaluate_sequence(seq, ts: TaskSet, fleet, graph, energy):
    """Fitness path: (energy, battery samples) or None, without building
    action objects."""
    b = ScheduleBuilder(ts, fleet, graph, energy)
    if not b.assign_all(list(seq)):
        return None
    total, _, _, samples = b.finalize(emit=False)
    return total, samples
