"""Task, fleet, and energy-model data types plus dataset parsing.

Tasks come in two kinds, inferred from their positions: an inspection task
executes at a single position (start == end) while a material-handling task
moves a payload between two distinct positions. Time windows are optional;
a task without release/due dates is accepted with ``has_time_window`` False
and skips every window check downstream.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from graphlib import CycleError, TopologicalSorter

from .errors import (CyclicPrecedence, DanglingPredecessor, InvalidWindow, NoTimeWindow,
                     ParseError, RedundantPrecedence, UnknownTask)


@dataclass(frozen=True)
class Task:
    id: int
    start: str
    end: str
    processing: int
    release: int | None = None
    due: int | None = None
    predecessors: frozenset[int] = field(default_factory=frozenset)

    @property
    def has_time_window(self) -> bool:
        return self.release is not None

    @property
    def is_inspection(self) -> bool:
        return self.start == self.end

    def validate(self) -> None:
        if self.id <= 0:
            raise ParseError(f"task id must be positive, got {self.id}")
        if self.processing <= 0:
            raise ParseError(f"task {self.id}: processing time must be positive")
        if (self.release is None) != (self.due is None):
            raise ParseError(f"task {self.id}: release and due must come together")
        if self.release is not None:
            if self.release < 0:
                raise ParseError(f"task {self.id}: negative release date")
            if self.release + self.processing > self.due:
                raise InvalidWindow(
                    f"task {self.id}: window [{self.release}, {self.due}] shorter "
                    f"than processing time {self.processing}")
        if self.id in self.predecessors:
            raise ParseError(f"task {self.id} precedes itself")


def slack_of(task: Task) -> int:
    """Window length minus processing time: the placement freedom of a task."""
    if not task.has_time_window:
        raise NoTimeWindow(f"task {task.id} has no time window")
    return (task.due - task.release) - task.processing


class TaskSet:
    """Ordered task collection keyed by id, with an acyclic and transitively
    non-redundant precedence digraph (both properties are parse errors when
    violated, not silent fixes)."""

    def __init__(self, tasks):
        self.tasks: dict[int, Task] = {}
        for t in tasks:
            t.validate()
            if t.id in self.tasks:
                raise ParseError(f"duplicate task id {t.id}")
            self.tasks[t.id] = t
        for t in self.tasks.values():
            for p in t.predecessors:
                if p not in self.tasks:
                    raise DanglingPredecessor(f"task {t.id} references unknown predecessor {p}")
        self._order = self._toposort()
        self._closure: dict[int, frozenset[int]] = {}
        for tid in self._order:
            acc: set[int] = set()
            for p in self.tasks[tid].predecessors:
                acc.add(p)
                acc |= self._closure[p]
            self._closure[tid] = frozenset(acc)
        self._check_redundancy()

    def _toposort(self) -> list[int]:
        ts = TopologicalSorter({t.id: t.predecessors for t in self.tasks.values()})
        try:
            return list(ts.static_order())
        except CycleError as exc:
            raise CyclicPrecedence(f"cyclic precedence: {exc.args[1]}") from None

    def _check_redundancy(self) -> None:
        for t in self.tasks.values():
            for p in t.predecessors:
                others = t.predecessors - {p}
                if any(p in self._closure[q] or p == q for q in others):
                    raise RedundantPrecedence(
                        f"edge {p} -> {t.id} is implied by another predecessor")

    def __len__(self) -> int:
        return len(self.tasks)

    def __iter__(self):
        return iter(self.tasks.values())

    def __contains__(self, tid: int) -> bool:
        return tid in self.tasks

    def __getitem__(self, tid: int) -> Task:
        try:
            return self.tasks[tid]
        except KeyError:
            raise UnknownTask(f"unknown task id {tid}") from None

    def ids(self) -> list[int]:
        return list(self.tasks)

    def topological_order(self) -> list[int]:
        return list(self._order)

    def cumulative_predecessors(self, tid: int) -> frozenset[int]:
        """Transitive closure of the predecessor relation for one task."""
        if tid not in self.tasks:
            raise UnknownTask(f"unknown task id {tid}")
        return self._closure[tid]

    def successors(self, tid: int) -> frozenset[int]:
        if tid not in self.tasks:
            raise UnknownTask(f"unknown task id {tid}")
        return frozenset(t.id for t in self.tasks.values() if tid in t.predecessors)

    def cumulative_successors(self, tid: int) -> frozenset[int]:
        if tid not in self.tasks:
            raise UnknownTask(f"unknown task id {tid}")
        return frozenset(t for t, preds in self._closure.items() if tid in preds)

    def to_document(self) -> dict:
        return {
            "tasks": [
                {
                    "id": t.id, "start": t.start, "end": t.end,
                    "processing": t.processing,
                    **({"release": t.release, "due": t.due} if t.has_time_window else {}),
                    "predecessors": sorted(t.predecessors),
                }
                for t in sorted(self.tasks.values(), key=lambda t: t.id)
            ]
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), indent=2, sort_keys=True) + "\n"


def cumulative_predecessors(ts: TaskSet, tid: int) -> frozenset[int]:
    return ts.cumulative_predecessors(tid)


def parse_taskset(source) -> TaskSet:
    """Parse a task document: JSON (``{"tasks": [...]}``) or the CSV layout
    ``id,start,end,processing,release,due,predecessors`` with ``;``-separated
    predecessor ids and ``-`` for none."""
    if isinstance(source, TaskSet):
        return source
    if isinstance(source, dict):
        return _from_json_doc(source)
    text = source.read() if hasattr(source, "read") else None
    if text is None:
        s = str(source)
        if s.lstrip().startswith("{"):
            text = s
        elif "\n" in s or "," in s:
            text = s
        else:
            with open(s, "r", encoding="utf-8") as fh:
                text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        return _from_json_doc(doc)
    return _from_csv(text)


def _from_json_doc(doc: dict) -> TaskSet:
    if "tasks" not in doc or not isinstance(doc["tasks"], list):
        raise ParseError("task document must contain a 'tasks' list")
    tasks = []
    for row in doc["tasks"]:
        try:
            preds = frozenset(int(p) for p in row.get("predecessors", []))
            tasks.append(Task(
                id=int(row["id"]), start=str(row["start"]), end=str(row["end"]),
                processing=int(row["processing"]),
                release=None if row.get("release") is None else int(row["release"]),
                due=None if row.get("due") is None else int(row["due"]),
                predecessors=preds,
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad task entry {row!r}: {exc}") from None
    return TaskSet(tasks)


def _from_csv(text: str) -> TaskSet:
    tasks = []
    reader = csv.reader(io.StringIO(text))
    for row in reader:
        if not row or not row[0].strip():
            continue
        first = row[0].strip().lower()
        if first in ("id", "task", "task id"):
            continue
        if len(row) < 7:
            raise ParseError(f"CSV row needs 7 columns, got {len(row)}: {row!r}")
        try:
            rid = int(row[0])
            start, end = row[1].strip(), row[2].strip()
            proc = int(row[3])
            rel_s, due_s = row[4].strip(), row[5].strip()
            release = None if rel_s in ("", "-") else int(rel_s)
            due = None if due_s in ("", "-") else int(due_s)
            pred_s = row[6].strip()
            preds = frozenset() if pred_s in ("", "-") else frozenset(
                int(p) for p in pred_s.split(";") if p.strip())
        except ValueError as exc:
            raise ParseError(f"bad CSV row {row!r}: {exc}") from None
        tasks.append(Task(rid, start, end, proc, release, due, preds))
    return TaskSet(tasks)


@dataclass(frozen=True)
class UAVSpec:
    """One vehicle: starts fully charged and grounded at a recharge station.

    ``battery_capacity`` is expressed in battery-seconds: one second of
    flight, hover, or task execution consumes one unit.
    """
    id: int
    initial_position: str
    battery_capacity: int = 1200

    def validate(self, station_ids) -> None:
        if self.id <= 0:
            raise ParseError(f"UAV id must be positive, got {self.id}")
        if self.battery_capacity <= 0:
            raise ParseError(f"UAV {self.id}: battery capacity must be positive")
        if self.initial_position not in station_ids:
            raise ParseError(
                f"UAV {self.id}: initial position {self.initial_position!r} "
                "is not a recharge station")


@dataclass(frozen=True)
class EnergyModel:
    """Charging and task-duration laws.

    A depleted battery of ``battery_capacity`` 1200 takes
    ``full_recharge_duration`` 2700 s to fill, so charging runs at
    capacity/duration battery-seconds per second and is capped at capacity.
    Recharge actions shorter than ``min_recharge_fragment`` are not worth the
    station round trip and are never scheduled.
    """
    full_recharge_duration: int = 2700
    min_recharge_fragment: int = 270
    load_unload_time: int = 30
    inspection_time: int = 10

    def __post_init__(self):
        if self.full_recharge_duration <= 0 or self.min_recharge_fragment <= 0:
            raise ParseError("recharge durations must be positive")
        if self.min_recharge_fragment > self.full_recharge_duration:
            raise ParseError("min recharge fragment exceeds a full recharge cycle")
        if self.load_unload_time < 0 or self.inspection_time <= 0:
            raise ParseError("bad action duration parameters")

    def charge_rate(self, battery_capacity: int) -> Fraction:
        return Fraction(battery_capacity, self.full_recharge_duration)


def default_fleet(g, size: int = 3, battery_capacity: int = 1200) -> list[UAVSpec]:
    """A fleet of ``size`` UAVs cycled over the map's recharge stations."""
    stations = g.station_ids
    fleet = [UAVSpec(k + 1, stations[k % len(stations)], battery_capacity)
             for k in range(size)]
    for u in fleet:
        u.validate(set(stations))
    return fleet
