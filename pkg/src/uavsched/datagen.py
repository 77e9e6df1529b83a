"""Seeded benchmark dataset generator.

Reproduces the benchmark design: two geographic scales (lab, industrial at
1:8), task counts of 30/50/100, predecessor counts drawn from
N(mean, min(1, mean)^2) with mean 0/1/2 (rounded, clamped to [0, 4]), and
slack times drawn from N(mean, (mean/5)^2) with mean 300/600/1200 (rounded,
clamped to [100, 1395]).

Windows are chained so a feasible ordering exists by construction: a task's
release is the maximum of its predecessors' due dates plus a small jitter,
and its due date is release + processing + slack. Predecessor-free tasks
are spread over a capacity-scaled horizon so the fleet is not asked to do
everything at once. Every emitted dataset is additionally verified to admit
at least one feasible schedule under the default fleet (one of the ten
priority-rule sequences must schedule it); candidates that fail are
regenerated from a derived seed, within a bounded retry budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import EnergyModel, Task, TaskSet, default_fleet
from .errors import GenerationFailure, ParseError
from .mapgraph import INF, MapGraph, scale_map
from .rules import all_rule_sequences
from .scheduler import ScheduleBuilder

GEO_SCALES = (1, 8)
TASK_COUNTS = (30, 50, 100)
PRED_MEANS = (0, 1, 2)
SLACK_MEANS = (300, 600, 1200)

SLACK_FLOOR = 100
SLACK_CEIL = 1395
MAX_PREDECESSORS = 4
RETRY_BUDGET = 1000

#: assumed vehicles when spreading root releases and when verifying
#: schedulability; the bench default fleet size
VERIFY_FLEET = 3

#: safety margin over the sustainable-throughput horizon estimate
HORIZON_STRETCH = 1.6

#: battery capacity assumed for horizon sizing and the schedulability check
DEFAULT_CAPACITY = 1200


@dataclass(frozen=True)
class DatasetConfig:
    geo_scale: int = 1
    task_count: int = 30
    pred_mean: int = 0
    slack_mean: int = 300
    seed: int = 0
    unchecked: bool = False

    def __post_init__(self):
        if self.unchecked:
            if self.geo_scale <= 0 or self.task_count <= 0 or self.pred_mean < 0 \
                    or self.slack_mean <= 0:
                raise ParseError("dataset parameters must be positive")
            return
        if self.geo_scale not in GEO_SCALES:
            raise ParseError(f"geo scale must be one of {GEO_SCALES} (or use unchecked)")
        if self.task_count not in TASK_COUNTS:
            raise ParseError(f"task count must be one of {TASK_COUNTS} (or use unchecked)")
        if self.pred_mean not in PRED_MEANS:
            raise ParseError(f"pred mean must be one of {PRED_MEANS} (or use unchecked)")
        if self.slack_mean not in SLACK_MEANS:
            raise ParseError(f"slack mean must be one of {SLACK_MEANS} (or use unchecked)")

    def name(self) -> str:
        return f"d_{self.geo_scale}_{self.task_count}_{self.pred_mean}_{self.slack_mean}"


def generate_dataset(cfg: DatasetConfig, base_map: MapGraph,
                     energy: EnergyModel | None = None) -> TaskSet:
    """Deterministic function of (cfg, map): equal configs give byte-identical
    documents. Raises GenerationFailure when no schedulable candidate is
    found within the retry budget."""
    energy = energy or EnergyModel()
    g = scale_map(base_map, cfg.geo_scale)
    pool = sorted(p.id for p in g.positions.values() if not p.recharge)
    if len(pool) < 2:
        raise GenerationFailure("map needs at least two non-recharge positions")
    for attempt in range(RETRY_BUDGET):
        rng = np.random.default_rng(np.random.SeedSequence(
            entropy=cfg.seed,
            spawn_key=(cfg.geo_scale, cfg.task_count, cfg.pred_mean,
                       cfg.slack_mean, attempt)))
        ts = _sample(cfg, g, pool, energy, rng)
        if ts is None:
            continue
        if cfg.unchecked or _schedulable(ts, g, energy):
            return ts
    raise GenerationFailure(
        f"no schedulable dataset for {cfg} within {RETRY_BUDGET} attempts")


def _sample(cfg: DatasetConfig, g: MapGraph, pool: list[str],
            energy: EnergyModel, rng: np.random.Generator) -> TaskSet | None:
    rt = g.routes()
    n = cfg.task_count
    sigma_pred = min(1, cfg.pred_mean)
    sigma_slack = cfg.slack_mean / 5

    kinds = rng.random(n) < 0.5
    starts: list[str] = []
    ends: list[str] = []
    procs: list[int] = []
    for i in range(n):
        s = pool[int(rng.integers(len(pool)))]
        if kinds[i]:
            e, w = s, energy.inspection_time
        else:
            e = None
            for _ in range(50):
                cand = pool[int(rng.integers(len(pool)))]
                if cand != s and rt.time(s, cand) < INF:
                    e = cand
                    break
            if e is None:
                return None
            w = energy.load_unload_time + rt.time(s, e)
        starts.append(s)
        ends.append(e)
        procs.append(w)

    pred_counts = np.clip(np.rint(rng.normal(cfg.pred_mean, sigma_pred, n)),
                          0, MAX_PREDECESSORS).astype(int)
    slacks = np.clip(np.rint(rng.normal(cfg.slack_mean, sigma_slack, n)),
                     SLACK_FLOOR, SLACK_CEIL).astype(int)

    closure: list[set[int]] = [set() for _ in range(n)]
    preds: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        want = min(int(pred_counts[i]), i)
        if want == 0:
            continue
        for j in rng.permutation(i):
            j = int(j)
            if len(preds[i]) >= want:
                break
            redundant = any(j == q or j in closure[q] or q in closure[j]
                            for q in preds[i])
            if not redundant:
                preds[i].add(j)
                closure[i] |= {j} | closure[j]

    # Root releases are spread over the horizon the fleet needs to absorb the
    # duty at its sustainable rate: every airborne second must be balanced by
    # gamma/alpha seconds of charging.
    finite = rt.matrix[rt.matrix < INF]
    mean_flight = int(finite.sum() / max(1, finite.size))
    duty = (sum(procs) + n * mean_flight) / VERIFY_FLEET
    charge_factor = 1 + energy.full_recharge_duration / DEFAULT_CAPACITY
    horizon = math.ceil(HORIZON_STRETCH * duty * charge_factor)

    # Chained releases are jittered past the predecessor's due date by up to
    # two recharge opportunities (minimum fragment plus typical station round
    # trips); sibling successors draw independent jitters, which also spreads
    # the fan-out bursts a shared predecessor would otherwise synchronize.
    station_rt = [int(t) for p, t in zip(sorted(g.positions), rt.to_station)
                  if not g.positions[p].recharge]
    mean_rt = sum(station_rt) // max(1, len(station_rt))
    jitter = 2 * energy.min_recharge_fragment + 6 * mean_rt

    # Predecessor-free tasks get stratified (jittered-grid) releases: plain
    # uniform sampling produces local clusters that overload the whole fleet
    # at once; one release per stratum keeps the density absorbable.
    roots = [i for i in range(n) if not preds[i]]
    strata = rng.permutation(len(roots))
    width = horizon / max(1, len(roots))
    release = [0] * n
    due = [0] * n
    for i in range(n):
        if preds[i]:
            base = max(due[j] for j in preds[i])
            release[i] = base + int(rng.integers(0, jitter + 1))
        else:
            b = int(strata[roots.index(i)])
            release[i] = int((b + rng.random()) * width)
        due[i] = release[i] + procs[i] + int(slacks[i])

    tasks = [
        Task(i + 1, starts[i], ends[i], procs[i], release[i], due[i],
             frozenset(j + 1 for j in preds[i]))
        for i in range(n)
    ]
    return TaskSet(tasks)


def _schedulable(ts: TaskSet, g: MapGraph, energy: EnergyModel) -> bool:
    """At least one of the ten rule sequences yields a feasible schedule
    under the default fleet, so the optimizer is guaranteed a feasible
    incumbent from its initial swarm."""
    fleet = default_fleet(g, VERIFY_FLEET)
    for seq in all_rule_sequences(ts):
        b = ScheduleBuilder(ts, fleet, g, energy)
        if b.assign_all(seq):
            return True
    return False


def suite_configs(seed: int) -> list[DatasetConfig]:
    """The 54 benchmark configurations (2 scales x 3 sizes x 3 predecessor
    levels x 3 slack levels), all derived from one suite seed."""
    return [
        DatasetConfig(sc, n, p, sl, seed)
        for sc in GEO_SCALES
        for n in TASK_COUNTS
        for p in PRED_MEANS
        for sl in SLACK_MEANS
    ]
