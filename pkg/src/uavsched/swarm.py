"""Permutation particle swarm around the sequence-to-schedule heuristic.

Particles are task-id permutations; velocities are lists of index swaps.
Each generation a particle keeps a truncated prefix of its old velocity,
then appends the transpositions that would move it toward its local best
(each kept with probability min(1, c1*r1)) and toward the global best
(probability min(1, c2*r2)), with r1, r2 drawn once per particle per
generation. Applying the swap list to the sequence always yields another
permutation, so no repair step is needed.

Fitness is the total battery consumption of the heuristic's schedule;
sequences that admit no feasible schedule carry an infinite sentinel and
never displace a feasible best.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .domain import EnergyModel, TaskSet, UAVSpec
from .errors import ConfigError, NoFeasibleFound
from .mapgraph import MapGraph
from .rules import all_rule_sequences
from .scheduler import Schedule, ScheduleBuilder, schedule_sequence

INFEASIBLE = math.inf


@dataclass
class SwarmConfig:
    particles: int = 40
    generations: int = 40
    no_improvement_stop: int = 10
    c1: float = 1.0
    c2: float = 2.0
    inertia: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.particles <= 0 or self.generations <= 0 or self.no_improvement_stop <= 0:
            raise ConfigError("swarm counts must be positive")
        if min(self.c1, self.c2, self.inertia) < 0:
            raise ConfigError("swarm coefficients must be non-negative")


@dataclass
class Particle:
    sequence: list[int]
    velocity: list[tuple[int, int]] = field(default_factory=list)
    best_sequence: list[int] = field(default_factory=list)
    best_energy: float = INFEASIBLE


@dataclass
class GenerationStats:
    generation: int
    best_energy: float
    mean_energy: float | None
    feasible_count: int
    elapsed_ms: int

    def csv_row(self) -> str:
        best = "" if self.best_energy == INFEASIBLE else str(int(self.best_energy))
        mean = "" if self.mean_energy is None else f"{self.mean_energy:.2f}"
        return f"{self.generation},{best},{mean},{self.feasible_count},{self.elapsed_ms}"


LOG_HEADER = "generation,best_energy,mean_energy,feasible_count,elapsed_ms"


@dataclass
class OptimizeResult:
    sequence: list[int]
    energy: int
    schedule: Schedule
    log: list[GenerationStats]
    generations_run: int

    def log_csv(self) -> str:
        return "\n".join([LOG_HEADER] + [g.csv_row() for g in self.log]) + "\n"


def swaps_toward(current: list[int], target: list[int]) -> list[tuple[int, int]]:
    """Transposition decomposition: applying the returned swaps to ``current``
    in order reproduces ``target``."""
    cur = list(current)
    pos = {v: i for i, v in enumerate(cur)}
    out = []
    for i, want in enumerate(target):
        if cur[i] != want:
            j = pos[want]
            out.append((i, j))
            pos[cur[i]], pos[want] = j, i
            cur[i], cur[j] = cur[j], cur[i]
    return out


def apply_swaps(sequence: list[int], swaps) -> list[int]:
    seq = list(sequence)
    for i, j in swaps:
        seq[i], seq[j] = seq[j], seq[i]
    return seq


def initial_swarm(ts: TaskSet, cfg: SwarmConfig) -> list[list[int]]:
    """Ten rule-based sequences first, then seeded random permutations,
    distinct from each other where the task set allows it."""
    if cfg.particles < 10:
        raise ConfigError("particle count must be at least the 10 rule sequences")
    seqs = all_rule_sequences(ts)
    seen = {tuple(s) for s in seqs}
    ids = ts.ids()
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.seed)))
    while len(seqs) < cfg.particles:
        perm = None
        for _ in range(20):
            cand = [ids[i] for i in rng.permutation(len(ids))]
            if tuple(cand) not in seen:
                perm = cand
                break
        if perm is None:  # tiny task sets cannot fill 40 distinct particles
            perm = [ids[i] for i in rng.permutation(len(ids))]
        seen.add(tuple(perm))
        seqs.append(perm)
    return seqs


def _particle_rng(seed: int, generation: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(entropy=seed, spawn_key=(generation, index))))


def optimize(ts: TaskSet, fleet: list[UAVSpec], graph: MapGraph,
             energy: EnergyModel, cfg: SwarmConfig,
             on_samples=None) -> OptimizeResult:
    """Run the swarm until the generation cap or the no-improvement stop.

    ``on_samples`` is called with the post-task battery samples of every
    feasible schedule evaluated during the search (histogram collection).
    Raises NoFeasibleFound if no particle ever produced a schedule.
    """
    ids = ts.ids()

    def fitness(seq: list[int]) -> float:
        builder = ScheduleBuilder(ts, fleet, graph, energy)
        if not builder.assign_all(seq):
            return INFEASIBLE
        total, _, _, samples = builder.finalize(emit=False)
        if on_samples is not None:
            on_samples(samples)
        return float(total)

    particles = [Particle(seq) for seq in initial_swarm(ts, cfg)]
    best_seq: list[int] | None = None
    best_energy = INFEASIBLE
    log: list[GenerationStats] = []
    no_improve = 0
    generation = 0

    def evaluate(gen: int) -> None:
        nonlocal best_seq, best_energy, no_improve
        t0 = time.perf_counter()
        improved = False
        feas = []
        for p in particles:
            fit = fitness(p.sequence)
            if fit < p.best_energy:
                p.best_energy = fit
                p.best_sequence = list(p.sequence)
            if fit < INFEASIBLE:
                feas.append(fit)
            if fit < best_energy:
                best_energy = fit
                best_seq = list(p.sequence)
                improved = True
        no_improve = 0 if improved else no_improve + 1
        log.append(GenerationStats(
            gen, best_energy,
            (sum(feas) / len(feas)) if feas else None,
            len(feas), int((time.perf_counter() - t0) * 1000)))

    evaluate(0)
    while generation < cfg.generations and no_improve < cfg.no_improvement_stop:
        generation += 1
        target = best_seq if best_seq is not None else particles[0].best_sequence
        for idx, p in enumerate(particles):
            rng = _particle_rng(cfg.seed, generation, idx)
            r1 = float(rng.random())
            r2 = float(rng.random())
            p1 = min(1.0, cfg.c1 * r1)
            p2 = min(1.0, cfg.c2 * r2)
            vel = p.velocity[:int(len(p.velocity) * cfg.inertia)]
            local_target = p.best_sequence if p.best_sequence else p.sequence
            vel += [sw for sw in swaps_toward(p.sequence, local_target)
                    if rng.random() < p1]
            vel += [sw for sw in swaps_toward(p.sequence, target)
                    if rng.random() < p2]
            p.velocity = vel
            p.sequence = apply_swaps(p.sequence, vel)
            if sorted(p.sequence) != sorted(ids):
                raise AssertionError("velocity application broke the permutation")
        evaluate(generation)

    if best_seq is None:
        raise NoFeasibleFound(
            "no particle produced a feasible schedule; the task windows appear "
            "too tight for the available UAVs and positions")
    schedule = schedule_sequence(best_seq, ts, fleet, graph, energy)
    assert schedule is not None and schedule.energy == int(best_energy)
    return OptimizeResult(best_seq, int(best_energy), schedule, log, generation)
