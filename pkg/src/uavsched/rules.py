"""Priority rules used to seed the optimizer's initial swarm.

Each rule turns a task set into one deterministic sequence; ties always
break by ascending task id. The two occupation rules order tasks by the
projected occupation load of their execution position (the start position
for material handling): total processing time of the tasks starting there.
"""

from __future__ import annotations

from .domain import TaskSet

RULE_NAMES = [
    "min_cumulative_predecessors",
    "min_total_predecessors",
    "max_cumulative_successors",
    "max_total_successors",
    "max_execution_time",
    "min_execution_time",
    "max_ranked_positional_weight",
    "min_inverse_positional_weight",
    "less_occupied_position",
    "most_occupied_position",
]


def position_load(ts: TaskSet) -> dict[str, int]:
    """Projected occupation load: summed processing time per start position."""
    load: dict[str, int] = {}
    for t in ts:
        load[t.start] = load.get(t.start, 0) + t.processing
    return load


def priority_sequence(rule: str, ts: TaskSet) -> list[int]:
    if rule not in RULE_NAMES:
        raise ValueError(f"unknown priority rule {rule!r}")
    tasks = list(ts)

    if rule == "min_cumulative_predecessors":
        key = lambda t: len(ts.cumulative_predecessors(t.id))
    elif rule == "min_total_predecessors":
        key = lambda t: len(t.predecessors)
    elif rule == "max_cumulative_successors":
        key = lambda t: -len(ts.cumulative_successors(t.id))
    elif rule == "max_total_successors":
        key = lambda t: -len(ts.successors(t.id))
    elif rule == "max_execution_time":
        key = lambda t: -t.processing
    elif rule == "min_execution_time":
        key = lambda t: t.processing
    elif rule == "max_ranked_positional_weight":
        # processing time plus the processing of everything that transitively
        # depends on the task
        def key(t):
            return -(t.processing
                     + sum(ts[s].processing for s in ts.cumulative_successors(t.id)))
    elif rule == "min_inverse_positional_weight":
        def key(t):
            return (t.processing
                    + sum(ts[p].processing for p in ts.cumulative_predecessors(t.id)))
    elif rule == "less_occupied_position":
        load = position_load(ts)
        key = lambda t: load[t.start]
    else:  # most_occupied_position
        load = position_load(ts)
        key = lambda t: -load[t.start]

    return [t.id for t in sorted(tasks, key=lambda t: (key(t), t.id))]


def all_rule_sequences(ts: TaskSet) -> list[list[int]]:
    return [priority_sequence(r, ts) for r in RULE_NAMES]
