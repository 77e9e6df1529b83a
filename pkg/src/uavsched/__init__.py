"""Battery-preserving scheduling for indoor UAV fleets on directed-path maps.

The package couples a placement heuristic (latest-start placement for
time-windowed tasks, earliest-start backfill for the rest, recharge-aware
idle disposition) with a permutation particle swarm optimizer, and ships the
dataset generator, exhaustive baseline, independent schedule validator, and
benchmark harness used to evaluate it.
"""

from importlib import resources

from .domain import EnergyModel, Task, TaskSet, UAVSpec, default_fleet, parse_taskset
from .mapgraph import MapGraph, load_map, scale_map
from .scheduler import Schedule, schedule_sequence

__version__ = "0.1.0"


def bundled_map() -> MapGraph:
    """The lab-scale demo map shipped with the package."""
    with resources.files("uavsched.data").joinpath("lab_map.json").open() as fh:
        return load_map(fh)


def bundled_tasks() -> TaskSet:
    """The 10-task demo dataset shipped with the package."""
    with resources.files("uavsched.data").joinpath("demo_tasks.json").open() as fh:
        return parse_taskset(fh)
