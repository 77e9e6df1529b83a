"""Directed-path 3D environment model with shortest-travel-time routing.

Positions are labelled letter+number (e.g. ``"c3"``); a subset of them are
recharge stations. Edges are directed and carry integer travel times in
seconds, either given explicitly in the map document or derived from the
Euclidean segment length at the configured cruise speed. Unreachable pairs
are reported with the :data:`INF` sentinel rather than an error so that
feasibility filtering can treat them uniformly.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import ParseError, TopologyError, UnknownPosition

#: Travel-time sentinel for unreachable pairs. Large enough that a handful of
#: additions never overflow int64, small enough to survive them.
INF = 1 << 40


@dataclass(frozen=True)
class Position:
    id: str
    x: float
    y: float
    z: float
    recharge: bool = False

    @property
    def coords(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


class RouteTable:
    """Dense all-pairs shortest directed travel times, plus nearest-station
    lookups precomputed for the scheduler's battery-reserve checks."""

    def __init__(self, ids: list[str], matrix: np.ndarray, station_ids: list[str]):
        self.ids = ids
        self.index = {p: i for i, p in enumerate(ids)}
        self.matrix = matrix  # int64, INF sentinel off-diagonal where unreachable
        self.station_ids = station_ids
        self._station_idx = [self.index[s] for s in station_ids]
        # nearest_station[i]: (travel time, station index); ties by ascending id.
        n = len(ids)
        self.to_station = np.full(n, INF, dtype=np.int64)
        self.station_of = np.full(n, -1, dtype=np.int64)
        for s in sorted(self._station_idx, key=lambda j: ids[j], reverse=True):
            reach = matrix[:, s]
            better = reach <= self.to_station
            self.to_station[better] = reach[better]
            self.station_of[better] = s
        self.station_of[self.to_station >= INF] = -1

    def time(self, frm: str, to: str) -> int:
        try:
            return int(self.matrix[self.index[frm], self.index[to]])
        except KeyError as exc:
            raise UnknownPosition(str(exc)) from None

    def nearest_station(self, frm: str) -> tuple[str, int]:
        try:
            i = self.index[frm]
        except KeyError:
            raise UnknownPosition(frm) from None
        s = int(self.station_of[i])
        if s < 0:
            raise TopologyError(f"no recharge station reachable from {frm!r}")
        return self.ids[s], int(self.to_station[i])


class MapGraph:
    """Immutable directed environment map.

    ``edges`` maps ``(from_id, to_id)`` to integer seconds >= 1. The
    constructor checks id uniqueness, bounds, and that every non-recharge
    position both reaches and is reached from at least one recharge station.
    """

    def __init__(self, positions: Iterable[Position], edges: Mapping[tuple[str, str], int],
                 speed: float = 1.0, scale_factor: Fraction = Fraction(1),
                 bounds: tuple[float, float, float] | None = None):
        pos_list = list(positions)
        ids = [p.id for p in pos_list]
        if len(set(ids)) != len(ids):
            raise ParseError("duplicate position ids in map")
        self.positions: dict[str, Position] = {p.id: p for p in pos_list}
        self.speed = float(speed)
        self.scale_factor = Fraction(scale_factor)
        self.bounds = bounds
        if bounds is not None:
            bx, by, bz = bounds
            for p in pos_list:
                if not (0 <= p.x <= bx and 0 <= p.y <= by and 0 <= p.z <= bz):
                    raise ParseError(f"position {p.id!r} outside declared bounds")
        self.edges: dict[tuple[str, str], int] = {}
        for (u, v), t in edges.items():
            if u not in self.positions or v not in self.positions:
                raise ParseError(f"edge ({u!r}, {v!r}) references unknown position")
            if u == v:
                raise ParseError(f"self-loop edge at {u!r}")
            t = int(t)
            if t < 1:
                raise ParseError(f"edge ({u!r}, {v!r}) travel time must be >= 1")
            self.edges[(u, v)] = t
        self.station_ids = sorted(p.id for p in pos_list if p.recharge)
        self._routes: RouteTable | None = None
        self._check_station_connectivity()

    # -- construction helpers -------------------------------------------------

    def _check_station_connectivity(self) -> None:
        if not self.positions:
            raise ParseError("map has no positions")
        if not self.station_ids:
            raise TopologyError("map declares no recharge station")
        rt = self.routes()
        for p in self.positions.values():
            if p.recharge:
                continue
            i = rt.index[p.id]
            if rt.station_of[i] < 0:
                raise TopologyError(f"{p.id!r} cannot reach any recharge station")
            if all(rt.matrix[rt.index[s], i] >= INF for s in self.station_ids):
                raise TopologyError(f"{p.id!r} is not reachable from any recharge station")

    def routes(self) -> RouteTable:
        if self._routes is None:
            ids = sorted(self.positions)
            index = {p: i for i, p in enumerate(ids)}
            n = len(ids)
            adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
            for (u, v), t in self.edges.items():
                adj[index[u]].append((index[v], t))
            matrix = np.full((n, n), INF, dtype=np.int64)
            for src in range(n):
                matrix[src] = _dijkstra(adj, src, n)
            self._routes = RouteTable(ids, matrix, self.station_ids)
        return self._routes

    # -- document round-trip ---------------------------------------------------

    def to_document(self) -> dict:
        doc: dict = {
            "positions": [
                {"id": p.id, "x": p.x, "y": p.y, "z": p.z, "recharge": p.recharge}
                for p in sorted(self.positions.values(), key=lambda p: p.id)
            ],
            "edges": [
                {"from": u, "to": v, "time": t}
                for (u, v), t in sorted(self.edges.items())
            ],
            "speed": self.speed,
        }
        if self.bounds is not None:
            doc["bounds"] = list(self.bounds)
        return doc


def _dijkstra(adj: list[list[tuple[int, int]]], src: int, n: int) -> np.ndarray:
    dist = np.full(n, INF, dtype=np.int64)
    dist[src] = 0
    heap = [(0, src)]
    done = [False] * n
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def segment_time(a: Position, b: Position, speed: float) -> int:
    """Travel time of a direct segment: ceil(length / speed), at least 1 s."""
    length = math.dist(a.coords, b.coords)
    return max(1, math.ceil(length / speed))


def load_map(source) -> MapGraph:
    """Load a map document (JSON text, path, or already-parsed dict).

    Document shape: ``positions`` (list of {id, x, y, z, recharge}),
    ``edges`` (list of {from, to, time?}), optional ``speed`` (m/s, default 1)
    and optional ``bounds`` ([x, y, z] extents). Edge ``time`` defaults to the
    segment length divided by the cruise speed, rounded up.
    """
    doc = _read_document(source)
    if not isinstance(doc, dict) or "positions" not in doc or "edges" not in doc:
        raise ParseError("map document must contain 'positions' and 'edges'")
    speed = float(doc.get("speed", 1.0))
    if speed <= 0:
        raise ParseError("speed must be positive")
    try:
        positions = [
            Position(str(p["id"]), float(p["x"]), float(p["y"]), float(p["z"]),
                     bool(p.get("recharge", False)))
            for p in doc["positions"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad position entry: {exc}") from None
    by_id = {p.id: p for p in positions}
    if len(by_id) != len(positions):
        raise ParseError("duplicate position ids in map")
    edges: dict[tuple[str, str], int] = {}
    for e in doc["edges"]:
        try:
            u, v = str(e["from"]), str(e["to"])
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad edge entry: {exc}") from None
        if u not in by_id or v not in by_id:
            raise ParseError(f"edge ({u!r}, {v!r}) references unknown position")
        if "time" in e and e["time"] is not None:
            t = int(e["time"])
        else:
            t = segment_time(by_id[u], by_id[v], speed)
        edges[(u, v)] = t
    bounds = tuple(float(b) for b in doc["bounds"]) if "bounds" in doc else None
    return MapGraph(positions, edges, speed=speed, bounds=bounds)


def _read_document(source):
    if isinstance(source, dict):
        return source
    text = None
    if hasattr(source, "read"):
        text = source.read()
    else:
        s = str(source)
        if s.lstrip().startswith("{"):
            text = s
        else:
            with open(s, "r", encoding="utf-8") as fh:
                text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None


def shortest_travel_time(g: MapGraph, frm: str, to: str) -> int:
    """Shortest directed travel time in seconds (INF when unreachable)."""
    return g.routes().time(frm, to)


def nearest_recharge_station(g: MapGraph, frm: str) -> tuple[str, int]:
    """Station minimizing directed travel time from ``frm``; ties break by
    ascending station id. A station maps to itself at distance 0."""
    return g.routes().nearest_station(frm)


def scale_map(g: MapGraph, factor) -> MapGraph:
    """Uniformly scale coordinates and travel times by a positive rational.

    Travel times are rounded up to whole seconds; topology is unchanged.
    """
    factor = Fraction(factor)
    if factor <= 0:
        raise ValueError("scale factor must be positive")
    if factor == 1:
        return g
    positions = [
        Position(p.id, p.x * float(factor), p.y * float(factor), p.z * float(factor), p.recharge)
        for p in g.positions.values()
    ]
    edges = {uv: int(math.ceil(t * factor)) for uv, t in g.edges.items()}
    bounds = None
    if g.bounds is not None:
        bounds = tuple(b * float(factor) for b in g.bounds)
    scaled = MapGraph(positions, edges, speed=g.speed,
                      scale_factor=g.scale_factor * factor, bounds=bounds)
    return scaled
