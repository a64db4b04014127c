"""Cost-over-progress greedy forwarding on physical (GEO) or virtual (LMR)
coordinates, with shortest-path or HBR escape from dead-ends."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .graph import WeightedGraph, argmax_max_id
from .hbr import HbrStructure, hbr_next_hop
from .trace import RouteTrace

GEO = "GEO"
LMR = "LMR"


class VirtualCoordinate(NamedTuple):
    dA: float
    dB: float
    dC: float
    dD: float


def geo_next_hop(graph: WeightedGraph, u: int, target: int):
    """Neighbour minimising weight / euclidean progress; None at a dead-end."""
    xy = graph.network.xy
    vs = graph.neighbors(u)
    du = math.hypot(*(xy[u] - xy[target]))
    dv = np.hypot(*(xy[vs] - xy[target]).T)
    return _cop_choice(vs, graph.neighbor_weights(u), du - dv)


def lmr_distance(p, q) -> float:
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(p, q)))


def lmr_next_hop(graph: WeightedGraph, u: int, target: int, coords: np.ndarray):
    """Same rule as GEO with the 4-landmark virtual distance as metric."""
    vs = graph.neighbors(u)
    t = coords[target]
    du = float(np.sqrt(((coords[u] - t) ** 2).sum()))
    dv = np.sqrt(((coords[vs] - t) ** 2).sum(axis=1))
    return _cop_choice(vs, graph.neighbor_weights(u), du - dv)


def _cop_choice(vs, ws, progress):
    ok = progress > 0
    if not ok.any():
        return None
    ratio = np.full(len(vs), np.inf)
    ratio[ok] = ws[ok] / progress[ok]
    # argmin keeps the first of equal ratios, i.e. the smaller ID
    return int(vs[int(np.argmin(ratio))])


def select_vcap_landmarks(graph: WeightedGraph, anchor: int = 0) -> tuple[int, int, int, int]:
    """Landmarks A, B, C, D from omega-distances; parity goes to the larger ID."""
    a = argmax_max_id(graph.distances(anchor))
    d_a = graph.distances(a)
    b = argmax_max_id(d_a)
    d_b = graph.distances(b)
    c = argmax_max_id(d_a + d_b - 2 * np.abs(d_a - d_b))
    d_c = graph.distances(c)
    d = argmax_max_id(d_c - np.abs(d_a - d_b))
    return a, b, c, d


def virtual_coordinates(graph: WeightedGraph, landmarks=None) -> np.ndarray:
    """``(n, 4)`` array of omega-distances to A, B, C, D."""
    landmarks = select_vcap_landmarks(graph) if landmarks is None else landmarks
    return graph.distance_rows(list(landmarks)).T.copy()


class ShortestPathRouter:
    """Next hops along omega-shortest paths, one Dijkstra per target (cached)."""

    def __init__(self, graph: WeightedGraph):
        self.graph = graph
        self._cache: dict[int, np.ndarray] = {}

    def prefetch(self, targets) -> None:
        todo = sorted({int(t) for t in targets} - self._cache.keys())
        if todo:
            for t, row in zip(todo, self.graph.distance_rows(todo)):
                self._cache[t] = row

    def to_target(self, target: int) -> np.ndarray:
        row = self._cache.get(target)
        if row is None:
            row = self._cache[target] = self.graph.distances(target)
        return row

    def distance(self, source: int, target: int) -> float:
        return float(self.to_target(target)[source])

    def next_hop(self, u: int, target: int) -> int:
        dist = self.to_target(target)
        vs = self.graph.neighbors(u)
        total = self.graph.neighbor_weights(u) + dist[vs]
        return int(vs[int(np.argmin(total))])

    def route(self, source: int, target: int) -> RouteTrace:
        trace = RouteTrace(source, target, [source], protocol="SP")
        u = source
        while u != target:
            v = self.next_hop(u, target)
            trace.cost += self.graph.weight(u, v)
            trace.path.append(v)
            trace.modes.append("sp")
            u = v
            if trace.hops > self.graph.n:
                raise RuntimeError("shortest-path walk did not terminate")
        trace.delivered = True
        return trace


def shortest_path_route(graph: WeightedGraph, u: int, target: int, router: ShortestPathRouter | None = None) -> int:
    return (router or ShortestPathRouter(graph)).next_hop(u, target)


@dataclass
class RecoveryStrategy:
    kind: str  # "shortest_path" or "hbr"
    structure: HbrStructure | None = None
    router: ShortestPathRouter | None = None

    @property
    def label(self) -> str:
        return "SP" if self.kind == "shortest_path" else "HBR"

    @classmethod
    def shortest_path(cls, graph: WeightedGraph, router: ShortestPathRouter | None = None):
        return cls("shortest_path", router=router or ShortestPathRouter(graph))

    @classmethod
    def hbr(cls, structure: HbrStructure):
        return cls("hbr", structure=structure)

    def next_hop(self, u: int, target: int) -> int:
        if self.kind == "hbr":
            return hbr_next_hop(self.structure, u, target)
        return self.router.next_hop(u, target)


def route_greedy(
    graph: WeightedGraph,
    source: int,
    target: int,
    protocol: str,
    recovery: RecoveryStrategy | None,
    coords: np.ndarray | None = None,
    stop_at_dead_end: bool = False,
) -> RouteTrace:
    """Greedy forwarding; at a dead-end the recovery route is followed hop by
    hop until the protocol metric drops below its value at that dead-end.

    ``stop_at_dead_end`` returns an undelivered trace at the first dead-end
    (used to measure dead-end fractions without recovery).
    """
    n = graph.n
    if not (0 <= source < n and 0 <= target < n):
        raise KeyError("source or target not in the network")
    if recovery is not None and recovery.kind == "hbr" and recovery.structure.graph is not graph:
        raise ValueError("HBR recovery structure was built on a different graph")
    if protocol == GEO:
        xy = graph.network.xy

        def metric(v):
            return math.hypot(*(xy[v] - xy[target]))

        def step(u):
            return geo_next_hop(graph, u, target)

    elif protocol == LMR:
        if coords is None:
            raise ValueError("LMR needs virtual coordinates")
        tc = coords[target]

        def metric(v):
            return float(np.sqrt(((coords[v] - tc) ** 2).sum()))

        def step(u):
            return lmr_next_hop(graph, u, target, coords)

    else:
        raise ValueError(f"unknown protocol {protocol!r}")

    trace = RouteTrace(source, target, [source], protocol=protocol, recovery=recovery.label if recovery else "")
    guard = n * (n + 2) if recovery is None or recovery.structure is None else n * (
        recovery.structure.max_address_length + 2
    )
    u = source
    while u != target:
        v = step(u)
        if v is not None:
            trace.cost += graph.weight(u, v)
            trace.path.append(v)
            trace.modes.append("greedy")
            u = v
        else:
            trace.dead_end_positions.append(len(trace.path) - 1)
            if stop_at_dead_end or recovery is None:
                return trace
            stuck = metric(u)
            while True:
                v = recovery.next_hop(u, target)
                trace.cost += graph.weight(u, v)
                trace.path.append(v)
                trace.modes.append("recovery")
                u = v
                if u == target or metric(u) < stuck:
                    break
                if trace.hops > guard:
                    raise RuntimeError(f"recovery loop guard fired routing {source}->{target}")
        if trace.hops > guard:
            raise RuntimeError(f"loop guard fired routing {source}->{target}")
    trace.delivered = True
    return trace
