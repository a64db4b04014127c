"""Small hand-built networks with known answers, used by tests and the CLI."""

from __future__ import annotations

import math

import numpy as np

from .geometry import Network, unit_disk_edges
from .graph import WeightedGraph


def _line_xy(n: int, spacing: float = 1.0) -> np.ndarray:
    return np.column_stack([np.arange(n, dtype=float) * spacing, np.zeros(n)])


def path(n: int, weight: float = 1.0) -> WeightedGraph:
    return WeightedGraph.from_edges(n, [(i, i + 1, weight) for i in range(n - 1)])


def exponential_path(n: int) -> WeightedGraph:
    """Path 0-1-...-(n-1) with edge weights 1, 2, 4, ...

    Every bipartition peels off a single end node, so addresses reach
    length n - 1.
    """
    return WeightedGraph.from_edges(n, [(i, i + 1, 2.0**i) for i in range(n - 1)])


def cycle(n: int, weight: float = 1.0) -> WeightedGraph:
    angles = 2 * np.pi * np.arange(n) / n
    xy = np.column_stack([np.cos(angles), np.sin(angles)]) * 10.0
    return WeightedGraph.from_edges(n, [(i, (i + 1) % n, weight) for i in range(n)], xy=xy)


def complete(n: int, weight: float = 1.0) -> WeightedGraph:
    angles = 2 * np.pi * np.arange(n) / n
    xy = np.column_stack([np.cos(angles), np.sin(angles)]) * 10.0
    return WeightedGraph.from_edges(n, [(i, j, weight) for i in range(n) for j in range(i + 1, n)], xy=xy)


def star(leaves: int, arm: int = 0, weight: float = 1.0) -> WeightedGraph:
    """Centre 0 with ``leaves`` leaves; the last leaf continues as a chain of ``arm`` nodes."""
    edges = [(0, i, weight) for i in range(1, leaves + 1)]
    prev = leaves
    for j in range(arm):
        edges.append((prev, leaves + 1 + j, weight))
        prev = leaves + 1 + j
    n = leaves + arm + 1
    angles = 2 * np.pi * np.arange(leaves) / max(leaves, 1)
    xy = np.zeros((n, 2))
    xy[1 : leaves + 1] = np.column_stack([np.cos(angles), np.sin(angles)])
    xy[leaves + 1 :] = xy[leaves] * np.arange(2, arm + 2)[:, None]
    return WeightedGraph.from_edges(n, edges, xy=xy)


def grid(rows: int, cols: int, spacing: float = 40.0, model=None) -> WeightedGraph:
    """Lattice with unit-disk edges at radio range ``spacing``; ids row-major."""
    yy, xx = np.mgrid[0:rows, 0:cols]
    xy = np.column_stack([xx.ravel(), yy.ravel()]).astype(float) * spacing
    edges = unit_disk_edges(xy, spacing)
    net = Network.from_edges(xy, edges, radio_range=spacing)
    return WeightedGraph(net, model)


def figure_one(m: int = 20, a: float = 1.0) -> tuple[WeightedGraph, dict[str, int]]:
    """Stretch worst case: HBR pays ``m * a`` where the shortest path pays ``2 * a``.

    A cycle of ``m + 2`` equal edges holds ``s``, a middle node ``c`` and ``t``
    in a row.  A tail of ``m / 2 - 2`` nodes hangs off ``s`` and ends in the
    first landmark ``x0``; the opposite landmark ``x1`` is the cycle node
    facing ``s``, which also gets id 0 (the root).  ``s`` gets bit 0 and
    ``t`` bit 1, so the packet leaves ``s`` through ``v`` towards ``x1`` and
    travels the long way round.

    Returns the graph and a dict of named node ids (s, c, t, v, x0, x1).
    """
    if m < 6 or m % 2:
        raise ValueError("m must be an even number >= 6")
    ring = m + 2
    tail = m // 2 - 2
    start = ring // 2  # cycle position given id 0
    ids = {(start + i) % ring: i for i in range(ring)}
    edges = [(ids[i], ids[(i + 1) % ring], a) for i in range(ring)]
    prev = ids[0]
    for j in range(tail):
        edges.append((prev, ring + j, a))
        prev = ring + j
    angles = 2 * np.pi * np.arange(ring) / ring
    radius = ring * 10.0 / (2 * math.pi)
    xy = np.zeros((ring + tail, 2))
    for pos, node in ids.items():
        xy[node] = radius * np.cos(angles[pos]), radius * np.sin(angles[pos])
    xy[ring:] = xy[ids[0]] + np.column_stack([np.full(tail, 0.0), -10.0 * np.arange(1, tail + 1)])
    graph = WeightedGraph.from_edges(ring + tail, edges, xy=xy)
    names = {"s": ids[0], "c": ids[1], "t": ids[2], "v": ids[ring - 1], "x0": prev, "x1": ids[ring // 2]}
    return graph, names


CUL_DE_SAC_XY = [
    (0, 100), (40, 100), (80, 100), (120, 100), (120, 140),
    (160, 150), (200, 140), (240, 120), (280, 100), (300, 100),
]


def cul_de_sac(model=None) -> WeightedGraph:
    """Greedy GEO from node 0 to node 9 dead-ends once at node 3 (120, 100).

    Recovery climbs to node 4 (no closer to the target) and node 5, where
    the euclidean distance first drops below the dead-end's and greedy
    forwarding resumes.
    """
    xy = np.array(CUL_DE_SAC_XY, dtype=float)
    net = Network.from_edges(xy, unit_disk_edges(xy, 50.0), radio_range=50.0, width=300.0, height=200.0)
    return WeightedGraph(net, model)
