import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from hbrsim.geometry import GenerationConfig, WeightModel, generate_network
from hbrsim.graph import WeightedGraph, sssp
from hbrsim.hbr import STOP_AT_HOP_RADIUS_1, elect_landmark_pair

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def small_network(seed, n=60, degree=8.0, radio_range=50.0, mask=None):
    """Connected random unit-disk network with about ``n`` nodes."""
    side = math.sqrt(n * math.pi * radio_range**2 / degree)
    cfg = GenerationConfig(n / side**2, side, side, radio_range, mask, 0.01, seed)
    return generate_network(cfg)


def small_graph(seed, n=60, model=None, **kw):
    return WeightedGraph(small_network(seed, n, **kw), model or WeightModel.energy())


def bellman_ford(graph, source, allowed=None):
    nodes = range(graph.n) if allowed is None else sorted(allowed)
    keep = set(nodes)
    dist = {u: math.inf for u in nodes}
    dist[source] = 0.0
    edges = [(u, v, w) for (u, v), w in zip(graph.network.edges.tolist(), graph.weights.tolist())
             if u in keep and v in keep]
    for _ in range(len(dist)):
        changed = False
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
            if dist[v] + w < dist[u]:
                dist[u] = dist[v] + w
                changed = True
        if not changed:
            break
    return {u: d for u, d in dist.items() if d < math.inf}


def induced_components(graph, nodes):
    nodes = np.asarray(sorted(nodes))
    if len(nodes) == 0:
        return 0
    index = {u: i for i, u in enumerate(nodes.tolist())}
    rows, cols = [], []
    for u, v in graph.network.edges.tolist():
        if u in index and v in index:
            rows.append(index[u])
            cols.append(index[v])
    m = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(nodes), len(nodes)))
    return connected_components(m, directed=False)[0]


def reference_build(graph, policy):
    """Recursive construction straight from the definitions, using ``sssp``."""
    addresses = {u: "" for u in range(graph.n)}
    tables = {u: [] for u in range(graph.n)}
    landmarks = {"": 0}
    adj = graph.adjacency
    tie = {}
    for (u, v), t in zip(graph.network.edges.tolist(), graph.tie.tolist()):
        tie[u, v] = tie[v, u] = t

    def split(members, anchor, prefix):
        if len(members) < 2:
            return
        if policy == STOP_AT_HOP_RADIUS_1 and prefix:
            near = {v for v, _ in adj[anchor]} | {anchor}
            if members <= near:
                return
        x0, x1 = elect_landmark_pair(graph, members, anchor)
        d0, _ = sssp(graph, x0, members)
        d1, _ = sssp(graph, x1, members)
        halves = (set(), set())
        for u in members:
            halves[0 if d0[u] <= d1[u] else 1].add(u)
        for u in members:
            b = 0 if u in halves[0] else 1
            opp = d1 if b == 0 else d0
            best = min((w + opp[v], tie[u, v], v) for v, w in adj[u] if v in members)
            addresses[u] += str(b)
            tables[u].append(best[2])
        landmarks[prefix + "0"] = x0
        landmarks[prefix + "1"] = x1
        split(halves[0], x0, prefix + "0")
        split(halves[1], x1, prefix + "1")

    split(set(range(graph.n)), 0, "")
    return addresses, tables, landmarks


@pytest.fixture
def energy():
    return WeightModel.energy()
