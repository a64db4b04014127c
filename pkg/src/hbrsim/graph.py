"""Weighted view of a network plus shortest-path machinery.

``sssp`` is the readable reference implementation (heap Dijkstra with
smaller-ID parent tie-breaks).  The bulk paths used by structure builds and
experiments go through ``scipy.sparse.csgraph.dijkstra``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import replace

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .geometry import Network, WeightModel


class Disconnected(ValueError):
    pass


class WeightedGraph:
    """A network together with positive per-edge weights.

    Weights come from a ``WeightModel`` or are given explicitly (fixtures
    such as the exponential-weight path are not expressible as a function of
    edge length).

    ``tie`` is a secondary per-edge key for choices between equal distances.
    Coarsened weights tie constantly; there the link's uncoarsened energy
    decides, so the cheaper link wins.  Otherwise it is zero and the
    smaller node ID decides.
    """

    def __init__(self, network: Network, model: WeightModel | None = None, weights=None):
        if weights is None:
            model = model or WeightModel.energy()
            weights = model.cost(network.lengths, network.radio_range)
        weights = np.asarray(weights, dtype=float).reshape(-1)
        if len(weights) != network.num_edges:
            raise ValueError("one weight per edge expected")
        if len(weights) and not (weights > 0).all():
            raise ValueError("edge weights must be positive")
        weights.setflags(write=False)
        self.network = network
        self.model = model
        self.weights = weights
        self.n = network.n
        self.indptr = network.indptr
        self.nbr = network.nbr
        self.nbr_w = weights[network.nbr_edge]
        if model is not None and model.kind == "coarsened":
            tie = replace(model, kind="energy").cost(network.lengths, network.radio_range)
        else:
            tie = np.zeros(network.num_edges)
        self.tie = np.asarray(tie, dtype=float).reshape(-1)
        self.nbr_tie = self.tie[network.nbr_edge]
        self.rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        self.csr = csr_matrix((self.nbr_w, self.nbr, self.indptr), shape=(self.n, self.n))
        self._adj = None

    @classmethod
    def from_edges(cls, n: int, weighted_edges, xy=None) -> WeightedGraph:
        """Fixture constructor: ``weighted_edges`` is an iterable of (u, v, w)."""
        triples = [(int(u), int(v), float(w)) for u, v, w in weighted_edges]
        if xy is None:
            xy = np.column_stack([np.arange(n, dtype=float), np.zeros(n)])
        net = Network.from_edges(xy, [(u, v) for u, v, _ in triples])
        lookup = {(min(u, v), max(u, v)): w for u, v, w in triples}
        weights = [lookup[(u, v)] for u, v in net.edges.tolist()]
        return cls(net, weights=weights)

    @property
    def adjacency(self) -> list[list[tuple[int, float]]]:
        """Python adjacency lists ``[(v, w), ...]`` ascending by ``v``."""
        if self._adj is None:
            nbr, w, ptr = self.nbr.tolist(), self.nbr_w.tolist(), self.indptr.tolist()
            self._adj = [list(zip(nbr[ptr[u] : ptr[u + 1]], w[ptr[u] : ptr[u + 1]])) for u in range(self.n)]
        return self._adj

    def neighbors(self, u: int) -> np.ndarray:
        return self.nbr[self.indptr[u] : self.indptr[u + 1]]

    def neighbor_weights(self, u: int) -> np.ndarray:
        return self.nbr_w[self.indptr[u] : self.indptr[u + 1]]

    def weight(self, u: int, v: int) -> float:
        return float(self.weights[self.network.edge_index(u, v)])

    def level_csr(self, labels: np.ndarray) -> csr_matrix:
        """Adjacency restricted to edges whose endpoints share a label >= 0."""
        keep = (labels[self.rows] == labels[self.nbr]) & (labels[self.rows] >= 0)
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.rows[keep], minlength=self.n), out=indptr[1:])
        return csr_matrix((self.nbr_w[keep], self.nbr[keep], indptr), shape=(self.n, self.n))

    def distances(self, sources, labels=None) -> np.ndarray:
        """Distance to the nearest source, within each source's label class.

        With ``labels`` every source must sit in its own class; the result is
        then the per-class single-source distance for every class at once.
        """
        graph = self.csr if labels is None else self.level_csr(labels)
        sources = np.atleast_1d(np.asarray(sources, dtype=np.int64))
        return dijkstra(graph, directed=True, indices=sources, min_only=True)

    def distance_rows(self, sources) -> np.ndarray:
        return np.atleast_2d(dijkstra(self.csr, directed=True, indices=np.asarray(sources)))


def edge_weight(network: Network, u: int, v: int, model: WeightModel) -> float:
    """Weight of the connection {u, v}; raises KeyError for non-adjacent pairs."""
    return float(model.cost(network.lengths[network.edge_index(u, v)], network.radio_range))


def sssp(graph: WeightedGraph, source: int, allowed=None, strict: bool = True):
    """Exact distances and a shortest-path tree from ``source``.

    Restricted to the subgraph induced by ``allowed`` (all nodes if None).
    Parents tie-break towards the smaller node ID.  Returns ``(dist, parent)``
    dicts; the source has parent None.
    """
    allowed = None if allowed is None else set(allowed)
    if allowed is not None and source not in allowed:
        raise ValueError("source outside the allowed node set")
    adj = graph.adjacency
    dist = {source: 0.0}
    parent = {source: None}
    done = set()
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, w in adj[u]:
            if allowed is not None and v not in allowed:
                continue
            nd = d + w
            old = dist.get(v, math.inf)
            if nd < old:
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
            elif nd == old and v not in done and u < parent[v]:
                parent[v] = u
    if strict:
        expected = set(range(graph.n)) if allowed is None else allowed
        missing = expected - done
        if missing:
            raise Disconnected(f"{len(missing)} allowed node(s) unreachable from {source}")
    return dist, parent


def argmax_max_id(values: np.ndarray, candidates=None) -> int:
    """Index of the maximum; equal values resolve to the larger index."""
    values = np.asarray(values, dtype=float)
    if candidates is not None:
        candidates = np.asarray(sorted(candidates))
        best = values[candidates]
        return int(candidates[len(best) - 1 - int(np.argmax(best[::-1]))])
    return len(values) - 1 - int(np.argmax(values[::-1]))


def argmax_per_label(values: np.ndarray, labels: np.ndarray, count: int) -> np.ndarray:
    """For each label 0..count-1 the member with maximal value (ties: larger ID)."""
    idx = np.flatnonzero(labels >= 0)
    order = idx[np.lexsort((idx, values[idx], labels[idx]))]
    lab = labels[order]
    last = np.flatnonzero(np.r_[lab[1:] != lab[:-1], True])
    out = np.full(count, -1, dtype=np.int64)
    out[lab[last]] = order[last]
    return out
