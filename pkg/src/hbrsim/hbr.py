"""Hierarchical bipartition: landmarks, bit-string addresses, routing tables.

Each connected sub-network ``G_alpha`` (all nodes whose address starts with
``alpha``) is split by two landmarks: ``x_alpha0`` farthest from the anchor
``x_alpha`` and ``x_alpha1`` farthest from ``x_alpha0``.  A node joins the
half whose landmark is nearer, ties going to 0.  Both halves stay connected,
which is what makes greedy descent towards the opposite landmark reach it.
"""

from __future__ import annotations

import heapq
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Disconnected, WeightedGraph, argmax_max_id, argmax_per_label, sssp
from .trace import RouteTrace

SPLIT_TO_SINGLETONS = "split_to_singletons"
STOP_AT_HOP_RADIUS_1 = "stop_at_hop_radius_1"
POLICIES = (SPLIT_TO_SINGLETONS, STOP_AT_HOP_RADIUS_1)


@dataclass
class FloodStats:
    """Transmissions spent on distance floods while building the structure.

    ``anchor`` is the initial flood from the root anchor.  ``levels`` holds
    ``(address_length, transmissions, subnetworks)``: the floods from
    ``x_alpha0`` and ``x_alpha1`` of every sub-network split into addresses
    of that length.
    """

    anchor: int = 0
    levels: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.anchor + sum(t for _, t, _ in self.levels)

    def to_csv(self) -> str:
        rows = ["level,transmissions,subnetworks", f"0,{self.anchor},1"]
        rows += [f"{lvl},{t},{s}" for lvl, t, s in self.levels]
        return "\n".join(rows) + "\n"


@dataclass(frozen=True, eq=False)
class HbrStructure:
    graph: WeightedGraph
    policy: str
    addresses: tuple[str, ...]
    # tables[u][i] is the neighbour to use when the target address first
    # differs from u's address at position i
    tables: tuple[tuple[int, ...], ...]
    # landmark x_alpha per address prefix; "" maps to the root anchor
    landmarks: dict[str, int]
    flood_stats: FloodStats | None = None

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def address_lengths(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.addresses), dtype=np.int64, count=self.n)

    @property
    def max_address_length(self) -> int:
        return int(self.address_lengths.max(initial=0))

    @property
    def mean_address_length(self) -> float:
        return float(self.address_lengths.mean()) if self.n else 0.0

    def members(self, prefix: str) -> np.ndarray:
        return np.array([u for u, a in enumerate(self.addresses) if a.startswith(prefix)], dtype=np.int64)

    def prefixes(self) -> list[str]:
        """Addresses of all sub-networks that were split further."""
        return sorted({a[:i] for a in self.addresses for i in range(len(a))}, key=lambda p: (len(p), p))

    def storage_bits(self) -> np.ndarray:
        """Routing-table size per node: ``|alpha_u| * log2(deg(u))`` bits."""
        deg = self.graph.network.degree()
        return self.address_lengths * np.log2(np.maximum(deg, 1))

    def dump(self) -> str:
        out = io.StringIO()
        out.write(f"# hbr structure policy={self.policy} nodes={self.n}\n")
        for u, (alpha, row) in enumerate(zip(self.addresses, self.tables)):
            entries = ",".join(f"{i + 1}:{v}" for i, v in enumerate(row))
            out.write(f"{u} {alpha or '-'} {entries}\n")
        return out.getvalue()


def elect_landmark_pair(graph: WeightedGraph, allowed, anchor: int) -> tuple[int, int]:
    """Two sweeps of maximum distance inside the induced sub-network.

    Uses the reference ``sssp``; parity goes to the larger node ID.
    """
    allowed = sorted(set(allowed))
    dist, _ = sssp(graph, anchor, allowed)
    values = np.full(graph.n, -math.inf)
    for u, d in dist.items():
        values[u] = d
    first = argmax_max_id(values, allowed)
    dist, _ = sssp(graph, first, allowed)
    values = np.full(graph.n, -math.inf)
    for u, d in dist.items():
        values[u] = d
    return first, argmax_max_id(values, allowed)


def build_hbr(graph: WeightedGraph, policy: str = SPLIT_TO_SINGLETONS, count_floods: bool = False) -> HbrStructure:
    """Build addresses and routing tables level by level.

    All sub-networks of one level are disjoint, so a single multi-source
    Dijkstra on the level graph (edges inside a sub-network only) yields
    every sub-network's distances at once.  ``count_floods`` replays each
    distance computation with ``simulate_flood`` to fill ``FloodStats``.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown termination policy {policy!r}")
    n = graph.n
    if n == 0 or not graph.network.is_connected():
        raise Disconnected("HBR needs a connected, non-empty network")

    root = 0
    stats = FloodStats() if count_floods else None
    if count_floods:
        stats.anchor = simulate_flood(graph, None, root)[0]

    label = np.zeros(n, dtype=np.int64)  # current sub-network per node, -1 once terminal
    prefix = [""]  # address of each label
    anchor = np.array([root], dtype=np.int64)
    landmarks = {"": root}
    bit_cols: list[np.ndarray] = []
    hop_cols: list[np.ndarray] = []
    active = np.array([n >= 2])
    rows, cols = graph.rows, graph.nbr

    while active.any():
        lab = np.where(label >= 0, np.where(active[np.maximum(label, 0)], label, -1), -1)
        count = len(prefix)
        act_ids = np.flatnonzero(active)
        d_anchor = graph.distances(anchor[act_ids], lab)
        in_level = lab >= 0
        if not np.isfinite(d_anchor[in_level]).all():
            raise Disconnected("a sub-network lost connectivity during bipartition")
        first = argmax_per_label(d_anchor, lab, count)
        d0 = graph.distances(first[act_ids], lab)
        second = argmax_per_label(d0, lab, count)
        d1 = graph.distances(second[act_ids], lab)

        bit = np.full(n, -1, dtype=np.int64)
        bit[in_level] = (d0[in_level] > d1[in_level]).astype(np.int64)

        # next hop: first step of a shortest path (inside the sub-network) to the
        # opposite landmark, i.e. the neighbour minimising w(u, v) + d(v, x)
        same = (lab[rows] == lab[cols]) & (lab[rows] >= 0)
        val = np.where(bit[rows] == 0, d1[cols], d0[cols]) + graph.nbr_w
        val[~same] = np.inf
        hop = np.full(n, -1, dtype=np.int64)
        cand = np.flatnonzero(same)
        if len(cand):
            rowmin = np.full(n, np.inf)
            np.minimum.at(rowmin, rows[cand], val[cand])
            hit = cand[val[cand] == rowmin[rows[cand]]]
            # ties: cheaper link first (see WeightedGraph.tie), then smaller ID
            hit = hit[np.lexsort((cols[hit], graph.nbr_tie[hit], rows[hit]))]
            uniq, firsts = np.unique(rows[hit], return_index=True)
            hop[uniq] = cols[hit[firsts]]
        if (hop[in_level] < 0).any():
            raise Disconnected("node without a neighbour inside its sub-network")
        bit_cols.append(bit)
        hop_cols.append(hop)

        if count_floods:
            trans = 0
            for a in act_ids:
                members = np.flatnonzero(lab == a)
                trans += simulate_flood(graph, members, int(first[a]))[0]
                trans += simulate_flood(graph, members, int(second[a]))[0]
            stats.levels.append((len(prefix[act_ids[0]]) + 1, trans, len(act_ids)))

        # children: label 2*k + bit among the active ones, renumbered densely
        child_key = np.where(in_level, lab * 2 + bit, -1)
        keys = np.unique(child_key[in_level])
        new_label = np.full(n, -1, dtype=np.int64)
        new_label[in_level] = np.searchsorted(keys, child_key[in_level])
        new_prefix, new_anchor = [], []
        for key in keys.tolist():
            parent, b = divmod(key, 2)
            alpha = prefix[parent] + str(b)
            x = int(first[parent] if b == 0 else second[parent])
            new_prefix.append(alpha)
            new_anchor.append(x)
            landmarks[alpha] = x
        new_anchor = np.array(new_anchor, dtype=np.int64)
        sizes = np.bincount(new_label[in_level], minlength=len(keys))
        new_active = sizes >= 2
        if policy == STOP_AT_HOP_RADIUS_1:
            nl_r = new_label[rows]
            near = (nl_r >= 0) & (new_anchor[np.maximum(nl_r, 0)] == rows) & (new_label[cols] == nl_r)
            covered = np.bincount(nl_r[near], minlength=len(keys)) + 1
            new_active &= covered < sizes
        label, prefix, anchor, active = new_label, new_prefix, new_anchor, new_active

    bits = np.array(bit_cols).T if bit_cols else np.zeros((n, 0), dtype=np.int64)
    hops = np.array(hop_cols).T if hop_cols else np.zeros((n, 0), dtype=np.int64)
    addresses, tables = [], []
    for b_row, h_row in zip(bits.tolist(), hops.tolist()):
        k = next((i for i, b in enumerate(b_row) if b < 0), len(b_row))
        addresses.append("".join("1" if b else "0" for b in b_row[:k]))
        tables.append(tuple(h_row[:k]))
    return HbrStructure(graph, policy, tuple(addresses), tuple(tables), landmarks, stats)


def hbr_next_hop(structure: HbrStructure, u: int, target: int) -> int:
    """Next hop from ``u`` towards ``target``.

    A neighbouring target is always served directly; otherwise the table
    entry for the first differing address bit is used.
    """
    nbrs = structure.graph.neighbors(u)
    i = int(np.searchsorted(nbrs, target))
    if i < len(nbrs) and nbrs[i] == target:
        return target
    au, at = structure.addresses[u], structure.addresses[target]
    for i, (a, b) in enumerate(zip(au, at)):
        if a != b:
            return structure.tables[u][i]
    if len(au) != len(at):
        raise RuntimeError(f"address {au!r} is a proper prefix of {at!r}")
    # same terminal sub-network, which has hop radius 1 around its landmark
    return structure.landmarks[au]


def route_hbr(structure: HbrStructure, source: int, target: int) -> RouteTrace:
    """Forward a packet with HBR alone; always ends at ``target``."""
    n = structure.n
    if not (0 <= source < n and 0 <= target < n):
        raise KeyError("source or target not in the network")
    trace = RouteTrace(source, target, [source], protocol="HBR")
    guard = n * (structure.max_address_length + 2)
    u = source
    while u != target:
        v = hbr_next_hop(structure, u, target)
        trace.cost += structure.graph.weight(u, v)
        trace.path.append(v)
        trace.modes.append("hbr")
        u = v
        if trace.hops > guard:
            raise RuntimeError(f"HBR loop guard fired routing {source}->{target}")
    trace.delivered = True
    return trace


def simulate_flood(graph: WeightedGraph, allowed, source: int):
    """Event-driven distance flood inside the induced sub-network.

    Every node keeps its best known distance.  Messages are processed in the
    order (carried distance, sender, receiver); a node whose distance
    improves sends one unicast to each allowed neighbour except the one it
    learned from, cheapest edge first.  Returns ``(transmissions, dist)``.
    """
    allowed = None if allowed is None else set(np.asarray(allowed).tolist())
    adj = graph.adjacency
    best = {source: 0.0}
    sent = 0
    queue: list[tuple[float, int, int, int]] = []
    seq = 0

    def broadcast(u, d, skip):
        nonlocal sent, seq
        for v, w in sorted(adj[u], key=lambda e: (e[1], e[0])):
            if v == skip or (allowed is not None and v not in allowed):
                continue
            sent += 1
            seq += 1
            heapq.heappush(queue, (d + w, u, v, seq))

    broadcast(source, 0.0, None)
    while queue:
        d, sender, v, _ = heapq.heappop(queue)
        if d < best.get(v, math.inf):
            best[v] = d
            broadcast(v, d, sender)
    return sent, best
