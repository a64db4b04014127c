"""Random geometric sensor networks on a (possibly masked) rectangular field.

Nodes are identified by their index ``0..n-1``; the index doubles as the
node ID used for every tie-break in the routing code.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

FORMAT_VERSION = 1


class Position(NamedTuple):
    x: float
    y: float


class GenerationRejected(Exception):
    """The largest component is too small (or nothing was placed)."""


def euclidean_distance(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class WeightModel:
    """Edge cost as a function of the euclidean edge length.

    ``unit`` gives hop distances, ``energy`` is ``a + b * d**c`` and
    ``coarsened`` rounds the energy cost up onto ``k`` levels relative to the
    cost of a link at full radio range.
    """

    kind: str = "energy"
    a: float = 400.0
    b: float = 1.0
    c: float = 2.0
    k: int = 8

    def __post_init__(self):
        if self.kind not in ("unit", "energy", "coarsened"):
            raise ValueError(f"unknown weight model {self.kind!r}")
        if self.kind != "unit" and not (self.a > 0 and self.b > 0 and self.c >= 2):
            raise ValueError("energy model needs a > 0, b > 0, c >= 2")
        if self.kind == "coarsened" and (int(self.k) != self.k or self.k < 1):
            raise ValueError("coarsened model needs an integer k >= 1")

    @classmethod
    def unit(cls) -> WeightModel:
        return cls("unit")

    @classmethod
    def energy(cls, a: float = 400.0, b: float = 1.0, c: float = 2.0) -> WeightModel:
        return cls("energy", a, b, c)

    @classmethod
    def coarsened(cls, k: int) -> WeightModel:
        return cls("coarsened", k=int(k))

    @classmethod
    def parse(cls, text: str) -> WeightModel:
        """``unit``, ``energy``, ``energy:a,b,c`` or ``coarsened:k`` (``wK`` also works)."""
        text = text.strip().lower()
        if text == "unit":
            return cls.unit()
        if text.startswith("energy"):
            if ":" in text:
                a, b, c = (float(p) for p in text.split(":", 1)[1].split(","))
                return cls.energy(a, b, c)
            return cls.energy()
        if text.startswith("coarsened:"):
            return cls.coarsened(int(text.split(":", 1)[1]))
        if text.startswith("w") and text[1:].isdigit():
            return cls.coarsened(int(text[1:]))
        raise ValueError(f"cannot parse weight model {text!r}")

    @property
    def label(self) -> str:
        if self.kind == "unit":
            return "unit"
        if self.kind == "energy":
            return f"energy:{self.a:g},{self.b:g},{self.c:g}"
        return f"coarsened:{self.k}"

    @property
    def characteristic_distance(self) -> float:
        if self.kind == "unit":
            return math.inf
        return (self.a / (self.b * (self.c - 1))) ** (1.0 / self.c)

    def cost(self, length, radio_range: float):
        """Weight of a link of euclidean ``length`` (scalar or array)."""
        length = np.asarray(length, dtype=float)
        if self.kind == "unit":
            out = np.ones_like(length)
        elif self.kind == "energy":
            out = self.a + self.b * length**self.c
        else:
            full = self.a + self.b * radio_range**self.c
            out = np.ceil(self.k * (self.a + self.b * length**self.c) / full)
            out = np.clip(out, 1, self.k)
        return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class Mask:
    """Bitmap of forbidden regions, stretched over the whole field.

    ``holes[row, col]`` is True for a hole; row 0 covers the band ``0 <= y < h``.
    """

    holes: np.ndarray
    edge_pruning: bool = False
    name: str = ""

    def __post_init__(self):
        holes = np.asarray(self.holes, dtype=bool)
        if holes.ndim != 2 or holes.size == 0:
            raise ValueError("mask grid must be a non-empty 2-D array")
        object.__setattr__(self, "holes", holes)

    @property
    def shape(self) -> tuple[int, int]:
        return self.holes.shape

    @property
    def hole_fraction(self) -> float:
        return float(self.holes.mean())

    def cells(self, xy, width: float, height: float):
        rows, cols = self.holes.shape
        xy = np.atleast_2d(np.asarray(xy, dtype=float))
        c = np.clip(np.floor(xy[:, 0] * cols / width).astype(int), 0, cols - 1)
        r = np.clip(np.floor(xy[:, 1] * rows / height).astype(int), 0, rows - 1)
        return r, c

    def is_hole(self, xy, width: float, height: float) -> np.ndarray:
        r, c = self.cells(xy, width, height)
        return self.holes[r, c]

    @classmethod
    def from_pgm(cls, path, edge_pruning: bool = False) -> Mask:
        # black (0) is allowed, white (max) is a hole; grey thresholds at half scale
        from PIL import Image

        with Image.open(path) as im:
            full = 255 if im.mode == "L" else 65535
            values = np.asarray(im, dtype=np.int64)
        return cls(values > full / 2, edge_pruning=edge_pruning, name=Path(path).stem)

    def to_pgm(self, path) -> None:
        rows, cols = self.holes.shape
        body = "\n".join(" ".join("1" if h else "0" for h in row) for row in self.holes)
        Path(path).write_text(f"P2\n# hbrsim mask {self.name}\n{cols} {rows}\n1\n{body}\n")


def segment_crosses_hole(p, q, mask: Mask, width: float, height: float) -> bool:
    """True iff the closed segment p-q touches any hole pixel.

    Every pixel whose closed square meets the segment is tested, so a segment
    grazing a hole corner counts as blocked.
    """
    rows, cols = mask.holes.shape
    sx, sy = cols / width, rows / height
    x0, y0 = p[0] * sx, p[1] * sy
    x1, y1 = q[0] * sx, q[1] * sy
    if x0 > x1:
        x0, y0, x1, y1 = x1, y1, x0, y0
    c_lo = max(math.ceil(x0) - 1, 0)
    c_hi = min(math.floor(x1), cols - 1)
    dx = x1 - x0
    for c in range(c_lo, c_hi + 1):
        xa, xb = max(x0, c), min(x1, c + 1)
        if dx > 0:
            ya = y0 + (y1 - y0) * (xa - x0) / dx
            yb = y0 + (y1 - y0) * (xb - x0) / dx
        else:
            ya, yb = y0, y1
        lo, hi = min(ya, yb), max(ya, yb)
        r_lo = max(math.ceil(lo) - 1, 0)
        r_hi = min(math.floor(hi), rows - 1)
        if r_hi >= r_lo and mask.holes[r_lo : r_hi + 1, c].any():
            return True
    return False


@dataclass(frozen=True)
class GenerationConfig:
    density: float
    width: float = 1000.0
    height: float = 1000.0
    radio_range: float = 50.0
    mask: Mask | None = None
    acceptance: float = 2.0 / 3.0
    seed: int = 0

    def __post_init__(self):
        if not self.density > 0:
            raise ValueError("density must be positive")
        if not 0 < self.acceptance <= 1:
            raise ValueError("acceptance fraction must lie in (0, 1]")

    @property
    def candidates(self) -> int:
        return int(round(self.density * self.width * self.height))


@dataclass(frozen=True, eq=False)
class Network:
    """Immutable unit-disk graph. Edges are stored once as ``u < v`` pairs."""

    xy: np.ndarray
    edges: np.ndarray
    radio_range: float
    width: float
    height: float
    seed: int | None = None
    config: str = ""
    # candidate index of each node in the generator's point sequence
    source_index: np.ndarray | None = None
    lengths: np.ndarray = field(init=False, repr=False)
    indptr: np.ndarray = field(init=False, repr=False)
    nbr: np.ndarray = field(init=False, repr=False)
    nbr_edge: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        xy = np.asarray(self.xy, dtype=float).reshape(-1, 2)
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        n = len(xy)
        if len(edges):
            if (edges[:, 0] == edges[:, 1]).any():
                raise ValueError("self-loop in edge list")
            edges = np.sort(edges, axis=1)
            edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
            if (np.diff(edges, axis=0) == 0).all(axis=1).any():
                raise ValueError("duplicate edge")
            if edges.min() < 0 or edges.max() >= n:
                raise ValueError("edge refers to an unknown node")
        lengths = np.hypot(*(xy[edges[:, 0]] - xy[edges[:, 1]]).T) if len(edges) else np.zeros(0)
        # CSR with both directions, neighbours ascending per row
        heads = np.concatenate([edges[:, 0], edges[:, 1]])
        tails = np.concatenate([edges[:, 1], edges[:, 0]])
        eidx = np.concatenate([np.arange(len(edges))] * 2)
        order = np.lexsort((tails, heads))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(heads, minlength=n), out=indptr[1:])
        for name, value in (
            ("xy", xy),
            ("edges", edges),
            ("lengths", lengths),
            ("indptr", indptr),
            ("nbr", tails[order]),
            ("nbr_edge", eidx[order]),
        ):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def n(self) -> int:
        return len(self.xy)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def position(self, u: int) -> Position:
        return Position(float(self.xy[u, 0]), float(self.xy[u, 1]))

    def neighbors(self, u: int) -> np.ndarray:
        return self.nbr[self.indptr[u] : self.indptr[u + 1]]

    def degree(self, u: int | None = None):
        deg = np.diff(self.indptr)
        return deg if u is None else int(deg[u])

    def edge_index(self, u: int, v: int) -> int:
        lo, hi = self.indptr[u], self.indptr[u + 1]
        i = lo + int(np.searchsorted(self.nbr[lo:hi], v))
        if i >= hi or self.nbr[i] != v:
            raise KeyError(f"nodes {u} and {v} are not adjacent")
        return int(self.nbr_edge[i])

    def distance(self, u: int, v: int) -> float:
        return float(np.hypot(*(self.xy[u] - self.xy[v])))

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        adj = csr_matrix((np.ones(len(self.nbr)), self.nbr, self.indptr), shape=(self.n, self.n))
        return connected_components(adj, directed=False)[0] == 1

    @classmethod
    def from_edges(cls, xy, edges, radio_range: float | None = None, width=None, height=None) -> Network:
        """Build a fixture network. Radio range defaults to the longest edge."""
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        net_edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if radio_range is None:
            d = np.hypot(*(xy[net_edges[:, 0]] - xy[net_edges[:, 1]]).T) if len(net_edges) else [0.0]
            radio_range = float(max(max(d), 1.0))
        width = float(xy[:, 0].max(initial=0.0)) if width is None else width
        height = float(xy[:, 1].max(initial=0.0)) if height is None else height
        return cls(xy, net_edges, float(radio_range), width, height)

    # plain-text serialisation ------------------------------------------------

    def dumps(self) -> str:
        out = io.StringIO()
        out.write(f"# hbrsim network v{FORMAT_VERSION}\n")
        out.write(f"# seed {self.seed}\n")
        out.write(f"# config {self.config}\n")
        out.write(f"radio_range {self.radio_range!r}\n")
        out.write(f"field {self.width!r} {self.height!r}\n")
        out.write(f"nodes {self.n}\n")
        for i, (x, y) in enumerate(self.xy.tolist()):
            out.write(f"{i} {x!r} {y!r}\n")
        out.write(f"edges {self.num_edges}\n")
        for u, v in self.edges.tolist():
            out.write(f"{u} {v}\n")
        return out.getvalue()

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text: str) -> Network:
        lines = text.splitlines()
        if not lines or not lines[0].startswith("# hbrsim network v"):
            raise ValueError("not an hbrsim network file")
        version = int(lines[0].rsplit("v", 1)[1])
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported network format version {version}")
        seed, config = None, ""
        body = []
        for line in lines[1:]:
            if line.startswith("# seed "):
                seed = None if line[7:] == "None" else int(line[7:])
            elif line.startswith("# config "):
                config = line[9:]
            elif line.strip() and not line.startswith("#"):
                body.append(line.split())
        it = iter(body)
        radio_range = float(next(it)[1])
        _, w, h = next(it)
        n = int(next(it)[1])
        xy = np.empty((n, 2))
        for _ in range(n):
            i, x, y = next(it)
            xy[int(i)] = float(x), float(y)
        m = int(next(it)[1])
        edges = np.array([[int(a), int(b)] for a, b in (next(it) for _ in range(m))], dtype=np.int64)
        return cls(xy, edges.reshape(-1, 2), radio_range, float(w), float(h), seed=seed, config=config)

    @classmethod
    def load(cls, path) -> Network:
        return cls.loads(Path(path).read_text())


def candidate_positions(cfg: GenerationConfig) -> np.ndarray:
    """The generator's raw point sequence for ``cfg.seed`` (before masking)."""
    n = cfg.candidates
    if n < 1:
        raise ValueError("configuration places no nodes (density * area rounds to 0)")
    rng = np.random.default_rng(cfg.seed)
    return rng.uniform((0.0, 0.0), (cfg.width, cfg.height), size=(n, 2))


def describe(cfg: GenerationConfig) -> str:
    mask = "none" if cfg.mask is None else (cfg.mask.name or "custom") + (
        "+pruning" if cfg.mask.edge_pruning else ""
    )
    return (
        f"density={cfg.density!r} width={cfg.width!r} height={cfg.height!r} "
        f"radio_range={cfg.radio_range!r} acceptance={cfg.acceptance!r} mask={mask}"
    )


def unit_disk_edges(xy: np.ndarray, radio_range: float) -> np.ndarray:
    if len(xy) < 2:
        return np.zeros((0, 2), dtype=np.int64)
    pairs = cKDTree(xy).query_pairs(radio_range, output_type="ndarray")
    pairs = np.sort(pairs.astype(np.int64), axis=1)
    return pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]


def generate_network(cfg: GenerationConfig) -> Network:
    """Place nodes, connect everything within radio range, keep the giant component.

    Raises GenerationRejected when the largest component holds fewer than
    ``cfg.acceptance`` of the placed nodes; the caller picks a new seed.
    """
    xy = candidate_positions(cfg)
    keep = np.arange(len(xy))
    if cfg.mask is not None:
        # no resampling of points that land in a hole
        keep = keep[~cfg.mask.is_hole(xy, cfg.width, cfg.height)]
    pts = xy[keep]
    if len(pts) == 0:
        raise GenerationRejected("no node landed on an allowed mask pixel")
    edges = unit_disk_edges(pts, cfg.radio_range)
    if cfg.mask is not None and cfg.mask.edge_pruning and len(edges):
        visible = [
            not segment_crosses_hole(pts[u], pts[v], cfg.mask, cfg.width, cfg.height)
            for u, v in edges.tolist()
        ]
        edges = edges[np.asarray(visible, dtype=bool)]

    n = len(pts)
    adj = csr_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(n, n))
    ncomp, labels = connected_components(adj, directed=False)
    sizes = np.bincount(labels, minlength=ncomp)
    giant = int(np.argmax(sizes))  # lowest label among the largest, i.e. holds the smallest index
    if sizes[giant] < cfg.acceptance * n:
        raise GenerationRejected(
            f"largest component has {sizes[giant]} of {n} nodes (< {cfg.acceptance:.3f})"
        )
    members = np.flatnonzero(labels == giant)
    relabel = np.full(n, -1, dtype=np.int64)
    relabel[members] = np.arange(len(members))
    sub = edges[(relabel[edges[:, 0]] >= 0) & (relabel[edges[:, 1]] >= 0)]
    return Network(
        pts[members],
        relabel[sub],
        cfg.radio_range,
        cfg.width,
        cfg.height,
        seed=cfg.seed,
        config=describe(cfg),
        source_index=keep[members],
    )
