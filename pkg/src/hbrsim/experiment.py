"""Density sweeps: overhead of every protocol against the shortest-path
baseline, dead-end fractions and address statistics.

Seeding: every random stream is ``numpy`` PCG64 fed by
``SeedSequence(master, spawn_key=(density_key, network_index, stream, attempt))``
where ``density_key = round(density * 1e12)``, stream 0 places nodes and
stream 1 samples route endpoints.  Results therefore depend only on the
config and master seed, never on worker count or task order.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .geometry import GenerationConfig, GenerationRejected, Mask, Network, WeightModel, generate_network
from .graph import WeightedGraph
from .greedy import GEO, LMR, RecoveryStrategy, ShortestPathRouter, route_greedy, virtual_coordinates
from .hbr import SPLIT_TO_SINGLETONS, build_hbr, route_hbr
from .trace import CSV_HEADER

PROTOCOLS = ("HBR", "LMR_SP", "LMR_HBR", "GEO_SP", "GEO_HBR")
CSV_COLUMNS = "delta,protocol,overhead_pct,n,alpha_len,id_len,gamma_lmr,gamma_geo"
PLACEMENT, ROUTES = 0, 1


def density_sweep(start: float = 0.5e-3, factor: float = 1.2, end: float = 9.2e-3) -> tuple[float, ...]:
    """Geometric progression; the end point is compared at label precision."""
    out, k = [], 0
    while round(start * factor**k * 1e3, 1) <= round(end * 1e3, 1) + 1e-9:
        out.append(start * factor**k)
        k += 1
    return tuple(out)


def density_label(density: float) -> str:
    return f"{density * 1e3:.1f}"


def seed_for(master: int, density: float, network: int, stream: int, attempt: int = 0) -> int:
    key = (int(round(density * 1e12)), network, stream, attempt)
    return int(np.random.SeedSequence(master, spawn_key=key).generate_state(1, np.uint64)[0])


def overhead(total_cost_alg: float, total_cost_sp: float) -> float:
    """Aggregate overhead in percent."""
    if total_cost_sp <= 0:
        raise ValueError("shortest-path cost must be positive")
    return 100.0 * (total_cost_alg - total_cost_sp) / total_cost_sp


@dataclass(frozen=True)
class ExperimentConfig:
    densities: tuple[float, ...] = field(default_factory=density_sweep)
    networks: int = 50
    routes: int = 200
    protocols: tuple[str, ...] = PROTOCOLS
    model: WeightModel = field(default_factory=WeightModel.energy)
    mask: Mask | None = None
    seed: int = 1
    width: float = 1000.0
    height: float = 1000.0
    radio_range: float = 50.0
    acceptance: float = 2.0 / 3.0
    policy: str = SPLIT_TO_SINGLETONS
    retry_budget: int = 5000
    workers: int = 1
    keep_routes: bool = False

    def __post_init__(self):
        if self.networks < 1 or self.routes < 1:
            raise ValueError("network and route counts must be >= 1")
        if any(b <= a for a, b in zip(self.densities, self.densities[1:])):
            raise ValueError("density list must be strictly increasing")
        unknown = set(self.protocols) - set(PROTOCOLS)
        if unknown:
            raise ValueError(f"unknown protocols {sorted(unknown)}")

    def generation(self, density: float, seed: int) -> GenerationConfig:
        return GenerationConfig(
            density, self.width, self.height, self.radio_range, self.mask, self.acceptance, seed
        )


@dataclass
class NetworkResult:
    density: float
    index: int
    seed: int = 0
    rejected: bool = False
    n: int = 0
    edges: int = 0
    alpha_max: int = 0
    alpha_mean: float = 0.0
    sp_cost: float = 0.0
    costs: dict[str, float] = field(default_factory=dict)
    routes: int = 0
    dead_geo: int = 0
    dead_lmr: int = 0
    undelivered: int = 0
    records: list[str] = field(default_factory=list)


def accepted_network(cfg: ExperimentConfig, density: float, index: int) -> Network | None:
    for attempt in range(cfg.retry_budget):
        seed = seed_for(cfg.seed, density, index, PLACEMENT, attempt)
        try:
            return generate_network(cfg.generation(density, seed))
        except GenerationRejected:
            continue
    return None


def sample_pairs(n: int, count: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    pairs = []
    for _ in range(count):
        s = int(rng.integers(n))
        t = int(rng.integers(n - 1))
        pairs.append((s, t + (t >= s)))
    return pairs


def evaluate_network(cfg: ExperimentConfig, density: float, index: int) -> NetworkResult:
    res = NetworkResult(density, index)
    net = accepted_network(cfg, density, index)
    if net is None:
        res.rejected = True
        return res
    res.seed, res.n, res.edges = net.seed, net.n, net.num_edges
    graph = WeightedGraph(net, cfg.model)
    structure = build_hbr(graph, cfg.policy)
    res.alpha_max = structure.max_address_length
    res.alpha_mean = structure.mean_address_length
    coords = virtual_coordinates(graph)
    router = ShortestPathRouter(graph)
    recover = {"SP": RecoveryStrategy.shortest_path(graph, router), "HBR": RecoveryStrategy.hbr(structure)}
    rng = np.random.default_rng(seed_for(cfg.seed, density, index, ROUTES))
    pairs = sample_pairs(net.n, cfg.routes, rng)
    router.prefetch(t for _, t in pairs)
    res.costs = {p: 0.0 for p in cfg.protocols}
    for s, t in pairs:
        res.sp_cost += router.distance(s, t)
        dead = {}
        for proto in cfg.protocols:
            if proto == "HBR":
                trace = route_hbr(structure, s, t)
            else:
                kind, rec = proto.split("_")
                trace = route_greedy(graph, s, t, kind, recover[rec], coords)
                dead[kind] = trace.hit_dead_end
            res.costs[proto] += trace.cost
            res.undelivered += not trace.delivered
            if cfg.keep_routes:
                res.records.append(trace.csv_row())
        for kind in (GEO, LMR):
            if kind not in dead:
                dead[kind] = route_greedy(graph, s, t, kind, None, coords, stop_at_dead_end=True).hit_dead_end
        res.dead_geo += dead[GEO]
        res.dead_lmr += dead[LMR]
        res.routes += 1
    return res


@dataclass
class DensityRow:
    density: float
    networks: int
    n: float
    alpha_len: float  # mean over networks of the longest address
    alpha_mean: float  # mean over networks of the per-node average
    id_len: int
    gamma_lmr: float
    gamma_geo: float
    overhead: dict[str, float]
    undelivered: int = 0
    flagged: bool = False

    @property
    def label(self) -> str:
        return density_label(self.density)


@dataclass
class ResultsTable:
    protocols: tuple[str, ...]
    rows: list[DensityRow] = field(default_factory=list)
    records: list[str] = field(default_factory=list)

    @property
    def flagged(self) -> bool:
        return any(r.flagged for r in self.rows)

    def row(self, density: float) -> DensityRow:
        return min(self.rows, key=lambda r: abs(r.density - density))

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(CSV_COLUMNS + "\n")
        for r in self.rows:
            for p in self.protocols:
                out.write(
                    f"{r.density * 1e3:.2f},{p},{_fmt(r.overhead.get(p))},{r.n:.2f},{r.alpha_len:.2f},"
                    f"{r.id_len},{r.gamma_lmr:.2f},{r.gamma_geo:.2f}\n"
                )
        return out.getvalue()

    def to_markdown(self) -> str:
        head = "| δ [10⁻³/m²] | " + " | ".join(self.protocols) + " |"
        lines = [head, "|" + "---|" * (len(self.protocols) + 1)]
        for r in self.rows:
            cells = " | ".join(_fmt(r.overhead.get(p)) for p in self.protocols)
            lines.append(f"| {r.label}{' (!)' if r.flagged else ''} | {cells} |")
        lines += ["", "| δ [10⁻³/m²] | n | \\|α\\| | \\|ID\\| | γ LMR | γ GEO |", "|---|---|---|---|---|---|"]
        for r in self.rows:
            lines.append(
                f"| {r.label} | {r.n:.0f} | {r.alpha_len:.2f} | {r.id_len} | {r.gamma_lmr:.2f} | {r.gamma_geo:.2f} |"
            )
        return "\n".join(lines) + "\n"

    def routes_csv(self) -> str:
        return "\n".join([CSV_HEADER, *self.records]) + "\n"


def _fmt(value) -> str:
    return "nan" if value is None or not math.isfinite(value) else f"{value:.2f}"


def _run_tasks(fn, cfg, tasks):
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(fn, [cfg] * len(tasks), *zip(*tasks)))
    else:
        results = [fn(cfg, *task) for task in tasks]
    return sorted(results, key=lambda r: (r.density, r.index))


def aggregate(protocols, density: float, results: list[NetworkResult]) -> DensityRow:
    ok = [r for r in results if not r.rejected]
    flagged = len(ok) < len(results)
    if not ok:
        nan = math.nan
        return DensityRow(density, 0, nan, nan, nan, 0, nan, nan, {p: nan for p in protocols}, 0, True)
    sp = sum(r.sp_cost for r in ok)
    routes = sum(r.routes for r in ok)
    n_mean = float(np.mean([r.n for r in ok]))
    return DensityRow(
        density=density,
        networks=len(ok),
        n=n_mean,
        alpha_len=float(np.mean([r.alpha_max for r in ok])),
        alpha_mean=float(np.mean([r.alpha_mean for r in ok])),
        id_len=math.ceil(math.log2(n_mean)) if n_mean > 1 else 0,
        gamma_lmr=100.0 * sum(r.dead_lmr for r in ok) / routes,
        gamma_geo=100.0 * sum(r.dead_geo for r in ok) / routes,
        overhead={p: overhead(sum(r.costs[p] for r in ok), sp) if sp > 0 else math.nan for p in protocols},
        undelivered=sum(r.undelivered for r in ok),
        flagged=flagged,
    )


def run_experiment(cfg: ExperimentConfig) -> ResultsTable:
    tasks = [(d, i) for d in cfg.densities for i in range(cfg.networks)]
    results = _run_tasks(evaluate_network, cfg, tasks)
    table = ResultsTable(tuple(cfg.protocols))
    for d in cfg.densities:
        mine = [r for r in results if r.density == d]
        table.rows.append(aggregate(cfg.protocols, d, mine))
        for r in mine:
            table.records.extend(r.records)
    return table


# weight coarsening ------------------------------------------------------------

COARSE_LEVELS = (16, 8, 4, 2, 1)


@dataclass
class CoarseningResult:
    density: float
    index: int
    rejected: bool = False
    sp_cost: dict[str, float] = field(default_factory=dict)
    hbr_cost: dict[str, float] = field(default_factory=dict)


def coarsening_models(base: WeightModel, ks=COARSE_LEVELS) -> dict[str, WeightModel]:
    models = {"w": base}
    for k in ks:
        models[f"w{k}"] = replace(base, kind="coarsened", k=int(k)) if base.kind == "energy" else WeightModel.coarsened(k)
    return models


def _coarsen_network(cfg: ExperimentConfig, density: float, index: int, ks=COARSE_LEVELS) -> CoarseningResult:
    res = CoarseningResult(density, index)
    net = accepted_network(cfg, density, index)
    if net is None:
        res.rejected = True
        return res
    rng = np.random.default_rng(seed_for(cfg.seed, density, index, ROUTES))
    pairs = sample_pairs(net.n, cfg.routes, rng)
    base = WeightedGraph(net, cfg.model)
    router = ShortestPathRouter(base)
    router.prefetch(t for _, t in pairs)
    sp = sum(router.distance(s, t) for s, t in pairs)
    for name, model in coarsening_models(cfg.model, ks).items():
        structure = build_hbr(WeightedGraph(net, model), cfg.policy)
        # routes follow the coarse structure but are paid in true weights
        res.sp_cost[name] = sp
        res.hbr_cost[name] = sum(_path_cost(base, route_hbr(structure, s, t).path) for s, t in pairs)
    return res


def _path_cost(graph: WeightedGraph, path) -> float:
    return sum(graph.weight(u, v) for u, v in zip(path, path[1:]))


@dataclass
class CoarseningTable:
    columns: tuple[str, ...]
    rows: list[tuple[float, dict[str, float]]] = field(default_factory=list)

    def overhead(self, density: float, column: str) -> float:
        return min(self.rows, key=lambda r: abs(r[0] - density))[1][column]

    def to_csv(self) -> str:
        lines = ["delta,weights,overhead_pct"]
        for d, values in self.rows:
            lines += [f"{d * 1e3:.2f},{c},{_fmt(values[c])}" for c in self.columns]
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        names = ["ω" if c == "w" else f"ω{c[1:]}" for c in self.columns]
        lines = ["| δ | " + " | ".join(names) + " |", "|" + "---|" * (len(names) + 1)]
        for d, values in self.rows:
            lines.append(f"| {density_label(d)} | " + " | ".join(_fmt(values[c]) for c in self.columns) + " |")
        return "\n".join(lines) + "\n"


def coarsening_study(cfg: ExperimentConfig, ks=COARSE_LEVELS) -> CoarseningTable:
    """HBR overhead when the structure is built on coarsened weights.

    Costs and the shortest-path baseline stay in the uncoarsened model, so
    the table shows what the coarse distances cost in real energy.
    """
    tasks = [(d, i) for d in cfg.densities for i in range(cfg.networks)]
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_coarsen_network, [cfg] * len(tasks), *zip(*tasks), [tuple(ks)] * len(tasks)))
    else:
        results = [_coarsen_network(cfg, d, i, ks) for d, i in tasks]
    columns = tuple(coarsening_models(cfg.model, ks))
    table = CoarseningTable(columns)
    for d in cfg.densities:
        ok = [r for r in results if r.density == d and not r.rejected]
        values = {}
        for c in columns:
            sp = sum(r.sp_cost[c] for r in ok)
            values[c] = overhead(sum(r.hbr_cost[c] for r in ok), sp) if sp > 0 else math.nan
        table.rows.append((d, values))
    return table


# setup flooding ----------------------------------------------------------------


@dataclass
class FloodStudy:
    network: Network
    stats: object

    def to_csv(self) -> str:
        return self.stats.to_csv()

    def to_markdown(self) -> str:
        lines = [
            f"nodes {self.network.n}, edges {self.network.num_edges}",
            "",
            "| \\|α\\| | transmissions | sub-networks |",
            "|---|---|---|",
            f"|  | {self.stats.anchor} | 1 |",
        ]
        lines += [f"| {lvl} | {t} | {s} |" for lvl, t, s in self.stats.levels]
        return "\n".join(lines) + "\n"


def flood_study(density: float = 2.5e-3, seed: int = 1, model: WeightModel | None = None, **generation) -> FloodStudy:
    cfg = ExperimentConfig(densities=(density,), networks=1, seed=seed, model=model or WeightModel.energy(), **generation)
    net = accepted_network(cfg, density, 0)
    if net is None:
        raise GenerationRejected("no acceptable network within the retry budget")
    structure = build_hbr(WeightedGraph(net, cfg.model), cfg.policy, count_floods=True)
    return FloodStudy(net, structure.flood_stats)


def emit(table, fmt: str, path=None) -> str:
    """Render ``table`` as csv or markdown; write it to ``path`` when given."""
    if fmt == "csv":
        text = table.to_csv()
    elif fmt in ("md", "markdown"):
        text = table.to_markdown()
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text
