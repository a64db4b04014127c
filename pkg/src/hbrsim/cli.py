"""Command line entry point: ``hbrsim <command> [options]``.

Every command takes ``--config FILE`` with ``key = value`` lines (keys are
option names, with or without the leading dashes); flags given on the
command line override the file.

Exit codes: 0 success, 2 usage error, 3 network generation exhausted its
retry budget (results are still written but flagged), 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .experiment import (
    PROTOCOLS,
    ExperimentConfig,
    accepted_network,
    coarsening_study,
    density_sweep,
    emit,
    flood_study,
    run_experiment,
    sample_pairs,
)
from .geometry import GenerationRejected, Network, WeightModel
from .graph import WeightedGraph
from .greedy import RecoveryStrategy, ShortestPathRouter, route_greedy, virtual_coordinates
from .hbr import POLICIES, SPLIT_TO_SINGLETONS, build_hbr, route_hbr
from .masks import load_mask
from .render import render_route_svg
from .trace import CSV_HEADER

EXIT_OK, EXIT_USAGE, EXIT_REJECTED, EXIT_IO = 0, 2, 3, 4
BOOL_KEYS = {"keep-routes", "edge-pruning", "no-edge-pruning"}


def parse_densities(text: str) -> tuple[float, ...]:
    """``sweep`` for the standard 17-step progression, else a comma list in
    units of 1e-3 nodes/m^2 (``2.6`` means 2.6e-3)."""
    if text.strip() == "sweep":
        return density_sweep()
    return tuple(float(x) / 1000 for x in text.split(",") if x.strip())


def read_config(path) -> list[str]:
    """Turn a ``key = value`` file into argv fragments."""
    out = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"config line without '=': {raw!r}")
        key = key.strip().lstrip("-").replace("_", "-")
        value = value.strip()
        if key in BOOL_KEYS:
            if value.lower() in ("1", "true", "yes", "on"):
                out.append(f"--{key}")
            continue
        out += [f"--{key}", value]
    return out


def _add_generation(p):
    p.add_argument("--width", type=float, default=1000.0)
    p.add_argument("--height", type=float, default=1000.0)
    p.add_argument("--radio-range", type=float, default=50.0)
    p.add_argument("--acceptance", type=float, default=2.0 / 3.0)
    p.add_argument("--mask", help="builtin mask (lakes, streets, canyon) or PGM path")
    p.add_argument("--edge-pruning", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--retry-budget", type=int, default=5000)


def _add_model(p):
    p.add_argument("--model", default="energy", help="unit, energy[:a,b,c] or coarsened:k")
    p.add_argument("--policy", choices=POLICIES, default=SPLIT_TO_SINGLETONS)


def _add_output(p, formats=True):
    p.add_argument("-o", "--out", help="output file (default stdout)")
    if formats:
        p.add_argument("--format", choices=("csv", "md"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hbrsim", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; flags override it")

    p = sub.add_parser("generate", parents=[common], help="generate one accepted network")
    p.add_argument("--density", type=float, default=2.5, help="in 1e-3 nodes/m^2")
    p.add_argument("--seed", type=int, default=1)
    _add_generation(p)
    _add_output(p, formats=False)

    p = sub.add_parser("build-hbr", parents=[common], help="build and dump the HBR structure")
    p.add_argument("--network", required=True)
    _add_model(p)
    p.add_argument("--floods", help="also write per-level flood transmissions as CSV here")
    _add_output(p, formats=False)

    p = sub.add_parser("route", parents=[common], help="route packets on a saved network")
    p.add_argument("--network", required=True)
    _add_model(p)
    p.add_argument("--protocol", choices=PROTOCOLS + ("SP",), default="HBR")
    p.add_argument("--src", type=int)
    p.add_argument("--dst", type=int)
    p.add_argument("--pairs", type=int, default=10, help="random pairs when --src/--dst are not given")
    p.add_argument("--seed", type=int, default=1)
    _add_output(p, formats=False)

    for name, helptext in (("experiment", "overhead / dead-end table over densities"),
                           ("coarsen-study", "HBR overhead with coarsened weights")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--densities", type=parse_densities, default=density_sweep(),
                       help="'sweep' or comma list in 1e-3 nodes/m^2")
        p.add_argument("--networks", type=int, default=50)
        p.add_argument("--routes", type=int, default=200)
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--workers", type=int, default=1)
        _add_model(p)
        _add_generation(p)
        _add_output(p)
        if name == "experiment":
            p.add_argument("--protocols", default=",".join(PROTOCOLS))
            p.add_argument("--keep-routes", action="store_true")
            p.add_argument("--routes-out", help="per-route CSV (implies --keep-routes)")
        else:
            p.add_argument("--levels", default="16,8,4,2,1", help="k values to compare with the plain weights")

    p = sub.add_parser("flood-study", parents=[common], help="flood transmissions per address level")
    p.add_argument("--density", type=float, default=2.5, help="in 1e-3 nodes/m^2")
    p.add_argument("--seed", type=int, default=1)
    _add_model(p)
    _add_generation(p)
    _add_output(p)

    p = sub.add_parser("render", parents=[common], help="draw a network and routes as SVG")
    p.add_argument("--network", required=True)
    _add_model(p)
    p.add_argument("--mask", help="mask to shade (builtin name or PGM path)")
    p.add_argument("--route", nargs=2, type=int, action="append", metavar=("SRC", "DST"), default=[])
    p.add_argument("--protocols", default="HBR,GEO_SP")
    p.add_argument("--size", type=int, default=800)
    p.add_argument("--no-edges", action="store_true")
    _add_output(p, formats=False)
    return parser


def _write(text: str, path) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _mask(args):
    if not getattr(args, "mask", None):
        return None
    return load_mask(args.mask, getattr(args, "edge_pruning", None))


def _experiment_config(args, densities) -> ExperimentConfig:
    extra = {}
    if getattr(args, "protocols", None):
        extra["protocols"] = tuple(p for p in args.protocols.split(",") if p)
    return ExperimentConfig(
        densities=tuple(densities),
        networks=getattr(args, "networks", 1),
        routes=getattr(args, "routes", 1),
        model=WeightModel.parse(getattr(args, "model", "energy")),
        mask=_mask(args),
        seed=args.seed,
        width=args.width,
        height=args.height,
        radio_range=args.radio_range,
        acceptance=args.acceptance,
        policy=getattr(args, "policy", SPLIT_TO_SINGLETONS),
        retry_budget=args.retry_budget,
        workers=getattr(args, "workers", 1),
        keep_routes=bool(getattr(args, "keep_routes", False) or getattr(args, "routes_out", None)),
        **extra,
    )


def cmd_generate(args) -> int:
    density = args.density / 1000
    cfg = _experiment_config(args, [density])
    net = accepted_network(cfg, density, 0)
    if net is None:
        print("generation rejected within the retry budget", file=sys.stderr)
        return EXIT_REJECTED
    _write(net.dumps(), args.out)
    return EXIT_OK


def _graph(args) -> WeightedGraph:
    try:
        net = Network.load(args.network)
    except ValueError as exc:
        raise OSError(f"cannot read network {args.network}: {exc}") from exc
    return WeightedGraph(net, WeightModel.parse(args.model))


def cmd_build_hbr(args) -> int:
    graph = _graph(args)
    structure = build_hbr(graph, args.policy, count_floods=bool(args.floods))
    if args.floods:
        Path(args.floods).write_text(structure.flood_stats.to_csv())
    _write(structure.dump(), args.out)
    return EXIT_OK


def _route_all(graph, protocols, pairs, policy=SPLIT_TO_SINGLETONS):
    structure = build_hbr(graph, policy)
    router = ShortestPathRouter(graph)
    coords = virtual_coordinates(graph) if any(p.startswith("LMR") for p in protocols) else None
    recover = {"SP": RecoveryStrategy.shortest_path(graph, router), "HBR": RecoveryStrategy.hbr(structure)}
    out = []
    for s, t in pairs:
        for proto in protocols:
            if proto == "HBR":
                out.append(route_hbr(structure, s, t))
            elif proto == "SP":
                out.append(router.route(s, t))
            else:
                kind, rec = proto.split("_")
                out.append(route_greedy(graph, s, t, kind, recover[rec], coords))
    return structure, out


def cmd_route(args) -> int:
    graph = _graph(args)
    if args.src is not None or args.dst is not None:
        if args.src is None or args.dst is None:
            raise SystemExit("--src and --dst go together")
        pairs = [(args.src, args.dst)]
    else:
        pairs = sample_pairs(graph.n, args.pairs, np.random.default_rng(args.seed))
    _, traces = _route_all(graph, [args.protocol], pairs, args.policy)
    _write("\n".join([CSV_HEADER] + [t.csv_row() for t in traces]) + "\n", args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = _experiment_config(args, args.densities)
    table = run_experiment(cfg)
    _write(emit(table, args.format), args.out)
    if args.routes_out:
        Path(args.routes_out).write_text(table.routes_csv())
    if table.flagged:
        print("some networks were rejected within the retry budget; rows marked", file=sys.stderr)
        return EXIT_REJECTED
    return EXIT_OK


def cmd_coarsen_study(args) -> int:
    cfg = _experiment_config(args, args.densities)
    ks = tuple(int(k) for k in args.levels.split(",") if k)
    table = coarsening_study(cfg, ks)
    _write(emit(table, args.format), args.out)
    return EXIT_OK


def cmd_flood_study(args) -> int:
    try:
        study = flood_study(
            args.density / 1000, args.seed, WeightModel.parse(args.model),
            width=args.width, height=args.height, radio_range=args.radio_range,
            acceptance=args.acceptance, mask=_mask(args), retry_budget=args.retry_budget,
            policy=args.policy,
        )
    except GenerationRejected as exc:
        print(exc, file=sys.stderr)
        return EXIT_REJECTED
    _write(emit(study, args.format), args.out)
    return EXIT_OK


def cmd_render(args) -> int:
    graph = _graph(args)
    protocols = [p for p in args.protocols.split(",") if p]
    structure, traces = _route_all(graph, protocols, [tuple(r) for r in args.route], args.policy)
    mask = load_mask(args.mask) if args.mask else None
    svg = render_route_svg(graph.network, structure, traces, mask, size=args.size, edges=not args.no_edges)
    _write(svg, args.out)
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "build-hbr": cmd_build_hbr,
    "route": cmd_route,
    "experiment": cmd_experiment,
    "coarsen-study": cmd_coarsen_study,
    "flood-study": cmd_flood_study,
    "render": cmd_render,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            at = argv.index(args.command) + 1
            args = parser.parse_args(argv[:at] + read_config(args.config) + argv[at:])
        return COMMANDS[args.command](args)
    except OSError as exc:
        print(f"hbrsim: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"hbrsim: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
