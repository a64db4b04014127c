"""Draw HBR and GEO routes on a masked network as SVG.

    python scripts/render_example.py --mask canyon --density 2.6 -o canyon.svg
"""

import argparse

import numpy as np

from hbrsim.experiment import ExperimentConfig, accepted_network
from hbrsim.graph import WeightedGraph
from hbrsim.greedy import GEO, RecoveryStrategy, route_greedy
from hbrsim.hbr import build_hbr, route_hbr
from hbrsim.masks import load_mask
from hbrsim.render import render_route_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mask", default="canyon")
    ap.add_argument("--density", type=float, default=2.6, help="in 1e-3 nodes/m^2")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--routes", type=int, default=3)
    ap.add_argument("-o", "--out", default="routes.svg")
    args = ap.parse_args()

    mask = load_mask(args.mask)
    density = args.density / 1000
    net = accepted_network(ExperimentConfig(densities=(density,), mask=mask, seed=args.seed), density, 0)
    graph = WeightedGraph(net)
    structure = build_hbr(graph)
    rng = np.random.default_rng(args.seed)
    traces = []
    for s, t in rng.choice(net.n, size=(args.routes, 2), replace=False).tolist():
        traces.append(route_hbr(structure, s, t))
        traces.append(route_greedy(graph, s, t, GEO, RecoveryStrategy.hbr(structure)))
    with open(args.out, "w") as fh:
        fh.write(render_route_svg(net, structure, traces, mask))
    print(f"wrote {args.out}: {net.n} nodes, {len(traces)} routes")


if __name__ == "__main__":
    main()
