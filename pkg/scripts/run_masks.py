"""Obstacle masks: does stand-alone HBR beat GEO with shortest-path recovery
once most routes hit a dead-end?

    python scripts/run_masks.py --networks 10 --routes 200
"""

import argparse

from hbrsim.experiment import ExperimentConfig, density_sweep, run_experiment
from hbrsim.masks import BUILTIN, load_mask

SWEEP = density_sweep()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--masks", default=",".join(sorted(BUILTIN)), help="builtin names or PGM paths")
    ap.add_argument("--densities", default="0,4,9,12,16", help="indices into the standard sweep")
    ap.add_argument("--networks", type=int, default=10)
    ap.add_argument("--routes", type=int, default=200)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    densities = tuple(SWEEP[int(i)] for i in args.densities.split(","))
    print("mask,delta,n,gamma_geo,hbr,geo_sp,geo_hbr,flagged")
    for name in args.masks.split(","):
        cfg = ExperimentConfig(densities=densities, networks=args.networks, routes=args.routes, seed=args.seed,
                               mask=load_mask(name), protocols=("HBR", "GEO_SP", "GEO_HBR"), workers=args.workers)
        for row in run_experiment(cfg).rows:
            o = row.overhead
            print(f"{name},{row.label},{row.n:.0f},{row.gamma_geo:.1f},{o['HBR']:.2f},{o['GEO_SP']:.2f},"
                  f"{o['GEO_HBR']:.2f},{int(row.flagged)}", flush=True)


if __name__ == "__main__":
    main()
