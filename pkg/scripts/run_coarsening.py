"""HBR overhead when the structure is built on coarsened weights.

    python scripts/run_coarsening.py --networks 50 --routes 200 --format md
"""

import argparse

from hbrsim.cli import parse_densities
from hbrsim.experiment import ExperimentConfig, coarsening_study, density_sweep, emit


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--densities", type=parse_densities, default=density_sweep())
    ap.add_argument("--networks", type=int, default=50)
    ap.add_argument("--routes", type=int, default=200)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--levels", default="16,8,4,2,1")
    ap.add_argument("--format", choices=("csv", "md"), default="md")
    ap.add_argument("--out")
    args = ap.parse_args()

    cfg = ExperimentConfig(densities=args.densities, networks=args.networks, routes=args.routes,
                           seed=args.seed, workers=args.workers)
    table = coarsening_study(cfg, tuple(int(k) for k in args.levels.split(",")))
    print(emit(table, args.format, args.out), end="")


if __name__ == "__main__":
    main()
