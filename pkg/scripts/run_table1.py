"""Uniform density sweep: protocol overheads, dead-end fractions, address sizes.

    python scripts/run_table1.py --networks 50 --routes 200 --out results/table1
"""

import argparse
from pathlib import Path

from hbrsim.cli import parse_densities
from hbrsim.experiment import ExperimentConfig, density_sweep, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--densities", type=parse_densities, default=density_sweep())
    ap.add_argument("--networks", type=int, default=50)
    ap.add_argument("--routes", type=int, default=200)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/table1", help="output prefix (.csv and .md are added)")
    args = ap.parse_args()

    cfg = ExperimentConfig(densities=args.densities, networks=args.networks, routes=args.routes,
                           seed=args.seed, workers=args.workers)
    table = run_experiment(cfg)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.with_suffix(".csv").write_text(table.to_csv())
    out.with_suffix(".md").write_text(table.to_markdown())
    print(table.to_markdown())


if __name__ == "__main__":
    main()
