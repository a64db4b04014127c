"""Transmissions spent on distance floods while building the structure.

    python scripts/run_flood.py --density 2.5 --seed 1
"""

import argparse

from hbrsim.experiment import emit, flood_study


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--density", type=float, default=2.5, help="in 1e-3 nodes/m^2")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--format", choices=("csv", "md"), default="md")
    args = ap.parse_args()

    study = flood_study(args.density / 1000, seed=args.seed)
    print(emit(study, args.format), end="")
    reference = 82205 * study.network.num_edges / 23462
    print(f"\nfirst flood / reference scaled to |E|: {study.stats.anchor / reference:.2f}")


if __name__ == "__main__":
    main()
