"""Multi-start search for the super-eight at the default settings.

Writes the best orbit to ``super_eight.json`` and prints the basin census and
the residual report of the winner.
"""
import argparse
import logging

from supereight.minimizer import RunConfig, minimize
from supereight.orbitio import StoredOrbit, write_orbit
from supereight.verify import residual_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=32)
    ap.add_argument("--m", type=int, default=2048)
    ap.add_argument("--seeds", type=int, default=8)
    ap.add_argument("--output", default="super_eight.json")
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)

    cfg = RunConfig(seeds=tuple(range(args.seeds)), k=args.k, m=args.m)
    report = minimize(cfg)
    for r in report.results:
        print(f"seed {r.seed}: {r.status:<24} J = {r.action.total:.12f}  min_sep = {r.min_separation:.4f}")
    print("\nbasins (action, seeds):")
    for action, seeds in report.basins:
        print(f"  {action:.12f}  {seeds}")
    best = report.best
    write_orbit(args.output, StoredOrbit.from_result(best, cfg.m))
    print(f"\nbest seed {best.seed} written to {args.output}")
    for key, value in residual_report(best).as_dict().items():
        print(f"  {key:<15} {value:.3e}")


if __name__ == "__main__":
    main()
