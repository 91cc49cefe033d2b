"""Degree-two dimensions on the core for a handful of parameter points.

    python scripts/cohomology_table.py [--window 8 --core 4] [lam,mu,s ...]
"""

import argparse
import time

from svforms.algebra import AlgebraParams, Window
from svforms.cohomology import DIM_FIELDS, cohomology_report

DEFAULT_POINTS = ["-2,0,0", "-3,0,0", "-5,0,0", "-2,1/2,1/2", "0,1/3,0", "-1,0,0", "0,0,0"]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("points", nargs="*", default=DEFAULT_POINTS, help="lam,mu,s triples")
    ap.add_argument("--window", type=int, default=8)
    ap.add_argument("--core", type=int, default=4)
    args = ap.parse_args()
    window = Window(args.window, args.core)

    header = ["lambda", "mu", "s", *DIM_FIELDS, "gap", "stable", "secs"]
    print("\t".join(header))
    for point in args.points:
        p = AlgebraParams.from_strings(*point.split(","))
        t0 = time.perf_counter()
        rep = cohomology_report(p, window)
        cells = [str(p.lam), str(p.mu), str(p.s), *(str(rep.dims[k]) for k in DIM_FIELDS)]
        cells += [str(rep.gap), str(rep.stabilized), f"{time.perf_counter() - t0:.1f}"]
        print("\t".join(cells))


if __name__ == "__main__":
    main()
