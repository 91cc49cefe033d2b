"""Solve the invariance system over a parameter grid and summarize agreement.

    python scripts/sweep_grid.py --config scripts/grid.json --jobs 4 --out sweep.csv
"""

import argparse
import collections
import json
from pathlib import Path

from svforms.cli import SweepConfig, run_sweep
from svforms.reports import emit_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=str(Path(__file__).with_name("grid.json")))
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--cohomology", action="store_true", help="also compute h2/hl2/xi columns (slow)")
    ap.add_argument("--out", default="sweep.csv")
    args = ap.parse_args()

    cfg = SweepConfig.from_dict(json.loads(Path(args.config).read_text()))
    cfg.cohomology = cfg.cohomology or args.cohomology
    rows = run_sweep(cfg, args.jobs)
    Path(args.out).write_bytes(emit_csv(rows))

    by_match = collections.Counter(r["match"] for r in rows)
    unstable = [r for r in rows if not r["stabilized"]]
    print(f"{len(rows)} points at M={cfg.window.bound}, C={cfg.window.core} -> {args.out}")
    for label, n in sorted(by_match.items()):
        print(f"  match={label:<14} {n}")
    print(f"  unstabilized      {len(unstable)}")
    for r in rows:
        if r["match"] != "printed+lemma":
            print(f"  lambda={r['lambda']:>2} mu={r['mu']:>4} s={r['s']:>3}: solver {r['dim_solver']}, "
                  f"printed {r['dim_printed']}, lemma {r['dim_lemma']} ({r['match']})")


if __name__ == "__main__":
    main()
