"""List every grid point where the printed classification disagrees with the solver.

For each disagreement the minimal violated triple (if the printed form is not
invariant) and the solver generator's support are shown. The printed
degree-two representatives are also checked against the cocycle identity.

    python scripts/audit_printed.py [--window 8 --core 4]
"""

import argparse

from svforms.algebra import Window
from svforms.cohomology import audit_printed_chi
from svforms.invsolver import compare_with_classification, fixture_grid, solve_invariant_forms


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--window", type=int, default=8)
    ap.add_argument("--core", type=int, default=4)
    args = ap.parse_args()
    window = Window(args.window, args.core)

    seen_chi = set()
    for p in fixture_grid():
        rep = compare_with_classification(solve_invariant_forms(p, window), allow_unstable=True)
        if rep.match_printed:
            continue
        print(f"{p}: printed {rep.printed_tag} dim {rep.printed_dim} | lemma {rep.lemma_tag} | solver dim {rep.solver_dim}")
        for w in rep.witnesses:
            if w["kind"] == "violated_triple":
                t = w["witness"]
                print(f"    {w['convention']}: fails at {', '.join(t['triple'])} with residual {t['residual']}")
            else:
                support = [(e["a"], e["b"], e["val"]) for e in w["witness"]["form"]["entries"]]
                print(f"    {w['convention']}: solver generator outside span, support {support[:4]}")
        key = (p.lam, p.mu_in_s_shifted)
        if key not in seen_chi:
            seen_chi.add(key)
            chi = audit_printed_chi(p, Window(args.core * 2, args.core))
            if chi:
                for reading, res in chi.items():
                    print(f"    chi ({reading}): {res['violations']} cocycle residuals, first {res['witness']}")


if __name__ == "__main__":
    main()
