"""Command-line front end.

Exit codes: 0 success, 1 verification mismatch, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .algebra import (
    AlgebraParams,
    Element,
    Window,
    bracket,
    format_rational,
    parse_basis_element,
)
from .cohomology import cohomology_report
from .errors import SVFormsError
from .forms import (
    BilinearForm,
    Convention,
    FamilyTag,
    classify,
    closed_form,
    invariance_violations,
    minimal_violation,
    radical_basis,
)
from .invsolver import compare_with_classification, lemma_suite, solve_invariant_forms, triple_witness
from .reports import emit_csv, emit_json, emit_report, run_point, sweep_row


class UsageError(Exception):
    pass


@dataclass
class SweepConfig:
    points: list[AlgebraParams]
    window: Window
    conventions: tuple[str, ...] = ("printed", "lemma")
    cohomology: bool = False
    out: Optional[str] = None
    weight_filter: bool = True

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        pts = []
        for p in d.get("points", []):
            pts.append(AlgebraParams.from_strings(p["lambda"], p["mu"], p.get("s", "0")))
        grid = d.get("grid")
        if grid:
            for lam in grid["lambda"]:
                for mu in grid["mu"]:
                    for s in grid.get("s", ["0"]):
                        pts.append(AlgebraParams.from_strings(lam, mu, s))
        M, C = int(d.get("window", 8)), int(d.get("core", 4))
        if M < 2 * C:
            raise UsageError(f"window M={M} must be at least 2*C={2 * C}")
        conventions = tuple(d.get("conventions", ("printed", "lemma")))
        for c in conventions:
            Convention(c)
        return cls(pts, Window(M, C), conventions, bool(d.get("cohomology", False)), d.get("out"), d.get("weight_filter", True))


def _sweep_task(args: tuple) -> dict:
    params, window, conventions, coh, wf = args
    return run_point(params, window, conventions, coh, wf)


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> list[dict]:
    """Rows in config order regardless of completion order."""
    tasks = [(p, cfg.window, cfg.conventions, cfg.cohomology, cfg.weight_filter) for p in cfg.points]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_sweep_task, tasks))
    return [_sweep_task(t) for t in tasks]


def _params(ns: argparse.Namespace) -> AlgebraParams:
    if ns.lam is None or ns.mu is None:
        raise UsageError("--lambda and --mu are required")
    return AlgebraParams.from_strings(ns.lam, ns.mu, ns.s)


def _window(ns: argparse.Namespace) -> Window:
    if ns.window < 2 * ns.core:
        raise UsageError(f"--window {ns.window} must be at least 2 * --core {ns.core}")
    return Window(ns.window, ns.core)


def _form(ns: argparse.Namespace, params: AlgebraParams, window: Window) -> tuple[BilinearForm, str]:
    if getattr(ns, "form", None):
        form = BilinearForm.from_dict(json.loads(Path(ns.form).read_text()))
        return form, f"file:{ns.form}"
    if getattr(ns, "tag", None):
        return closed_form(params, FamilyTag(ns.tag), window), ns.tag
    res = classify(params, ns.convention or "lemma", window)
    return (res.generator or BilinearForm(params)), res.tag.value


def _write(ns: argparse.Namespace, data: bytes) -> None:
    if ns.out:
        Path(ns.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def cmd_bracket(ns) -> int:
    params = _params(ns)
    x = parse_basis_element(ns.x, params)
    y = parse_basis_element(ns.y, params)
    res = bracket(params, Element.basis(x), Element.basis(y))
    if ns.format == "json":
        body = {
            "params": params.to_dict(),
            "x": str(x),
            "y": str(y),
            "result": [{"element": str(b), "coeff": format_rational(c)} for b, c in res.items()],
        }
        _write(ns, emit_json(body))
    else:
        _write(ns, (str(res) + "\n").encode())
    return 0


def _discrepancy(params: AlgebraParams, window: Window, convention: Convention) -> Optional[dict]:
    other = Convention.LEMMA if convention is Convention.PRINTED else Convention.PRINTED
    mine, theirs = classify(params, convention, window), classify(params, other, window)
    if mine.dimension == theirs.dimension and mine.tag == theirs.tag:
        return None
    out = {"other_convention": other.value, "other_dimension": theirs.dimension, "other_tag": theirs.tag.value}
    for res in (mine, theirs):
        if res.generator is not None:
            v = minimal_violation(invariance_violations(params, res.generator, window))
            if v is not None:
                out["witness"] = {"convention": res.convention.value, **triple_witness(v)}
                break
    return out


def cmd_classify(ns) -> int:
    params, window = _params(ns), _window(ns)
    conv = Convention(ns.convention or "printed")
    res = classify(params, conv, window)
    body = {"params": params.to_dict(), "window": {"M": window.bound, "C": window.core}, **res.to_dict()}
    body["discrepancy"] = _discrepancy(params, window, conv)
    _write(ns, emit_json(body))
    return 0


def cmd_closed_form(ns) -> int:
    params, window = _params(ns), _window(ns)
    tag = ns.tag or classify(params, ns.convention or "lemma").tag.value
    _write(ns, emit_json(closed_form(params, FamilyTag(tag), window)))
    return 0


def cmd_check_invariance(ns) -> int:
    params, window = _params(ns), _window(ns)
    form, label = _form(ns, params, window)
    viol = invariance_violations(params, form, window)
    w = minimal_violation(viol)
    body = {
        "params": params.to_dict(),
        "window": {"M": window.bound, "C": window.core},
        "form": label,
        "invariant": not viol,
        "violation_count": len(viol),
        "witness": None if w is None else triple_witness(w),
        "violations": [triple_witness(v) for v in viol],
    }
    _write(ns, emit_json(body))
    return 1 if viol else 0


def cmd_radical(ns) -> int:
    params, window = _params(ns), _window(ns)
    form, label = _form(ns, params, window)
    rad = radical_basis(form, window)
    body = {
        "params": params.to_dict(),
        "window": {"M": window.bound, "C": window.core},
        "form": label,
        "dimension": len(rad),
        "basis": [str(v) for v in rad],
    }
    _write(ns, emit_json(body))
    return 0


def cmd_solve_inv(ns) -> int:
    params, window = _params(ns), _window(ns)
    sol = solve_invariant_forms(params, window, ns.weight_filter == "on")
    report = compare_with_classification(sol, params, allow_unstable=True)
    if ns.format == "csv":
        _write(ns, emit_csv([sweep_row(report, stabilized=sol.stabilized)]))
    else:
        body = report.to_dict()
        body["stabilized"] = sol.stabilized
        body["lemmas"] = lemma_suite(params, sol) if sol.stabilized else None
        _write(ns, emit_json(body))
    return 0 if sol.stabilized else 1


def cmd_cohomology(ns) -> int:
    params, window = _params(ns), _window(ns)
    rep = cohomology_report(params, window)
    _write(ns, emit_report(rep, ns.format or "json"))
    return 0 if rep.stabilized else 1


def cmd_sweep(ns) -> int:
    if not ns.config:
        raise UsageError("sweep needs --config PATH")
    try:
        cfg = SweepConfig.from_dict(json.loads(Path(ns.config).read_text()))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise UsageError(f"bad sweep config {ns.config}: {exc}") from None
    if ns.out is None and cfg.out:
        ns.out = cfg.out
    rows = run_sweep(cfg, ns.jobs)
    _write(ns, emit_json(rows) if ns.format == "json" else emit_csv(rows))
    return 0


COMMANDS = {
    "bracket": cmd_bracket,
    "classify": cmd_classify,
    "closed-form": cmd_closed_form,
    "check-invariance": cmd_check_invariance,
    "radical": cmd_radical,
    "solve-inv": cmd_solve_inv,
    "cohomology": cmd_cohomology,
    "sweep": cmd_sweep,
}


COMMAND_HELP = {
    "bracket": "bracket of two basis elements",
    "classify": "closed-form dimension and generator under one convention",
    "closed-form": "closed-form generator for a family tag on the window",
    "check-invariance": "verify invariance of a tagged or file-supplied form",
    "radical": "radical of a form restricted to the window",
    "solve-inv": "solve the truncated invariance system and compare",
    "cohomology": "degree-two cohomology dimensions on the core",
    "sweep": "run solve-inv (and optionally cohomology) over a config grid",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lam", help="rational, e.g. -2 or 1/3")
    common.add_argument("--mu", help="rational")
    common.add_argument("--s", default="0", choices=["0", "1/2"])
    common.add_argument("--window", type=int, default=8, metavar="M")
    common.add_argument("--core", type=int, default=4, metavar="C")
    common.add_argument("--convention", choices=[c.value for c in Convention])
    common.add_argument("--tag", choices=[t.value for t in FamilyTag])
    common.add_argument("--form", metavar="PATH", help="BilinearForm JSON file")
    common.add_argument("--weight-filter", choices=["on", "off"], default="on")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--jobs", type=int, default=1)

    parser = argparse.ArgumentParser(prog="svforms", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("bracket", parents=[common], help=COMMAND_HELP["bracket"])
    p.add_argument("x")
    p.add_argument("y")
    for name in COMMANDS:
        if name != "bracket":
            sub.add_parser(name, parents=[common], help=COMMAND_HELP[name])
    return parser


def execute_command(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if ns.format is None and ns.command in ("sweep",):
        ns.format = "csv"
    try:
        return COMMANDS[ns.command](ns)
    except (UsageError, SVFormsError, ValueError) as exc:
        print(f"svforms {ns.command}: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(execute_command())


__all__ = ["SweepConfig", "execute_command", "main", "run_sweep"]
