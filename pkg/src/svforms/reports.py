"""Canonical JSON/CSV emission and the per-point sweep runner."""

from __future__ import annotations

import csv
import io
import json
from typing import Any, Iterable, Optional, Sequence

from .algebra import AlgebraParams, Window, format_rational
from .cohomology import DIM_FIELDS, CohomologyReport, cohomology_report
from .invsolver import DiscrepancyReport, compare_with_classification, solve_invariant_forms

SWEEP_COLUMNS = (
    "lambda",
    "mu",
    "s",
    "M",
    "C",
    "dim_solver",
    "dim_printed",
    "dim_lemma",
    "stabilized",
    "match",
    "h2",
    "hl2",
    "xi_image",
)


def to_jsonable(obj: Any) -> Any:
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    return obj


def emit_json(obj: Any) -> bytes:
    return (json.dumps(to_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=True) + "\n").encode()


def emit_csv(rows: Iterable[dict], columns: Sequence[str] = SWEEP_COLUMNS) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue().encode()


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def match_label(report: DiscrepancyReport, conventions: Sequence[str] = ("printed", "lemma")) -> str:
    hits = [c for c in ("printed", "lemma") if c in conventions and getattr(report, f"match_{c}")]
    return "+".join(hits) if hits else "none"


def sweep_row(
    report: DiscrepancyReport,
    coh: Optional[CohomologyReport] = None,
    conventions: Sequence[str] = ("printed", "lemma"),
    stabilized: Optional[bool] = None,
) -> dict:
    p = report.params
    row = {
        "lambda": format_rational(p.lam),
        "mu": format_rational(p.mu),
        "s": str(p.s),
        "M": report.window.bound,
        "C": report.window.core,
        "dim_solver": report.solver_dim,
        "dim_printed": report.printed_dim,
        "dim_lemma": report.lemma_dim,
        "stabilized": True if stabilized is None else stabilized,
        "match": match_label(report, conventions),
        "h2": None,
        "hl2": None,
        "xi_image": None,
    }
    if coh is not None:
        row.update(h2=coh.dims["h2_core"], hl2=coh.dims["hl2_core"], xi_image=coh.dims["xi_image_dim"])
        row["stabilized"] = row["stabilized"] and coh.stabilized
    return row


def emit_report(report: Any, fmt: str = "json") -> bytes:
    """Serialize a report canonically: sorted keys, rationals as ``p/q``."""
    if fmt == "json":
        return emit_json(report)
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(report, DiscrepancyReport):
        return emit_csv([sweep_row(report)])
    if isinstance(report, CohomologyReport):
        cols = ("lambda", "mu", "s", "M", "C") + DIM_FIELDS + ("stabilized", "gap")
        row = {**_param_cells(report.params, report.window), **report.dims, "stabilized": report.stabilized, "gap": report.gap}
        return emit_csv([row], cols)
    if isinstance(report, list):
        return emit_csv(report)
    raise TypeError(f"no CSV layout for {type(report).__name__}")


def _param_cells(p: AlgebraParams, w: Window) -> dict:
    return {"lambda": format_rational(p.lam), "mu": format_rational(p.mu), "s": str(p.s), "M": w.bound, "C": w.core}


def run_point(
    params: AlgebraParams,
    window: Window,
    conventions: Sequence[str] = ("printed", "lemma"),
    cohomology: bool = False,
    weight_filter: bool = True,
) -> dict:
    """One sweep row; an unstabilized solve is reported, not raised."""
    sol = solve_invariant_forms(params, window, weight_filter)
    report = compare_with_classification(sol, params, allow_unstable=True)
    coh = cohomology_report(params, window) if cohomology else None
    return sweep_row(report, coh, conventions, sol.stabilized)
