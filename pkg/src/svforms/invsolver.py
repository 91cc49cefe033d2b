"""Brute-force reconstruction of the invariant symmetric forms on a window.

The full invariance system is assembled over unordered window pairs, its
exact kernel is computed, and the kernel is projected onto the core
``|n| <= C`` where every defining constraint among core triples is present.
Because triples leaving the window are dropped, the window kernel
over-approximates the restriction of the true space; stabilization between
``M`` and ``M + 2`` is the evidence that the core projection is exact.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional

from .algebra import (
    OUTSIDE,
    AlgebraParams,
    BasisElement,
    BracketTable,
    Mode,
    Window,
    format_rational,
)
from .errors import NotStabilizedError, WindowTooSmallError
from .forms import (
    BilinearForm,
    Convention,
    FamilyTag,
    Pair,
    classify,
    closed_form,
    invariance_violations,
    minimal_violation,
)
from .linalg import ConstraintSystem, RowReducer, SparseMatrix, nullspace_basis

FIXTURE_LAMBDAS = tuple(Fraction(x) for x in (-5, -4, -3, -2, -1, 0, 1))
FIXTURE_MUS = tuple(Fraction(x) for x in ("-1", "-1/2", "0", "1/3", "1/2", "1", "3/2"))
FIXTURE_SS = (Mode(0), Mode(1))


def fixture_grid() -> list[AlgebraParams]:
    """The 7 x 7 x 2 parameter grid, in (lambda, mu, s) order."""
    return [AlgebraParams(l, m, s) for l, m, s in itertools.product(FIXTURE_LAMBDAS, FIXTURE_MUS, FIXTURE_SS)]


def _check_window(window: Window) -> None:
    if window.bound < 2:
        raise WindowTooSmallError(f"window bound M={window.bound} is too small; need M >= 2")


def assemble_invariance_system(
    params: AlgebraParams,
    window: Window,
    weight_filter: bool = True,
    table: BracketTable | None = None,
) -> ConstraintSystem[Pair]:
    """One row ``phi([x,y],z) - phi(x,[y,z]) = 0`` per fully in-window triple.

    With ``weight_filter`` only pairs of total ad-weight zero are unknowns;
    a triple's row only touches pairs of its own total weight, so the other
    rows concern pairs that the ``(a, L_0, b)`` rows force to zero anyway.
    """
    _check_window(window)
    table = table or BracketTable(params, window)
    basis, weights, br = table.basis, table.weights, table.table
    n = len(basis)
    pairs = [(i, j) for i in range(n) for j in range(i, n) if not weight_filter or weights[i] + weights[j] == 0]
    col = {p: c for c, p in enumerate(pairs)}

    by_weight: dict[Fraction, list[int]] = defaultdict(list)
    for k, w in enumerate(weights):
        by_weight[w].append(k)

    rows: list[dict[int, Fraction]] = []
    labels: list[tuple[int, int, int]] = []
    for x in range(n):
        brx = br[x]
        for y in range(n):
            xy = brx[y]
            if xy is OUTSIDE:
                continue
            zs = by_weight.get(-(weights[x] + weights[y]), ()) if weight_filter else range(n)
            bry = br[y]
            for z in zs:
                yz = bry[z]
                if yz is OUTSIDE:
                    continue
                row: dict[int, Fraction] = {}
                if xy is not None:
                    c = col[_ordered(xy[0], z)]
                    row[c] = row.get(c, 0) + xy[1]
                if yz is not None:
                    c = col[_ordered(x, yz[0])]
                    row[c] = row.get(c, 0) - yz[1]
                row = {c: v for c, v in row.items() if v}
                if row:
                    rows.append(row)
                    labels.append((x, y, z))
    unknowns = [(basis[i], basis[j]) for i, j in pairs]
    matrix = SparseMatrix(len(rows), len(unknowns), rows)
    return ConstraintSystem(matrix, unknowns, [tuple(basis[k] for k in t) for t in labels])


def _ordered(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i <= j else (j, i)


@dataclass
class InvSolution:
    params: AlgebraParams
    window: Window
    kernel: list[BilinearForm]
    projected_basis: list[BilinearForm]
    stabilized: bool
    next_projected_dimension: Optional[int] = None
    weight_filter: bool = True

    @property
    def projected_dimension(self) -> int:
        return len(self.projected_basis)

    @property
    def generator(self) -> Optional[BilinearForm]:
        return self.projected_basis[0] if self.projected_basis else None

    def core_kernel(self) -> list[BilinearForm]:
        return [f.restrict_to_window(self.window, core=True) for f in self.kernel]


def _project(params: AlgebraParams, window: Window, system: ConstraintSystem[Pair], kernel: list[dict[int, Fraction]]) -> list[BilinearForm]:
    s = params.s
    core_cols = {c for c, (a, b) in enumerate(system.unknowns) if window.in_core(a, s) and window.in_core(b, s)}
    red = RowReducer(system.n_unknowns)
    for v in kernel:
        red.add({c: x for c, x in v.items() if c in core_cols})
    return [BilinearForm(params, {system.unknowns[c]: x for c, x in r.items()}) for r in red.rref_rows()]


def _solve_once(params: AlgebraParams, window: Window, weight_filter: bool) -> tuple[list[BilinearForm], list[BilinearForm]]:
    system = assemble_invariance_system(params, window, weight_filter)
    kernel = nullspace_basis(system.matrix)
    forms = [BilinearForm(params, {system.unknowns[c]: x for c, x in v.items()}) for v in kernel]
    return forms, _project(params, window, system, kernel)


def solve_invariant_forms(
    params: AlgebraParams,
    window: Window,
    weight_filter: bool = True,
    check_stability: bool = True,
) -> InvSolution:
    """Kernel of the invariance system on ``window`` and its core projection.

    Stability re-solves at ``M + 2`` with the same core.
    """
    kernel, projected = _solve_once(params, window, weight_filter)
    nxt = None
    stabilized = False
    if check_stability:
        _, projected_next = _solve_once(params, window.grown(2), weight_filter)
        nxt = len(projected_next)
        stabilized = nxt == len(projected)
    return InvSolution(params, window, kernel, projected, stabilized, nxt, weight_filter)


def projected_span_contains(bigger: list[BilinearForm], smaller: list[BilinearForm]) -> bool:
    """True when span(smaller) is inside span(bigger) (all forms on the same pairs)."""
    keys = sorted({k for f in bigger + smaller for k, _ in f.items()}, key=lambda k: (k[0].sort_key, k[1].sort_key))
    col = {k: i for i, k in enumerate(keys)}
    red = RowReducer(len(keys))
    for f in bigger:
        red.add({col[k]: v for k, v in f.items()})
    r = red.rank
    for f in smaller:
        red.add({col[k]: v for k, v in f.items()})
    return red.rank == r


# ---------------------------------------------------------------------------
# comparison against the two conventions


@dataclass
class DiscrepancyReport:
    params: AlgebraParams
    window: Window
    solver_dim: int
    printed_dim: int
    lemma_dim: int
    printed_tag: str
    lemma_tag: str
    generator: Optional[BilinearForm]
    match_printed: bool
    match_lemma: bool
    scalar_printed: Optional[Fraction] = None
    scalar_lemma: Optional[Fraction] = None
    witnesses: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        fmt = lambda q: None if q is None else format_rational(q)  # noqa: E731
        return {
            "params": self.params.to_dict(),
            "window": {"M": self.window.bound, "C": self.window.core},
            "solver_dim": self.solver_dim,
            "printed_dim": self.printed_dim,
            "lemma_dim": self.lemma_dim,
            "printed_tag": self.printed_tag,
            "lemma_tag": self.lemma_tag,
            "generator": None if self.generator is None else self.generator.to_dict(),
            "match_printed": self.match_printed,
            "match_lemma": self.match_lemma,
            "scalar_printed": fmt(self.scalar_printed),
            "scalar_lemma": fmt(self.scalar_lemma),
            "witnesses": self.witnesses,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DiscrepancyReport":
        parse = lambda q: None if q is None else Fraction(q)  # noqa: E731
        return cls(
            params=AlgebraParams.from_dict(d["params"]),
            window=Window(d["window"]["M"], d["window"]["C"]),
            solver_dim=d["solver_dim"],
            printed_dim=d["printed_dim"],
            lemma_dim=d["lemma_dim"],
            printed_tag=d["printed_tag"],
            lemma_tag=d["lemma_tag"],
            generator=None if d["generator"] is None else BilinearForm.from_dict(d["generator"]),
            match_printed=d["match_printed"],
            match_lemma=d["match_lemma"],
            scalar_printed=parse(d["scalar_printed"]),
            scalar_lemma=parse(d["scalar_lemma"]),
            witnesses=d["witnesses"],
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiscrepancyReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def triple_witness(violation: tuple[tuple[BasisElement, ...], Fraction]) -> dict:
    triple, residual = violation
    return {"triple": [str(b) for b in triple], "residual": format_rational(residual)}


def compare_with_classification(
    solution: InvSolution,
    params: AlgebraParams | None = None,
    *,
    allow_unstable: bool = False,
) -> DiscrepancyReport:
    """Solver dimension and generator against both conventions, with witnesses."""
    params = params or solution.params
    if not solution.stabilized and not allow_unstable:
        raise NotStabilizedError(
            f"solution at M={solution.window.bound} is not stabilized "
            f"({solution.projected_dimension} vs {solution.next_projected_dimension}); enlarge M"
        )
    window = solution.window
    gen = solution.generator
    out: dict[str, object] = {}
    witnesses: list[dict] = []
    for conv in (Convention.PRINTED, Convention.LEMMA):
        res = classify(params, conv, window)
        scalar = None
        if res.dimension and gen is not None and solution.projected_dimension == 1:
            scalar = gen.ratio_to(res.generator.restrict_to_window(window, core=True))
        match = res.dimension == solution.projected_dimension and (res.dimension == 0 or scalar is not None)
        if res.dimension:
            viol = minimal_violation(invariance_violations(params, res.generator, window))
            if viol is not None:
                witnesses.append({"convention": conv.value, "kind": "violated_triple", "witness": triple_witness(viol)})
        if not match and gen is not None and scalar is None:
            claimed = [] if res.generator is None else res.generator.restrict_to_window(window, core=True).support()
            witnesses.append(
                {
                    "convention": conv.value,
                    "kind": "kernel_vector_outside_span",
                    "witness": {
                        "form": gen.to_dict(),
                        "zero_on_claimed_support": [[str(a), str(b)] for a, b in claimed if gen.value(a, b) == 0],
                    },
                }
            )
        out[conv.value] = (res, match, scalar)
    (pres, pmatch, pscalar), (lres, lmatch, lscalar) = out["printed"], out["lemma"]
    return DiscrepancyReport(
        params=params,
        window=window,
        solver_dim=solution.projected_dimension,
        printed_dim=pres.dimension,
        lemma_dim=lres.dimension,
        printed_tag=pres.tag.value,
        lemma_tag=lres.tag.value,
        generator=gen,
        match_printed=pmatch,
        match_lemma=lmatch,
        scalar_printed=pscalar,
        scalar_lemma=lscalar,
        witnesses=witnesses,
    )


# ---------------------------------------------------------------------------
# lemma replay

Instance = tuple[Pair, list[tuple[Fraction, Pair]]]


@dataclass(frozen=True)
class Lemma:
    """``phi(lhs) == sum(coeff * phi(pair))`` over every in-core instance."""

    name: str
    applies: Callable[[AlgebraParams], bool]
    instances: Callable[[AlgebraParams, "_Core"], Iterator[Instance]]


@dataclass
class _Core:
    params: AlgebraParams
    L: list[Fraction]
    Y: list[Fraction]
    M: list[Fraction]

    @classmethod
    def of(cls, params: AlgebraParams, bound: int) -> "_Core":
        ints = [Fraction(n) for n in range(-bound, bound + 1)]
        return cls(params, ints, [params.s.value + n for n in ints], ints)


def _e(family: str, value: Fraction) -> Optional[BasisElement]:
    if (2 * value).denominator != 1:
        return None
    return BasisElement(family, Mode(int(2 * value)))


def _zero(lhs: Pair) -> Instance:
    return (lhs, [])


def _d(a, b) -> int:
    return 1 if a == b else 0


def _inst_ll(p, k):
    for m, n in itertools.product(k.L, k.L):
        yield _zero((_e("L", m), _e("L", n)))


def _inst_ly01(p, k):
    for m, q in itertools.product(k.L, k.Y):
        yield _zero((_e("L", m), _e("Y", q)))


def _inst_ly02(p, k):
    for m, q in itertools.product(k.L, k.Y):
        if q != -p.mu and m + q != -p.mu:
            yield _zero((_e("L", m), _e("Y", q)))


def _inst_ly03(p, k):
    for m in k.L:
        if m != 0:
            yield _zero((_e("L", m), _e("Y", -p.mu)))


def _inst_ly04(p, k):
    ref = (_e("L", Fraction(0)), _e("Y", -p.mu))
    for m, q in itertools.product(k.L, k.Y):
        if m != 0:
            yield ((_e("L", m), _e("Y", q)), [(-(p.lam + 3) / 2 * _d(q, -m - p.mu), ref)])
    for q in k.Y:
        if q != -p.mu:
            yield _zero((_e("L", Fraction(0)), _e("Y", q)))


def _inst_ly05(p, k):
    ref = (_e("L", Fraction(0)), _e("Y", -p.mu))
    for m, q in itertools.product(k.L, k.Y):
        lhs = (_e("L", m), _e("Y", q))
        if p.lam == -5:
            yield (lhs, [(Fraction(_d(q, -m - p.mu)), ref)])
        elif p.lam != -3 or (m, q) != (0, -p.mu):
            yield _zero(lhs)


def _inst_lm01(p, k):
    for n, m in itertools.product(k.L, k.M):
        yield _zero((_e("L", n), _e("M", m)))


def _inst_lm02(p, k):
    ref = (_e("L", Fraction(0)), _e("M", -2 * p.mu))
    for n, m in itertools.product(k.L, k.M):
        if n != 0:
            yield ((_e("L", n), _e("M", m)), [(-(p.lam + 1) * _d(m, -n - 2 * p.mu), ref)])
    for m in k.M:
        if m != -2 * p.mu:
            yield _zero((_e("L", Fraction(0)), _e("M", m)))


def _inst_lm03(p, k):
    ref = (_e("L", Fraction(0)), _e("M", -2 * p.mu))
    for n, m in itertools.product(k.L, k.M):
        lhs = (_e("L", n), _e("M", m))
        if p.lam == -2:
            yield (lhs, [(Fraction(_d(n, -m - 2 * p.mu)), ref)])
        elif p.lam != -1 or (n, m) != (0, -2 * p.mu):
            yield _zero(lhs)


def _inst_ym01(p, k):
    for q, m in itertools.product(k.Y, k.M):
        yield _zero((_e("Y", q), _e("M", m)))


def _inst_mm01(p, k):
    for n, m in itertools.product(k.M, k.M):
        yield _zero((_e("M", n), _e("M", m)))


def _inst_yy01(p, k):
    for a, b in itertools.product(k.Y, k.Y):
        yield _zero((_e("Y", a), _e("Y", b)))


def _inst_yy02(p, k):
    for a, b in itertools.product(k.Y, k.Y):
        if a != -p.mu and a + b != -2 * p.mu:
            yield _zero((_e("Y", a), _e("Y", b)))


def _inst_yy03(p, k):
    for b in k.Y:
        if b != -p.mu:
            yield _zero((_e("Y", -p.mu), _e("Y", b)))


def _inst_yy04(p, k):
    for a, b in itertools.product(k.Y, k.Y):
        if a + b != -2 * p.mu:
            yield _zero((_e("Y", a), _e("Y", b)))


def _inst_yy05_1(p, k):
    ref = (_e("L", Fraction(0)), _e("M", -2 * p.mu))
    for a in k.Y:
        if a != -p.mu:
            yield ((_e("Y", a), _e("Y", -2 * p.mu - a)), [(Fraction(-2), ref)])


def _inst_yy05_2(p, k):
    ref = (_e("L", Fraction(0)), _e("M", -2 * p.mu))
    y = _e("Y", -p.mu)
    yield ((y, y), [(2 * (p.lam + 1) / (p.lam + 3), ref)])


def _inst_yy06(p, k):
    ref = (_e("L", Fraction(0)), _e("M", -2 * p.mu))
    for a, b in itertools.product(k.Y, k.Y):
        lhs = (_e("Y", a), _e("Y", b))
        if p.lam == -2:
            yield (lhs, [(Fraction(-2 * _d(a, -2 * p.mu - b)), ref)])
        elif p.lam == -1:
            yield (lhs, [(Fraction(-2 * (1 - _d(a, -p.mu)) * _d(a, -2 * p.mu - b)), ref)])
        elif p.lam != -3 or (a, b) != (-p.mu, -p.mu):
            yield _zero(lhs)


_half = lambda p: p.mu_in_half_integers  # noqa: E731
_shift = lambda p: p.mu_in_s_shifted  # noqa: E731

LEMMAS: tuple[Lemma, ...] = (
    Lemma("LL", lambda p: True, _inst_ll),
    Lemma("LY--01", lambda p: not _shift(p), _inst_ly01),
    Lemma("LY--02", _shift, _inst_ly02),
    Lemma("LY--03", _shift, _inst_ly03),
    Lemma("LY--04", _shift, _inst_ly04),
    Lemma("LY--05", _shift, _inst_ly05),
    Lemma("LM--01", lambda p: not _half(p), _inst_lm01),
    Lemma("LM--02", _half, _inst_lm02),
    Lemma("LM--03", _half, _inst_lm03),
    Lemma("YM--01", lambda p: True, _inst_ym01),
    Lemma("MM--01", lambda p: True, _inst_mm01),
    Lemma("YY--01", lambda p: not _half(p), _inst_yy01),
    Lemma("YY--02", _half, _inst_yy02),
    Lemma("YY--03", _shift, _inst_yy03),
    Lemma("YY--04", _half, _inst_yy04),
    Lemma("YY--05(1)", _half, _inst_yy05_1),
    # Y_{-mu} only exists when mu lies in s + Z
    Lemma("YY--05(2)", lambda p: _shift(p) and p.lam != -3, _inst_yy05_2),
    Lemma("YY--06", _half, _inst_yy06),
)


def _instances_in_core(lemma: Lemma, params: AlgebraParams, window: Window) -> list[Instance]:
    s = params.s
    inside = lambda b: b is not None and window.in_core(b, s)  # noqa: E731
    out = []
    for lhs, rhs in lemma.instances(params, _Core.of(params, window.core)):
        pairs = [lhs] + [pr for c, pr in rhs if c != 0]
        if all(inside(a) and inside(b) for a, b in pairs):
            out.append((lhs, [(c, pr) for c, pr in rhs if c != 0]))
    return out


def lemma_suite(params: AlgebraParams, solution: InvSolution) -> list[dict]:
    """Replay every applicable vanishing/proportionality lemma on the kernel.

    Each kernel form is restricted to the core; the lemma equations are
    linear, so checking a spanning set is equivalent to checking the span.
    """
    if not solution.stabilized:
        raise NotStabilizedError(f"solution at M={solution.window.bound} is not stabilized; enlarge M")
    forms = solution.core_kernel()
    vacuous = solution.projected_dimension == 0
    verdicts = []
    for lemma in LEMMAS:
        if not lemma.applies(params):
            verdicts.append({"lemma": lemma.name, "status": "not_applicable", "instances": 0, "witness": None})
            continue
        insts = _instances_in_core(lemma, params, solution.window)
        witness = None
        for fi, form in enumerate(forms):
            for lhs, rhs in insts:
                actual = form.value(*lhs)
                expected = sum((c * form.value(*pr) for c, pr in rhs), Fraction(0))
                if actual != expected:
                    witness = {
                        "form_index": fi,
                        "lhs": [str(lhs[0]), str(lhs[1])],
                        "expected": format_rational(expected),
                        "actual": format_rational(actual),
                    }
                    break
            if witness:
                break
        status = "fail" if witness else ("vacuous" if vacuous else "pass")
        verdicts.append({"lemma": lemma.name, "status": status, "instances": len(insts), "witness": witness})
    return verdicts


__all__ = [
    "DiscrepancyReport",
    "FamilyTag",
    "InvSolution",
    "LEMMAS",
    "assemble_invariance_system",
    "closed_form",
    "compare_with_classification",
    "fixture_grid",
    "lemma_suite",
    "projected_span_contains",
    "solve_invariant_forms",
]
