"""Symmetric bilinear forms, the two classification conventions, and checks.

Two conventions are exposed. ``printed`` follows the published five-case
statement verbatim. ``lemma`` follows the intermediate vanishing and
proportionality lemmas, which is what the constraint solver reproduces:

* ``lam = -2, mu in Z/2``: ``phi(L_n, M_{-n-2mu}) = 1``, ``phi(Y_p, Y_{-p-2mu}) = -2``
* ``lam = -3, mu in s+Z``: only ``phi(Y_{-mu}, Y_{-mu}) = 1``
* ``lam = -5, mu in s+Z``: ``phi(L_n, Y_{-n-mu}) = 1``
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional

from .algebra import (
    FAMILY_ORDER,
    OUTSIDE,
    AlgebraParams,
    BasisElement,
    BracketTable,
    Element,
    Mode,
    Window,
    ad_weight,
    check_parity,
    enumerate_window,
    format_rational,
    parse_basis_element,
    parse_rational,
)
from .errors import DomainError
from .linalg import SparseMatrix, nullspace_basis

Pair = tuple[BasisElement, BasisElement]
Triple = tuple[BasisElement, BasisElement, BasisElement]


class Convention(str, enum.Enum):
    PRINTED = "printed"
    LEMMA = "lemma"


class FamilyTag(str, enum.Enum):
    A_PRINTED = "A_printed"
    B_PRINTED = "B_printed"
    C = "C"
    D = "D"
    E_PRINTED = "E_printed"
    B_LEMMA = "B_lemma"
    DE_LEMMA = "DE_lemma"
    ZERO = "Zero"


def pair_key(a: BasisElement, b: BasisElement) -> Pair:
    return (a, b) if not b < a else (b, a)


class BilinearForm:
    """Symmetric form stored on unordered pairs of basis elements."""

    __slots__ = ("params", "_entries")

    def __init__(self, params: AlgebraParams, entries: Mapping[Pair, object] | Iterable[tuple[Pair, object]] = ()):
        self.params = params
        items = entries.items() if isinstance(entries, Mapping) else entries
        acc: dict[Pair, Fraction] = {}
        for (a, b), v in items:
            check_parity(params, a)
            check_parity(params, b)
            k = pair_key(a, b)
            v = Fraction(v)
            if k in acc and acc[k] != v:
                raise ValueError(f"conflicting values for {k}")
            acc[k] = v
        self._entries = {k: acc[k] for k in sorted(acc, key=_pair_sort_key) if acc[k] != 0}

    @property
    def entries(self) -> dict[Pair, Fraction]:
        return dict(self._entries)

    def items(self):
        return self._entries.items()

    def __len__(self) -> int:
        return len(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def value(self, a: BasisElement, b: BasisElement) -> Fraction:
        return self._entries.get(pair_key(a, b), Fraction(0))

    def __call__(self, x: Element | BasisElement, y: Element | BasisElement) -> Fraction:
        xs = x.items() if isinstance(x, Element) else [(x, Fraction(1))]
        ys = y.items() if isinstance(y, Element) else [(y, Fraction(1))]
        return sum((cx * cy * self.value(a, b) for a, cx in xs for b, cy in ys), Fraction(0))

    def support(self) -> list[Pair]:
        return list(self._entries)

    def restrict(self, keep: Callable[[BasisElement], bool]) -> "BilinearForm":
        return BilinearForm(self.params, {k: v for k, v in self._entries.items() if keep(k[0]) and keep(k[1])})

    def restrict_to_window(self, window: Window, *, core: bool = False) -> "BilinearForm":
        s = self.params.s
        if core:
            return self.restrict(lambda b: window.in_core(b, s))
        return self.restrict(lambda b: window.contains(b, s))

    def scaled(self, k: object) -> "BilinearForm":
        k = Fraction(k)
        return BilinearForm(self.params, {p: k * v for p, v in self._entries.items()})

    def ratio_to(self, other: "BilinearForm") -> Optional[Fraction]:
        """The scalar ``c`` with ``self == c * other``, if one exists and is non-zero."""
        if set(self._entries) != set(other._entries) or not self._entries:
            return None
        ratios = {v / other._entries[k] for k, v in self._entries.items()}
        return ratios.pop() if len(ratios) == 1 else None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BilinearForm):
            return NotImplemented
        return self.params == other.params and self._entries == other._entries

    def __repr__(self) -> str:
        body = ", ".join(f"({a},{b})={format_rational(v)}" for (a, b), v in self._entries.items())
        return f"BilinearForm{{{body}}}"

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "entries": [{"a": str(a), "b": str(b), "val": format_rational(v)} for (a, b), v in self._entries.items()],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "BilinearForm":
        params = AlgebraParams.from_dict(d["params"])
        entries = []
        for e in d["entries"]:
            a = parse_basis_element(e["a"], params)
            b = parse_basis_element(e["b"], params)
            entries.append(((a, b), parse_rational(e["val"])))
        return cls(params, entries)


def _pair_sort_key(k: Pair) -> tuple:
    return (k[0].sort_key, k[1].sort_key)


@dataclass(frozen=True)
class ClassificationResult:
    convention: Convention
    tag: FamilyTag
    dimension: int
    generator: Optional[BilinearForm]

    def __post_init__(self) -> None:
        if (self.dimension == 0) != (self.generator is None):
            raise ValueError("dimension 0 iff no generator")

    def to_dict(self) -> dict:
        return {
            "convention": self.convention.value,
            "tag": self.tag.value,
            "dimension": self.dimension,
            "generator": None if self.generator is None else self.generator.to_dict(),
        }


def _lam_is(params: AlgebraParams, value: int) -> bool:
    return params.lam == value


def printed_tag(params: AlgebraParams) -> FamilyTag:
    half, shifted = params.mu_in_half_integers, params.mu_in_s_shifted
    if _lam_is(params, -1) and half:
        return FamilyTag.A_PRINTED
    if _lam_is(params, -3) and shifted:
        return FamilyTag.B_PRINTED
    if _lam_is(params, -5) and shifted:
        return FamilyTag.C
    if _lam_is(params, -2) and shifted:
        return FamilyTag.D
    # "1/2 Z \ (s + Z)": read as set difference so the five cases are disjoint
    if _lam_is(params, -2) and half and not shifted:
        return FamilyTag.E_PRINTED
    return FamilyTag.ZERO


def lemma_tag(params: AlgebraParams) -> FamilyTag:
    if _lam_is(params, -2) and params.mu_in_half_integers:
        return FamilyTag.DE_LEMMA
    if _lam_is(params, -3) and params.mu_in_s_shifted:
        return FamilyTag.B_LEMMA
    if _lam_is(params, -5) and params.mu_in_s_shifted:
        return FamilyTag.C
    return FamilyTag.ZERO


def tag_for(params: AlgebraParams, convention: Convention | str) -> FamilyTag:
    convention = Convention(convention)
    return printed_tag(params) if convention is Convention.PRINTED else lemma_tag(params)


DEFAULT_WINDOW = Window(8, 4)


def classify(params: AlgebraParams, convention: Convention | str, window: Window | None = None) -> ClassificationResult:
    """Dimension of the invariant-form space and its generator on ``window``."""
    convention = Convention(convention)
    tag = tag_for(params, convention)
    if tag is FamilyTag.ZERO:
        return ClassificationResult(convention, tag, 0, None)
    gen = closed_form(params, tag, window or DEFAULT_WINDOW)
    return ClassificationResult(convention, tag, 1, gen)


_COMPATIBLE: dict[FamilyTag, Callable[[AlgebraParams], bool]] = {
    FamilyTag.A_PRINTED: lambda p: p.lam == -1 and p.mu_in_half_integers,
    FamilyTag.B_PRINTED: lambda p: p.lam == -3 and p.mu_in_s_shifted,
    FamilyTag.C: lambda p: p.lam == -5 and p.mu_in_s_shifted,
    FamilyTag.D: lambda p: p.lam == -2 and p.mu_in_s_shifted,
    FamilyTag.E_PRINTED: lambda p: p.lam == -2 and p.mu_in_half_integers and not p.mu_in_s_shifted,
    FamilyTag.B_LEMMA: lambda p: p.lam == -3 and p.mu_in_s_shifted,
    FamilyTag.DE_LEMMA: lambda p: p.lam == -2 and p.mu_in_half_integers,
    FamilyTag.ZERO: lambda p: True,
}


def closed_form(params: AlgebraParams, tag: FamilyTag | str, window: Window) -> BilinearForm:
    """Window restriction of the family generator named by ``tag``."""
    tag = FamilyTag(tag)
    if not _COMPATIBLE[tag](params):
        raise DomainError(f"family {tag.value} does not apply to {params}")
    s = params.s
    inside = lambda b: window.contains(b, s)  # noqa: E731
    mu2 = Mode.of(2 * params.mu) if params.mu_in_half_integers else None
    entries: list[tuple[Pair, Fraction]] = []

    def put(a: BasisElement, b: BasisElement, v: object) -> None:
        if inside(a) and inside(b):
            entries.append(((a, b), Fraction(v)))

    basis = enumerate_window(params, window)
    Ls = [b for b in basis if b.family == "L"]
    Ys = [b for b in basis if b.family == "Y"]

    if tag in (FamilyTag.A_PRINTED, FamilyTag.B_PRINTED):
        put(BasisElement("L", Mode(0)), BasisElement("M", -mu2), 1)
    if tag is FamilyTag.A_PRINTED:
        for y in Ys:
            v = 0 if y.mode.value == -params.mu else -2
            put(y, BasisElement("Y", -y.mode - mu2), v)
    if tag is FamilyTag.C:
        for l in Ls:
            put(l, BasisElement("Y", Mode.of(-l.mode.value - params.mu)), 1)
    if tag in (FamilyTag.D, FamilyTag.DE_LEMMA, FamilyTag.E_PRINTED):
        for l in Ls:
            put(l, BasisElement("M", -l.mode - mu2), 1)
    if tag in (FamilyTag.D, FamilyTag.DE_LEMMA):
        for y in Ys:
            put(y, BasisElement("Y", -y.mode - mu2), -2)
    if tag is FamilyTag.B_LEMMA:
        y = BasisElement("Y", Mode.of(-params.mu))
        put(y, y, 1)
    return BilinearForm(params, entries)


def invariance_violations(
    params: AlgebraParams,
    form: BilinearForm,
    window: Window,
    table: BracketTable | None = None,
) -> list[tuple[Triple, Fraction]]:
    """Non-zero residuals ``phi([x,y],z) - phi(x,[y,z])`` over in-window triples.

    Only triples with ``x, y, z, [x,y], [y,z]`` all in the window are checked.
    Output is sorted by triple in basis order.
    """
    if table is None or table.params != params or table.window.bound != window.bound:
        table = BracketTable(params, window)
    basis, weights, br = table.basis, table.weights, table.table
    idx = table.index
    phi: dict[tuple[int, int], Fraction] = {}
    support_weights = set()
    for (a, b), v in form.items():
        if a in idx and b in idx:
            i, j = idx[a], idx[b]
            phi[(i, j)] = phi[(j, i)] = v
            support_weights.add(weights[i] + weights[j])
    if not phi:
        return []
    by_weight: dict[Fraction, list[int]] = defaultdict(list)
    for k, w in enumerate(weights):
        by_weight[w].append(k)

    out = []
    n = len(basis)
    for x in range(n):
        brx = br[x]
        for y in range(n):
            xy = brx[y]
            if xy is OUTSIDE:
                continue
            wxy = weights[x] + weights[y]
            zs = sorted(z for t in support_weights for z in by_weight.get(t - wxy, ()))
            bry = br[y]
            for z in zs:
                yz = bry[z]
                if yz is OUTSIDE:
                    continue
                lhs = xy[1] * phi.get((xy[0], z), 0) if xy is not None else 0
                rhs = yz[1] * phi.get((x, yz[0]), 0) if yz is not None else 0
                r = lhs - rhs
                if r:
                    out.append(((basis[x], basis[y], basis[z]), Fraction(r)))
    return out


def witness_key(triple: Triple) -> tuple:
    """Order violations smallest-first: total |mode|, then positive modes first."""
    size = sum(abs(b.mode.twice_value) for b in triple)
    return (size, tuple((FAMILY_ORDER[b.family], -b.mode.twice_value) for b in triple))


def minimal_violation(violations: list[tuple[Triple, Fraction]]) -> Optional[tuple[Triple, Fraction]]:
    if not violations:
        return None
    return min(violations, key=lambda tv: witness_key(tv[0]))


def radical_basis(form: BilinearForm, window: Window) -> list[Element]:
    """Basis of ``{v : phi(v, b) = 0 for every window basis b}``."""
    basis = enumerate_window(form.params, window)
    idx = {b: i for i, b in enumerate(basis)}
    rows: list[dict[int, Fraction]] = [dict() for _ in basis]
    for (a, b), v in form.items():
        if a in idx and b in idx:
            rows[idx[a]][idx[b]] = v
            rows[idx[b]][idx[a]] = v
    gram = SparseMatrix(len(basis), len(basis), rows)
    return [Element({basis[c]: x for c, x in vec.items()}) for vec in nullspace_basis(gram)]


def weight_sum(params: AlgebraParams, pair: Pair) -> Fraction:
    return ad_weight(params, pair[0]) + ad_weight(params, pair[1])


__all__ = [
    "BilinearForm",
    "ClassificationResult",
    "Convention",
    "FamilyTag",
    "classify",
    "closed_form",
    "invariance_violations",
    "lemma_tag",
    "minimal_violation",
    "pair_key",
    "printed_tag",
    "radical_basis",
    "tag_for",
    "weight_sum",
]
