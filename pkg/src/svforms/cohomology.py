"""Degree-two Lie and Leibniz cocycles on windows, and symmetrization.

Cocycle condition (for every triple)::

    psi([x,y], z) = psi(x, [y,z]) - psi(y, [x,z])

Lie cocycles are additionally antisymmetric. Dimensions are read off on the
core exactly as for invariant forms; quotient dimensions are rank
differences, never explicit quotient spaces.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .algebra import (
    OUTSIDE,
    AlgebraParams,
    BasisElement,
    BracketTable,
    Element,
    Window,
    bracket_basis,
    check_parity,
    enumerate_window,
    format_rational,
    parse_basis_element,
    parse_rational,
)
from .errors import WindowTooSmallError
from .forms import BilinearForm, Convention, classify, invariance_violations, minimal_violation
from .invsolver import solve_invariant_forms, triple_witness
from .linalg import ConstraintSystem, RowReducer, SparseMatrix, nullspace_basis

OrderedPair = tuple[BasisElement, BasisElement]


class CocycleKind(str, enum.Enum):
    LIE = "lie"
    LEIBNIZ = "leibniz"


class BilinearMap:
    """Bilinear map on ordered pairs of basis elements; no symmetry imposed."""

    __slots__ = ("params", "_entries")

    def __init__(self, params: AlgebraParams, entries: Mapping[OrderedPair, object] = None):
        self.params = params
        acc = {}
        for (a, b), v in (entries or {}).items():
            check_parity(params, a)
            check_parity(params, b)
            v = Fraction(v)
            if v:
                acc[(a, b)] = v
        self._entries = {k: acc[k] for k in sorted(acc, key=lambda k: (k[0].sort_key, k[1].sort_key))}

    @property
    def entries(self) -> dict[OrderedPair, Fraction]:
        return dict(self._entries)

    def items(self):
        return self._entries.items()

    def __len__(self) -> int:
        return len(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def value(self, a: BasisElement, b: BasisElement) -> Fraction:
        return self._entries.get((a, b), Fraction(0))

    def __call__(self, x: Element, y: Element) -> Fraction:
        return sum((cx * cy * self.value(a, b) for a, cx in x.items() for b, cy in y.items()), Fraction(0))

    def is_antisymmetric(self) -> bool:
        return all(self.value(b, a) == -v for (a, b), v in self._entries.items())

    def restrict(self, window: Window, *, core: bool = False) -> "BilinearMap":
        s = self.params.s
        keep = (lambda b: window.in_core(b, s)) if core else (lambda b: window.contains(b, s))
        return BilinearMap(self.params, {k: v for k, v in self._entries.items() if keep(k[0]) and keep(k[1])})

    def __add__(self, other: "BilinearMap") -> "BilinearMap":
        acc = dict(self._entries)
        for k, v in other._entries.items():
            acc[k] = acc.get(k, 0) + v
        return BilinearMap(self.params, acc)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BilinearMap):
            return NotImplemented
        return self.params == other.params and self._entries == other._entries

    def __repr__(self) -> str:
        body = ", ".join(f"({a},{b})={format_rational(v)}" for (a, b), v in self._entries.items())
        return f"BilinearMap{{{body}}}"

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "entries": [{"a": str(a), "b": str(b), "val": format_rational(v)} for (a, b), v in self._entries.items()],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "BilinearMap":
        params = AlgebraParams.from_dict(d["params"])
        return cls(
            params,
            {
                (parse_basis_element(e["a"], params), parse_basis_element(e["b"], params)): parse_rational(e["val"])
                for e in d["entries"]
            },
        )


@dataclass(frozen=True)
class LinearFunctional:
    values: Mapping[BasisElement, Fraction]

    def __call__(self, x: Element) -> Fraction:
        return sum((c * self.values.get(b, 0) for b, c in x.items()), Fraction(0))

    @classmethod
    def dual(cls, b: BasisElement) -> "LinearFunctional":
        return cls({b: Fraction(1)})


def _check_window(window: Window) -> None:
    if window.bound < 2:
        raise WindowTooSmallError(f"window bound M={window.bound} is too small; need M >= 2")


def assemble_cocycle_system(
    params: AlgebraParams,
    window: Window,
    kind: CocycleKind | str,
    table: BracketTable | None = None,
) -> ConstraintSystem[OrderedPair]:
    """Cocycle rows over triples whose three brackets all stay in the window.

    ``leibniz``: unknowns are all ordered pairs, one row per ordered triple.
    ``lie``: unknowns are pairs ``a < b`` (antisymmetry substituted, so
    ``psi(a, a) = 0``); for antisymmetric maps the row is alternating in the
    triple, so only ``x < y < z`` is assembled.
    """
    kind = CocycleKind(kind)
    _check_window(window)
    table = table or BracketTable(params, window)
    basis, br = table.basis, table.table
    n = len(basis)
    lie = kind is CocycleKind.LIE
    if lie:
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    else:
        pairs = [(i, j) for i in range(n) for j in range(n)]
    col = {p: c for c, p in enumerate(pairs)}

    def put(row: dict, i: int, j: int, v: Fraction) -> None:
        if lie:
            if i == j:
                return
            if i > j:
                i, j, v = j, i, -v
        c = col[(i, j)]
        row[c] = row.get(c, 0) + v

    rows, labels = [], []
    for x in range(n):
        brx = br[x]
        for y in range(x + 1 if lie else 0, n):
            xy = brx[y]
            if xy is OUTSIDE:
                continue
            bry = br[y]
            for z in range(y + 1 if lie else 0, n):
                yz, xz = bry[z], brx[z]
                if yz is OUTSIDE or xz is OUTSIDE:
                    continue
                row: dict[int, Fraction] = {}
                if xy is not None:
                    put(row, xy[0], z, xy[1])
                if yz is not None:
                    put(row, x, yz[0], -yz[1])
                if xz is not None:
                    put(row, y, xz[0], xz[1])
                row = {c: v for c, v in row.items() if v}
                if row:
                    rows.append(row)
                    labels.append((basis[x], basis[y], basis[z]))
    unknowns = [(basis[i], basis[j]) for i, j in pairs]
    return ConstraintSystem(SparseMatrix(len(rows), len(unknowns), rows), unknowns, labels)


def _vector_to_map(params: AlgebraParams, unknowns: list[OrderedPair], vec: Mapping[int, Fraction], lie: bool) -> BilinearMap:
    entries = {}
    for c, v in vec.items():
        a, b = unknowns[c]
        entries[(a, b)] = v
        if lie:
            entries[(b, a)] = -v
    return BilinearMap(params, entries)


@dataclass
class CocycleSolution:
    kind: CocycleKind
    window: Window
    kernel: list[BilinearMap]
    core_basis: list[BilinearMap]

    @property
    def kernel_dim(self) -> int:
        return len(self.kernel)

    @property
    def core_dim(self) -> int:
        return len(self.core_basis)


def _core_pairs(params: AlgebraParams, window: Window) -> list[OrderedPair]:
    core = enumerate_window(params, window, bound=window.core)
    return [(a, b) for a in core for b in core]


def _rank_on(maps: list, keys: list, value) -> RowReducer:
    col = {k: i for i, k in enumerate(keys)}
    red = RowReducer(len(keys))
    for m in maps:
        red.add({col[k]: v for k, v in ((k, value(m, k)) for k in keys) if v})
    return red


def solve_cocycles_core(params: AlgebraParams, window: Window, kind: CocycleKind | str) -> CocycleSolution:
    """Window kernel of the cocycle system and its projection onto the core."""
    kind = CocycleKind(kind)
    system = assemble_cocycle_system(params, window, kind)
    lie = kind is CocycleKind.LIE
    kernel = [_vector_to_map(params, system.unknowns, v, lie) for v in nullspace_basis(system.matrix)]
    keys = _core_pairs(params, window)
    red = _rank_on(kernel, keys, lambda m, k: m.value(*k))
    core_basis = [BilinearMap(params, {keys[c]: v for c, v in r.items()}) for r in red.rref_rows()]
    return CocycleSolution(kind, window, kernel, core_basis)


def coboundary_map(
    f: LinearFunctional,
    params: AlgebraParams,
    window: Window,
    table: BracketTable | None = None,
) -> BilinearMap:
    """``psi_f(x, y) = f([x, y])`` on window pairs (antisymmetric)."""
    table = table or BracketTable(params, window)
    basis = table.basis
    entries: dict[OrderedPair, Fraction] = {}
    outside = False
    for b, v in f.values.items():
        k = table.index.get(b)
        if k is None:
            outside = True
            continue
        for i, j, c in table.preimages(k):
            key = (basis[i], basis[j])
            entries[key] = entries.get(key, 0) + c * v
    if outside:
        # a functional reaching past the window still sees brackets that leave it
        for i, a in enumerate(basis):
            for j, b in enumerate(basis):
                if table.table[i][j] is OUTSIDE:
                    target, c = bracket_basis(params, a, b)
                    v = c * f.values.get(target, 0)
                    if v:
                        entries[(a, b)] = v
    return BilinearMap(params, entries)


def coboundaries_core_dim(params: AlgebraParams, window: Window) -> int:
    """Dimension of the coboundary space restricted to core pairs."""
    core = enumerate_window(params, window, bound=window.core)
    targets: dict[BasisElement, dict[int, Fraction]] = {}
    col = 0
    for a in core:
        for b in core:
            res = bracket_basis(params, a, b)
            if res is not None:
                targets.setdefault(res[0], {})[col] = res[1]
            col += 1
    red = RowReducer(col)
    red.extend(targets.values())
    return red.rank


def xi_symmetrize(psi: BilinearMap) -> BilinearForm:
    """``xi(psi)(a, b) = psi(a, b) + psi(b, a)``."""
    acc: dict[tuple[BasisElement, BasisElement], Fraction] = {}
    for (a, b), v in psi.items():
        k = (a, b) if not b < a else (b, a)
        acc[k] = acc.get(k, 0) + v
    for k in list(acc):
        a, b = k
        if a == b:
            acc[k] = 2 * psi.value(a, a)
    return BilinearForm(psi.params, acc)


def cocycle_residuals(params: AlgebraParams, psi: BilinearMap, window: Window) -> list[tuple[tuple[BasisElement, ...], Fraction]]:
    """Non-zero ``psi([x,y],z) - psi(x,[y,z]) + psi(y,[x,z])`` over in-window triples."""
    table = BracketTable(params, window)
    basis, br = table.basis, table.table
    n = len(basis)
    idx = table.index
    vals = {(idx[a], idx[b]): v for (a, b), v in psi.items() if a in idx and b in idx}
    out = []
    for x in range(n):
        for y in range(n):
            xy = br[x][y]
            if xy is OUTSIDE:
                continue
            for z in range(n):
                yz, xz = br[y][z], br[x][z]
                if yz is OUTSIDE or xz is OUTSIDE:
                    continue
                r = Fraction(0)
                if xy is not None:
                    r += xy[1] * vals.get((xy[0], z), 0)
                if yz is not None:
                    r -= yz[1] * vals.get((x, yz[0]), 0)
                if xz is not None:
                    r += xz[1] * vals.get((y, xz[0]), 0)
                if r:
                    out.append(((basis[x], basis[y], basis[z]), r))
    return out


def virasoro_cocycle(params: AlgebraParams, window: Window) -> BilinearMap:
    """Extend-by-zero Virasoro cocycle ``psi(L_m, L_n) = delta_{m+n,0} (m^3 - m)``."""
    ls = [b for b in enumerate_window(params, window) if b.family == "L"]
    entries = {}
    for a in ls:
        m = a.mode.value
        entries[(a, BasisElement("L", -a.mode))] = m**3 - m
    return BilinearMap(params, entries)


def printed_chi(params: AlgebraParams, window: Window, reading: str = "symmetric") -> Optional[BilinearMap]:
    """Bilinear map carrying the published representative's components.

    ``symmetric`` puts each value on both orders; ``one_sided`` keeps only the
    order in which a mixed-family component is listed (L before Y before M).
    """
    res = classify(params, Convention.PRINTED, window)
    if res.generator is None:
        return None
    entries = {}
    for (a, b), v in res.generator.items():
        entries[(a, b)] = v
        if reading == "symmetric" or a.family == b.family:
            entries[(b, a)] = v
    return BilinearMap(params, entries)


def audit_printed_chi(params: AlgebraParams, window: Window) -> Optional[dict]:
    out = {}
    for reading in ("symmetric", "one_sided"):
        chi = printed_chi(params, window, reading)
        if chi is None:
            return None
        viol = cocycle_residuals(params, chi, window)
        w = minimal_violation(viol)
        out[reading] = {"violations": len(viol), "witness": None if w is None else triple_witness(w)}
    return out


DIM_FIELDS = (
    "cocycles_core",
    "leibniz_cocycles_core",
    "coboundaries_core",
    "h2_core",
    "hl2_core",
    "xi_image_dim",
    "inv_dim",
)


@dataclass
class CohomologyReport:
    params: AlgebraParams
    window: Window
    dims: dict[str, int]
    stabilized: bool
    dims_next: Optional[dict[str, int]] = None
    chi_audit: Optional[dict] = None
    xi_images_invariant: bool = True

    @property
    def gap(self) -> int:
        """``hl2 - h2 - xi_image``; reported, never asserted."""
        return self.dims["hl2_core"] - self.dims["h2_core"] - self.dims["xi_image_dim"]

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "window": {"M": self.window.bound, "C": self.window.core},
            "dims": {k: self.dims[k] for k in DIM_FIELDS},
            "dims_next": None if self.dims_next is None else {k: self.dims_next[k] for k in DIM_FIELDS},
            "stabilized": self.stabilized,
            "gap": self.gap,
            "xi_images_invariant": self.xi_images_invariant,
            "chi_audit": self.chi_audit,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CohomologyReport":
        return cls(
            params=AlgebraParams.from_dict(d["params"]),
            window=Window(d["window"]["M"], d["window"]["C"]),
            dims=dict(d["dims"]),
            stabilized=d["stabilized"],
            dims_next=None if d["dims_next"] is None else dict(d["dims_next"]),
            chi_audit=d["chi_audit"],
            xi_images_invariant=d["xi_images_invariant"],
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CohomologyReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()


@dataclass
class _WindowDims:
    dims: dict[str, int]
    leibniz: CocycleSolution
    xi_images: list[BilinearForm] = field(default_factory=list)


def _xi_core_images(params: AlgebraParams, window: Window, kernel: list[BilinearMap]) -> list[BilinearForm]:
    return [xi_symmetrize(psi.restrict(window, core=True)) for psi in kernel]


def _dims_at(params: AlgebraParams, window: Window) -> _WindowDims:
    lie = solve_cocycles_core(params, window, CocycleKind.LIE)
    leib = solve_cocycles_core(params, window, CocycleKind.LEIBNIZ)
    cob = coboundaries_core_dim(params, window)
    images = _xi_core_images(params, window, leib.kernel)
    core = enumerate_window(params, window, bound=window.core)
    keys = [(a, b) for i, a in enumerate(core) for b in core[i:]]
    xi_dim = _rank_on(images, keys, lambda f, k: f.value(*k)).rank
    inv = solve_invariant_forms(params, window, check_stability=False)
    dims = {
        "cocycles_core": lie.core_dim,
        "leibniz_cocycles_core": leib.core_dim,
        "coboundaries_core": cob,
        "h2_core": lie.core_dim - cob,
        "hl2_core": leib.core_dim - cob,
        "xi_image_dim": xi_dim,
        "inv_dim": inv.projected_dimension,
    }
    return _WindowDims(dims, leib, images)


def cohomology_report(params: AlgebraParams, window: Window, check_stability: bool = True) -> CohomologyReport:
    """All degree-two dimensions on the core, with stabilization at ``M + 2``."""
    here = _dims_at(params, window)
    core_window = window.core_window()
    invariant = all(not invariance_violations(params, f, core_window) for f in here.xi_images)
    nxt = _dims_at(params, window.grown(2)).dims if check_stability else None
    return CohomologyReport(
        params=params,
        window=window,
        dims=here.dims,
        stabilized=nxt == here.dims,
        dims_next=nxt,
        chi_audit=audit_printed_chi(params, window),
        xi_images_invariant=invariant,
    )
