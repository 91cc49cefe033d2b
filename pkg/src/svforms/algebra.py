"""Exact model of the deformative Schrodinger-Virasoro algebras.

The algebra has basis ``L_n, M_n`` (n integer) and ``Y_p`` (p in s + Z) with
non-vanishing brackets::

    [L_n, L_m] = (m - n) L_{m+n}
    [L_n, Y_p] = (p - (lam + 1) n / 2 + mu) Y_{p+n}
    [L_n, M_m] = (m - lam n + 2 mu) M_{m+n}
    [Y_p, Y_q] = (q - p) M_{p+q}

Scalars are :class:`fractions.Fraction`. Half-integer modes are stored as
twice their value so all mode arithmetic stays in ``int``.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

from .errors import MalformedElementError, ParityError, WindowError

Rational = Fraction
RationalLike = Union[int, str, Fraction]

FAMILIES = ("L", "Y", "M")
FAMILY_ORDER = {"L": 0, "Y": 1, "M": 2}

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")
_ELEMENT_RE = re.compile(r"^\s*([LYM])\s*\(\s*([^()]*?)\s*\)\s*$")


def parse_rational(text: RationalLike) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` into a Fraction. Floats are rejected."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str) or not _RATIONAL_RE.match(text.strip()):
        raise MalformedElementError(f"malformed rational: {text!r}")
    try:
        return Fraction(text.strip())
    except ZeroDivisionError:
        raise MalformedElementError(f"malformed rational (zero denominator): {text!r}") from None


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


@functools.total_ordering
@dataclass(frozen=True)
class Mode:
    """A half-integer index; the represented value is ``twice_value / 2``."""

    twice_value: int

    @classmethod
    def of(cls, value: RationalLike) -> "Mode":
        q = parse_rational(value)
        doubled = 2 * q
        if doubled.denominator != 1:
            raise ParityError(f"mode {value!r} is not a half-integer")
        return cls(int(doubled))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __add__(self, other: "Mode") -> "Mode":
        return Mode(self.twice_value + other.twice_value)

    def __sub__(self, other: "Mode") -> "Mode":
        return Mode(self.twice_value - other.twice_value)

    def __neg__(self) -> "Mode":
        return Mode(-self.twice_value)

    def __lt__(self, other: "Mode") -> bool:
        return self.twice_value < other.twice_value

    def __str__(self) -> str:
        return format_rational(self.value)


@dataclass(frozen=True)
class AlgebraParams:
    """Parameters ``(lam, mu, s)`` with ``s`` in {0, 1/2}."""

    lam: Fraction
    mu: Fraction
    s: Mode = Mode(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "lam", parse_rational(self.lam))
        object.__setattr__(self, "mu", parse_rational(self.mu))
        if not isinstance(self.s, Mode):
            object.__setattr__(self, "s", Mode.of(self.s))
        if self.s.twice_value not in (0, 1):
            raise MalformedElementError(f"s must be 0 or 1/2, got {self.s}")

    @classmethod
    def from_strings(cls, lam: RationalLike, mu: RationalLike, s: RationalLike = 0) -> "AlgebraParams":
        return cls(parse_rational(lam), parse_rational(mu), Mode.of(s))

    @property
    def mu_in_half_integers(self) -> bool:
        return (2 * self.mu).denominator == 1

    @property
    def mu_in_s_shifted(self) -> bool:
        return (self.mu - self.s.value).denominator == 1

    def to_dict(self) -> dict[str, str]:
        return {
            "lambda": format_rational(self.lam),
            "mu": format_rational(self.mu),
            "s": str(self.s),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, str]) -> "AlgebraParams":
        return cls.from_strings(d["lambda"], d["mu"], d["s"])

    def __str__(self) -> str:
        return f"(lambda={format_rational(self.lam)}, mu={format_rational(self.mu)}, s={self.s})"


@functools.total_ordering
@dataclass(frozen=True)
class BasisElement:
    family: str
    mode: Mode

    def __post_init__(self) -> None:
        if self.family not in FAMILY_ORDER:
            raise MalformedElementError(f"unknown family {self.family!r}")
        if not isinstance(self.mode, Mode):
            object.__setattr__(self, "mode", Mode.of(self.mode))

    @property
    def sort_key(self) -> tuple[int, int]:
        return (FAMILY_ORDER[self.family], self.mode.twice_value)

    def __lt__(self, other: "BasisElement") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return f"{self.family}({self.mode})"

    __repr__ = __str__


def L(n: RationalLike) -> BasisElement:
    return BasisElement("L", Mode.of(n))


def Y(p: RationalLike) -> BasisElement:
    return BasisElement("Y", Mode.of(p))


def M(m: RationalLike) -> BasisElement:
    return BasisElement("M", Mode.of(m))


def check_parity(params: AlgebraParams, b: BasisElement) -> None:
    """Raise :class:`ParityError` unless ``b`` is a basis vector for ``params``."""
    if b.family == "Y":
        if (b.mode.twice_value - params.s.twice_value) % 2:
            raise ParityError(f"{b}: Y modes must lie in {params.s} + Z")
    elif not b.mode.is_integer:
        raise ParityError(f"{b}: {b.family} modes must be integers")


def parse_basis_element(text: str, params: AlgebraParams) -> BasisElement:
    m = _ELEMENT_RE.match(text)
    if not m:
        raise MalformedElementError(f"cannot parse basis element {text!r}")
    family, mode_text = m.groups()
    if not _RATIONAL_RE.match(mode_text):
        raise MalformedElementError(f"malformed mode {mode_text!r} in {text!r}")
    b = BasisElement(family, Mode.of(mode_text))
    check_parity(params, b)
    return b


class Element:
    """Finite linear combination of basis elements with exact coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[BasisElement, RationalLike] | Iterable[tuple[BasisElement, RationalLike]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[BasisElement, Fraction] = {}
        for b, c in items:
            acc[b] = acc.get(b, Fraction(0)) + Fraction(c)
        self._terms = {b: acc[b] for b in sorted(acc) if acc[b] != 0}

    @classmethod
    def basis(cls, b: BasisElement, coeff: RationalLike = 1) -> "Element":
        return cls({b: coeff})

    @property
    def terms(self) -> Mapping[BasisElement, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __iter__(self) -> Iterator[BasisElement]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coeff(self, b: BasisElement) -> Fraction:
        return self._terms.get(b, Fraction(0))

    def __add__(self, other: "Element") -> "Element":
        return Element(list(self._terms.items()) + list(other._terms.items()))

    def __neg__(self) -> "Element":
        return Element({b: -c for b, c in self._terms.items()})

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __mul__(self, scalar: RationalLike) -> "Element":
        k = Fraction(scalar)
        return Element({b: k * c for b, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Element):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for b, c in self._terms.items():
            parts.append(str(b) if c == 1 else f"({format_rational(c)})*{b}")
        return " + ".join(parts)

    __repr__ = __str__


def bracket_basis(params: AlgebraParams, a: BasisElement, b: BasisElement) -> tuple[BasisElement, Fraction] | None:
    """Bracket of two basis vectors: ``(basis element, coefficient)`` or None."""
    fa, fb = a.family, b.family
    if fa == "L":
        n = a.mode.value
        if fb == "L":
            c = b.mode.value - n
        elif fb == "Y":
            c = b.mode.value - (params.lam + 1) * n / 2 + params.mu
        else:
            c = b.mode.value - params.lam * n + 2 * params.mu
        if c == 0:
            return None
        return BasisElement(fb, a.mode + b.mode), Fraction(c)
    if fb == "L":
        res = bracket_basis(params, b, a)
        return None if res is None else (res[0], -res[1])
    if fa == "Y" and fb == "Y":
        c = b.mode.value - a.mode.value
        if c == 0:
            return None
        return BasisElement("M", a.mode + b.mode), Fraction(c)
    return None


def bracket(params: AlgebraParams, x: Element, y: Element) -> Element:
    """Bilinear bracket of two elements."""
    for b in list(x) + list(y):
        check_parity(params, b)
    out: list[tuple[BasisElement, Fraction]] = []
    for a, ca in x.items():
        for b, cb in y.items():
            res = bracket_basis(params, a, b)
            if res is not None:
                out.append((res[0], ca * cb * res[1]))
    return Element(out)


def ad_weight(params: AlgebraParams, b: BasisElement) -> Fraction:
    """Eigenvalue of ``ad L_0`` on ``b``."""
    check_parity(params, b)
    if b.family == "L":
        return b.mode.value
    if b.family == "Y":
        return b.mode.value + params.mu
    return b.mode.value + 2 * params.mu


@dataclass(frozen=True)
class Window:
    """Modes ``|n| <= bound`` (``Y_{s+n}`` for Y), with core ``|n| <= core``."""

    bound: int
    core: int = 0

    def __post_init__(self) -> None:
        if self.bound < 0 or self.core < 0:
            raise WindowError(f"window bounds must be non-negative (M={self.bound}, C={self.core})")
        if self.core > self.bound // 2:
            raise WindowError(f"core C={self.core} exceeds floor(M/2) for M={self.bound}")

    @property
    def size(self) -> int:
        return 3 * (2 * self.bound + 1)

    def contains(self, b: BasisElement, s: Mode, *, bound: int | None = None) -> bool:
        k = self.bound if bound is None else bound
        t = b.mode.twice_value - (s.twice_value if b.family == "Y" else 0)
        return -2 * k <= t <= 2 * k

    def in_core(self, b: BasisElement, s: Mode) -> bool:
        return self.contains(b, s, bound=self.core)

    def core_window(self) -> "Window":
        return Window(self.core, 0)

    def grown(self, step: int = 2) -> "Window":
        return Window(self.bound + step, self.core)


def enumerate_window(params: AlgebraParams, window: Window, *, bound: int | None = None) -> list[BasisElement]:
    """Window basis in canonical order: L < Y < M, modes ascending."""
    k = window.bound if bound is None else bound
    s2 = params.s.twice_value
    out = [BasisElement("L", Mode(2 * n)) for n in range(-k, k + 1)]
    out += [BasisElement("Y", Mode(2 * n + s2)) for n in range(-k, k + 1)]
    out += [BasisElement("M", Mode(2 * n)) for n in range(-k, k + 1)]
    return out


OUTSIDE = "outside"


@dataclass
class BracketTable:
    """Cached structure constants on a window basis.

    ``table[i][j]`` is None when the bracket vanishes, :data:`OUTSIDE` when it
    is non-zero but leaves the window, else ``(k, coeff)`` with ``k`` an index.
    """

    params: AlgebraParams
    window: Window
    basis: list[BasisElement] = field(init=False)
    index: dict[BasisElement, int] = field(init=False)
    weights: list[Fraction] = field(init=False)
    table: list[list] = field(init=False, repr=False)
    _preimages: dict | None = field(init=False, default=None, repr=False)

    def __post_init__(self) -> None:
        self.basis = enumerate_window(self.params, self.window)
        self.index = {b: i for i, b in enumerate(self.basis)}
        self.weights = [ad_weight(self.params, b) for b in self.basis]
        n = len(self.basis)
        table: list[list] = [[None] * n for _ in range(n)]
        for i, a in enumerate(self.basis):
            row = table[i]
            for j, b in enumerate(self.basis):
                res = bracket_basis(self.params, a, b)
                if res is None:
                    continue
                k = self.index.get(res[0])
                row[j] = OUTSIDE if k is None else (k, res[1])
        self.table = table

    def __len__(self) -> int:
        return len(self.basis)

    def preimages(self, k: int) -> list[tuple[int, int, Fraction]]:
        """All ``(i, j, coeff)`` with ``[basis[i], basis[j]] = coeff * basis[k]``."""
        if self._preimages is None:
            pre: dict[int, list[tuple[int, int, Fraction]]] = {}
            for i, row in enumerate(self.table):
                for j, res in enumerate(row):
                    if res is not None and res is not OUTSIDE:
                        pre.setdefault(res[0], []).append((i, j, res[1]))
            self._preimages = pre
        return self._preimages.get(k, [])


def bracket_law_defects(params: AlgebraParams, window: Window) -> tuple[list, list]:
    """Antisymmetry and Jacobi failures over all ordered window triples.

    Inner brackets may leave the window; they are evaluated on the full
    algebra. Coefficients are rescaled to integers by a common denominator so
    the triple loop runs on plain ints. Returns ``(antisymmetry_pairs,
    jacobi_triples)``, both empty when the laws hold.
    """
    basis = enumerate_window(params, window)
    scale = 2 * params.lam.denominator * params.mu.denominator
    index: dict[BasisElement, int] = {b: i for i, b in enumerate(basis)}
    cache: dict[tuple[int, int], tuple[int, int] | None] = {}

    def idx(b: BasisElement) -> int:
        if b not in index:
            index[b] = len(basis)
            basis.append(b)
        return index[b]

    def br(i: int, j: int) -> tuple[int, int] | None:
        key = (i, j)
        if key not in cache:
            r = bracket_basis(params, basis[i], basis[j])
            if r is None:
                cache[key] = None
            else:
                c = r[1] * scale
                assert c.denominator == 1
                cache[key] = (idx(r[0]), int(c))
        return cache[key]

    n = len(basis)
    rng = range(n)
    anti = []
    for i in rng:
        for j in rng:
            u, v = br(i, j), br(j, i)
            if (u is None) != (v is None) or (u is not None and (u[0] != v[0] or u[1] != -v[1])):
                anti.append((basis[i], basis[j]))

    jac = []
    for x in rng:
        for y in rng:
            xy = br(x, y)
            for z in rng:
                acc: dict[int, int] = {}
                for a, inner in ((x, br(y, z)), (y, br(z, x)), (z, xy)):
                    if inner is not None:
                        outer = br(a, inner[0])
                        if outer is not None:
                            acc[outer[0]] = acc.get(outer[0], 0) + inner[1] * outer[1]
                if any(acc.values()):
                    jac.append((basis[x], basis[y], basis[z]))
    return anti, jac
