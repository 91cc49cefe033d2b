"""Sparse exact linear algebra over the rationals.

Elimination is incremental Gauss-Jordan: each incoming row is reduced against
the current fully reduced pivot rows, so a reduction only ever touches free
columns of the same connected block. Pivot is the first non-zero column.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Generic, Hashable, Iterable, Mapping, Sequence, TypeVar

Row = dict[int, Fraction]
K = TypeVar("K", bound=Hashable)


def _clean(row: Mapping[int, object]) -> Row:
    return {c: Fraction(v) for c, v in sorted(row.items()) if v != 0}


@dataclass
class SparseMatrix:
    n_rows: int
    n_cols: int
    rows: list[Row]

    def __post_init__(self) -> None:
        if len(self.rows) != self.n_rows:
            raise ValueError(f"expected {self.n_rows} rows, got {len(self.rows)}")
        cleaned = []
        for r in self.rows:
            r = _clean(r)
            if r and (min(r) < 0 or max(r) >= self.n_cols):
                raise ValueError("column index out of range")
            cleaned.append(r)
        self.rows = cleaned

    @classmethod
    def from_rows(cls, rows: Sequence[Mapping[int, object]], n_cols: int) -> "SparseMatrix":
        return cls(len(rows), n_cols, [dict(r) for r in rows])

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[object]], n_cols: int | None = None) -> "SparseMatrix":
        if n_cols is None:
            n_cols = len(dense[0]) if dense else 0
        rows = [{j: Fraction(v) for j, v in enumerate(r) if v != 0} for r in dense]
        return cls(len(rows), n_cols, rows)

    def to_dense(self) -> list[list[Fraction]]:
        out = []
        for r in self.rows:
            d = [Fraction(0)] * self.n_cols
            for c, v in r.items():
                d[c] = v
            out.append(d)
        return out

    def apply(self, v: Mapping[int, Fraction]) -> list[Fraction]:
        """Matrix-vector product with a sparse vector."""
        return [sum((x * v.get(c, 0) for c, x in r.items()), Fraction(0)) for r in self.rows]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.n_rows, self.n_cols, self.rows) == (other.n_rows, other.n_cols, other.rows)


class RowReducer:
    """Incremental reduced row echelon form.

    ``pivots`` maps a pivot column to its normalized row; every stored row has
    a zero in every other pivot column. ``_users`` indexes, for each non-pivot
    column, the pivot rows that have a non-zero there.
    """

    def __init__(self, n_cols: int):
        self.n_cols = n_cols
        self.pivots: dict[int, Row] = {}
        self._users: dict[int, set[int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: Mapping[int, object]) -> Row:
        r = {c: Fraction(v) for c, v in row.items() if v != 0}
        for p in [c for c in r if c in self.pivots]:
            a = r.get(p)
            if not a:
                continue
            for c, v in self.pivots[p].items():
                nv = r.get(c, 0) - a * v
                if nv:
                    r[c] = nv
                else:
                    r.pop(c, None)
        return r

    def add(self, row: Mapping[int, object]) -> bool:
        """Insert a row; return True when the rank grows."""
        r = self.reduce(row)
        if not r:
            return False
        p = min(r)
        lead = r[p]
        if lead != 1:
            r = {c: v / lead for c, v in r.items()}
        for q in self._users.pop(p, ()):
            other = self.pivots[q]
            a = other[p]
            for c, v in r.items():
                nv = other.get(c, 0) - a * v
                if nv:
                    other[c] = nv
                    if c != q:
                        self._users.setdefault(c, set()).add(q)
                else:
                    other.pop(c, None)
                    users = self._users.get(c)
                    if users is not None:
                        users.discard(q)
        self.pivots[p] = r
        for c in r:
            if c != p:
                self._users.setdefault(c, set()).add(p)
        return True

    def extend(self, rows: Iterable[Mapping[int, object]]) -> None:
        for r in rows:
            self.add(r)

    def rref_rows(self) -> list[Row]:
        return [dict(sorted(self.pivots[p].items())) for p in sorted(self.pivots)]

    def nullspace(self) -> list[Row]:
        basis = []
        for f in range(self.n_cols):
            if f in self.pivots:
                continue
            v = {f: Fraction(1)}
            for p in self._users.get(f, ()):
                v[p] = -self.pivots[p][f]
            basis.append(dict(sorted(v.items())))
        return basis


def rref_rank(m: SparseMatrix) -> tuple[SparseMatrix, int]:
    """Reduced row echelon form (zero rows at the bottom) and rank."""
    red = RowReducer(m.n_cols)
    red.extend(m.rows)
    rows = red.rref_rows()
    rank = len(rows)
    rows += [{} for _ in range(m.n_rows - rank)]
    return SparseMatrix(m.n_rows, m.n_cols, rows), rank


def rank(m: SparseMatrix) -> int:
    red = RowReducer(m.n_cols)
    red.extend(m.rows)
    return red.rank


def nullspace_basis(m: SparseMatrix) -> list[Row]:
    """Canonical kernel basis: one vector per free column, ascending.

    The vector for free column ``f`` has a 1 at ``f``, zero at the other free
    columns, and ``-rref[p][f]`` at each pivot column ``p``.
    """
    red = RowReducer(m.n_cols)
    red.extend(m.rows)
    return red.nullspace()


def span_basis(vectors: Iterable[Mapping[int, object]], n_cols: int) -> list[Row]:
    """RREF basis of the span of ``vectors``."""
    red = RowReducer(n_cols)
    red.extend(vectors)
    return red.rref_rows()


@dataclass
class ConstraintSystem(Generic[K]):
    """Linear system over named unknowns; column ``i`` is ``unknowns[i]``."""

    matrix: SparseMatrix
    unknowns: list[K]
    row_labels: list[object] = field(default_factory=list)
    index: dict[K, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.index = {u: i for i, u in enumerate(self.unknowns)}
        if len(self.index) != len(self.unknowns) or len(self.unknowns) != self.matrix.n_cols:
            raise ValueError("unknown index must be a bijection onto the columns")

    @property
    def n_unknowns(self) -> int:
        return len(self.unknowns)

    def kernel(self) -> list[dict[K, Fraction]]:
        return [{self.unknowns[c]: v for c, v in vec.items()} for vec in nullspace_basis(self.matrix)]
