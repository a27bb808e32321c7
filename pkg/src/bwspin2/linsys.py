"""Exact linear algebra over complex rationals.

Elimination runs fraction-free on Gaussian-integer rows (each input row is
scaled by the lcm of its denominators, every row is kept primitive) and
only the final reduced row echelon form is converted back to
:class:`~bwspin2.exact.CRational`.  Because the RREF of a matrix is unique,
the internal pivot bookkeeping never leaks into results: pivots are the
leftmost nonzero columns, rows are returned in pivot order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exact import CRational, ONE, ZERO, format_crational


class DimensionMismatch(ValueError):
    pass


class ExactMatrix:
    """Matrix of CRational entries with sparse row storage.

    Accepts a dense nested sequence; :meth:`from_sparse` builds one from
    ``{column: value}`` rows.  Zero entries are never stored.
    """

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, rows: Sequence[Sequence] = (), ncols: int | None = None):
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatch("ragged rows in ExactMatrix")
        self.nrows = len(rows)
        self.ncols = ncols
        self._rows = []
        for r in rows:
            d = {}
            for j, x in enumerate(r):
                x = CRational.coerce(x)
                if x:
                    d[j] = x
            self._rows.append(d)

    @classmethod
    def from_sparse(cls, rows: Iterable[Mapping[int, CRational]], ncols: int) -> "ExactMatrix":
        obj = cls.__new__(cls)
        obj.ncols = ncols
        obj._rows = []
        for r in rows:
            d = {}
            for j, x in r.items():
                if not 0 <= j < ncols:
                    raise DimensionMismatch(f"column {j} out of range for {ncols} columns")
                x = CRational.coerce(x)
                if x:
                    d[j] = x
            obj._rows.append(d)
        obj.nrows = len(obj._rows)
        return obj

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls.from_sparse([{i: ONE} for i in range(n)], n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "ExactMatrix":
        return cls.from_sparse([{} for _ in range(nrows)], ncols)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def entry(self, i: int, j: int) -> CRational:
        return self._rows[i].get(j, ZERO)

    def sparse_row(self, i: int) -> dict[int, CRational]:
        return dict(self._rows[i])

    def sparse_rows(self) -> list[dict[int, CRational]]:
        return [dict(r) for r in self._rows]

    def row(self, i: int) -> list[CRational]:
        r = self._rows[i]
        return [r.get(j, ZERO) for j in range(self.ncols)]

    def to_dense(self) -> list[list[CRational]]:
        return [self.row(i) for i in range(self.nrows)]

    def transpose(self) -> "ExactMatrix":
        cols: list[dict] = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self._rows):
            for j, x in r.items():
                cols[j][i] = x
        return ExactMatrix.from_sparse(cols, self.nrows)

    def stack(self, other: "ExactMatrix") -> "ExactMatrix":
        if other.ncols != self.ncols:
            raise DimensionMismatch(f"cannot stack {self.ncols} and {other.ncols} columns")
        return ExactMatrix.from_sparse(self._rows + other._rows, self.ncols)

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if other.nrows != self.nrows:
            raise DimensionMismatch("row counts differ")
        rows = []
        for a, b in zip(self._rows, other._rows):
            d = dict(a)
            d.update({j + self.ncols: x for j, x in b.items()})
            rows.append(d)
        return ExactMatrix.from_sparse(rows, self.ncols + other.ncols)

    def apply(self, vec: Sequence[CRational]) -> list[CRational]:
        if len(vec) != self.ncols:
            raise DimensionMismatch("vector length does not match column count")
        out = []
        for r in self._rows:
            acc = ZERO
            for j, x in r.items():
                v = vec[j]
                if v:
                    acc = acc + x * v
            out.append(acc)
        return out

    def matmul(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch("inner dimensions differ")
        rows = []
        for r in self._rows:
            acc: dict[int, CRational] = {}
            for k, x in r.items():
                for j, y in other._rows[k].items():
                    s = acc.get(j)
                    acc[j] = x * y if s is None else s + x * y
            rows.append({j: v for j, v in acc.items() if v})
        return ExactMatrix.from_sparse(rows, other.ncols)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __repr__(self):
        return f"ExactMatrix({self.nrows}x{self.ncols}, nnz={sum(len(r) for r in self._rows)})"

    def to_json(self) -> list[list[str]]:
        return [[format_crational(x) for x in self.row(i)] for i in range(self.nrows)]


# --- Gaussian-integer row kernel -------------------------------------------------

def _to_gauss_row(row: Mapping[int, CRational]) -> dict[int, tuple[int, int]]:
    den = 1
    for x in row.values():
        for q in (x.re, x.im):
            d = q.denominator
            if d != 1:
                den = den * d // math.gcd(den, d)
    out = {}
    for j, x in row.items():
        re = x.re.numerator * (den // x.re.denominator)
        im = x.im.numerator * (den // x.im.denominator)
        if re or im:
            out[j] = (re, im)
    return out


def _primitive(row: dict[int, tuple[int, int]]) -> dict[int, tuple[int, int]]:
    g = 0
    for re, im in row.values():
        g = math.gcd(g, re, im)
        if g == 1:
            return row
    if g > 1:
        return {j: (re // g, im // g) for j, (re, im) in row.items()}
    return row


def _combine(p: int, row: dict, b: tuple[int, int], prow: dict) -> dict:
    """p*row - b*prow with p a positive integer and b Gaussian."""
    br, bi = b
    out = {j: (p * re, p * im) for j, (re, im) in row.items()} if p != 1 else dict(row)
    for j, (xr, xi) in prow.items():
        dr = br * xr - bi * xi
        di = br * xi + bi * xr
        cur = out.get(j)
        if cur is None:
            out[j] = (-dr, -di)
        else:
            nr, ni = cur[0] - dr, cur[1] - di
            if nr or ni:
                out[j] = (nr, ni)
            else:
                del out[j]
    return out


class RowSpace:
    """Incrementally maintained fully reduced echelon basis of a row span."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self._piv: dict[int, dict[int, tuple[int, int]]] = {}

    @property
    def rank(self) -> int:
        return len(self._piv)

    @property
    def pivots(self) -> list[int]:
        return sorted(self._piv)

    def _reduce(self, row: dict) -> dict:
        hits = [c for c in row if c in self._piv]
        for c in hits:
            b = row.get(c)
            if b is None:
                continue
            prow = self._piv[c]
            row = _primitive(_combine(prow[c][0], row, b, prow))
        return row

    def add(self, row: Mapping[int, CRational]) -> bool:
        """Insert a row; True if it enlarged the span."""
        return self._add_gauss(_to_gauss_row(row))

    def _add_gauss(self, g: dict) -> bool:
        g = self._reduce(g)
        if not g:
            return False
        c0 = min(g)
        ar, ai = g[c0]
        if ai or ar < 0:
            # multiply by the conjugate so the pivot is a positive integer
            g = {j: (ar * xr + ai * xi, ar * xi - ai * xr) for j, (xr, xi) in g.items()}
        g = _primitive(g)
        p = g[c0][0]
        for c, prow in self._piv.items():
            b = prow.get(c0)
            if b is not None:
                self._piv[c] = _primitive(_combine(p, prow, b, g))
        self._piv[c0] = g
        return True

    def contains(self, row: Mapping[int, CRational]) -> bool:
        return not self._reduce(_to_gauss_row(row))

    def reduced_rows(self) -> list[dict[int, CRational]]:
        out = []
        for c in sorted(self._piv):
            g = self._piv[c]
            p = g[c][0]
            out.append({j: CRational(Fraction(re, p), Fraction(im, p)) for j, (re, im) in sorted(g.items())})
        return out

    def copy(self) -> "RowSpace":
        other = RowSpace(self.ncols)
        other._piv = dict(self._piv)
        return other


def row_space(m: ExactMatrix) -> RowSpace:
    rs = RowSpace(m.ncols)
    for r in m._rows:
        if r:
            rs.add(r)
    return rs


@dataclass(frozen=True)
class RrefResult:
    reduced: ExactMatrix
    rank: int
    pivots: list


def rref(m: ExactMatrix) -> RrefResult:
    """Reduced row echelon form; zero rows are placed after the pivot rows."""
    rs = row_space(m)
    rows = rs.reduced_rows()
    rows += [{} for _ in range(m.nrows - len(rows))]
    return RrefResult(ExactMatrix.from_sparse(rows, m.ncols), rs.rank, rs.pivots)


def rank(m: ExactMatrix) -> int:
    return row_space(m).rank


def _normalize_first_nonzero(vec: list[CRational]) -> list[CRational]:
    lead = next((x for x in vec if x), None)
    if lead is None or lead == ONE:
        return vec
    inv = lead.inverse()
    return [x * inv if x else x for x in vec]


def nullspace_from_space(rs: RowSpace) -> list[list[CRational]]:
    rows = rs.reduced_rows()
    pivots = rs.pivots
    piv_set = set(pivots)
    basis = []
    for f in range(rs.ncols):
        if f in piv_set:
            continue
        vec = [ZERO] * rs.ncols
        vec[f] = ONE
        for pc, row in zip(pivots, rows):
            x = row.get(f)
            if x:
                vec[pc] = -x
        basis.append(_normalize_first_nonzero(vec))
    return basis


def nullspace(m: ExactMatrix) -> list[list[CRational]]:
    """Basis of {v : m v = 0}, one vector per free column, first nonzero entry 1."""
    return nullspace_from_space(row_space(m))


def span_equal(a: ExactMatrix, b: ExactMatrix) -> bool:
    if a.ncols != b.ncols:
        raise DimensionMismatch(f"column counts differ: {a.ncols} vs {b.ncols}")
    ra = row_space(a)
    rb = row_space(b)
    if ra.rank != rb.rank:
        return False
    return all(ra.contains(r) for r in b._rows if r)


def span_contains(a: ExactMatrix, b: ExactMatrix) -> bool:
    """True iff every row of ``b`` lies in the row span of ``a``."""
    if a.ncols != b.ncols:
        raise DimensionMismatch(f"column counts differ: {a.ncols} vs {b.ncols}")
    ra = row_space(a)
    return all(ra.contains(r) for r in b._rows if r)


def inverse(m: ExactMatrix) -> ExactMatrix:
    n = m.nrows
    if n != m.ncols:
        raise DimensionMismatch("inverse of a non-square matrix")
    res = rref(m.hstack(ExactMatrix.identity(n)))
    if res.rank < n or res.pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    rows = [{j - n: x for j, x in res.reduced.sparse_row(i).items() if j >= n} for i in range(n)]
    return ExactMatrix.from_sparse(rows, n)
