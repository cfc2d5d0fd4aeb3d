"""Exact scalars and dense/sparse linear algebra over Q and Q(i).

Rationals are plain :class:`fractions.Fraction`.  Gaussian rationals get a
small dedicated type because only the su(2,2) computations need them.

Most routines accept either a :class:`Mat` or a list of rows, and vectors as
plain lists.  Internally elimination works on sparse ``{column: value}`` rows,
which keeps the chain-complex matrices (a few thousand columns, mostly zero)
cheap to reduce.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "Fraction",
    "GaussScalar",
    "Mat",
    "InconsistentSystem",
    "as_scalar",
    "echelon",
    "rank",
    "kernel",
    "solve",
    "span_basis",
    "subspace_sum",
    "subspace_intersection",
    "in_span",
    "signature",
    "inverse",
    "determinant",
    "to_sparse",
    "to_dense",
]


class InconsistentSystem(ValueError):
    """Raised by :func:`solve` when ``m x = b`` has no solution."""


def as_scalar(x):
    """Coerce ints to Fraction; leave Fractions and GaussScalars alone."""
    if isinstance(x, (Fraction, GaussScalar)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


class GaussScalar:
    """Gaussian rational re + i*im with Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussScalar is immutable")

    @staticmethod
    def _lift(other):
        if isinstance(other, GaussScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussScalar(other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussScalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussScalar(self.re * o.re - self.im * o.im,
                           self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussScalar(-self.re, -self.im)

    def __pos__(self):
        return self

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "GaussScalar":
        return GaussScalar(self.re, -self.im)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        d = o.norm()
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * o.conjugate()
        return GaussScalar(num.re / d, num.im / d)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o / self

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussScalar({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


I = GaussScalar(0, 1)


class Mat:
    """Immutable dense matrix stored row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        ent = tuple(as_scalar(e) for e in entries)
        if len(ent) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(ent)}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", ent)

    def __setattr__(self, name, value):
        raise AttributeError("Mat is immutable")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "Mat":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, [x for r in rows for x in r])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Mat":
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def col(self, j: int) -> list:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def to_rows(self) -> list[list]:
        return [self.row(i) for i in range(self.rows)]

    def transpose(self) -> "Mat":
        return Mat(self.cols, self.rows,
                   [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    T = property(transpose)

    def __add__(self, other: "Mat") -> "Mat":
        self._same_shape(other)
        return Mat(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "Mat") -> "Mat":
        self._same_shape(other)
        return Mat(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self) -> "Mat":
        return Mat(self.rows, self.cols, [-a for a in self.entries])

    def scale(self, c) -> "Mat":
        return Mat(self.rows, self.cols, [c * a for a in self.entries])

    def _same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def __matmul__(self, other):
        if isinstance(other, Mat):
            if self.cols != other.rows:
                raise ValueError("dimension mismatch in product")
            out = []
            ocols = [other.col(j) for j in range(other.cols)]
            for i in range(self.rows):
                r = self.row(i)
                for c in ocols:
                    s = 0
                    for a, b in zip(r, c):
                        if a and b:
                            s += a * b
                    out.append(s)
            return Mat(self.rows, other.cols, out)
        vec = list(other)
        if len(vec) != self.cols:
            raise ValueError("dimension mismatch in matrix-vector product")
        res = []
        for i in range(self.rows):
            s = 0
            for a, b in zip(self.row(i), vec):
                if a and b:
                    s += a * b
            res.append(as_scalar(s))
        return res

    __mul__ = __matmul__

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __eq__(self, other):
        return (isinstance(other, Mat) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in self.row(i)) for i in range(self.rows))
        return f"Mat({self.rows}x{self.cols}: [{body}])"


# -- sparse helpers ---------------------------------------------------------

def to_sparse(vec: Sequence) -> dict:
    return {i: as_scalar(x) for i, x in enumerate(vec) if x}


def to_dense(row: dict, n: int) -> list:
    out = [Fraction(0)] * n
    for i, x in row.items():
        out[i] = x
    return out


def _rows_of(m) -> tuple[list[dict], int]:
    if isinstance(m, Mat):
        return [to_sparse(m.row(i)) for i in range(m.rows)], m.cols
    rows = list(m)
    if not rows:
        return [], 0
    if isinstance(rows[0], dict):
        ncols = 1 + max((max(r) for r in rows if r), default=-1)
        return [dict(r) for r in rows], ncols
    return [to_sparse(r) for r in rows], len(rows[0])


def echelon(rows: Iterable[dict], col_order: Sequence[int] | None = None) -> dict[int, dict]:
    """Reduced row echelon form of sparse rows.

    Returns ``{pivot_column: row}`` where every row has a 1 in its pivot and a
    0 in every other pivot column.  ``col_order`` ranks columns for pivot
    choice (earlier is preferred); pivot choice never changes the row space.
    """
    rank_of = None
    if col_order is not None:
        rank_of = {c: k for k, c in enumerate(col_order)}
    pivots: dict[int, dict] = {}
    for raw in rows:
        row = {k: v for k, v in raw.items() if v}
        hits = [c for c in row if c in pivots]
        for c in hits:
            f = row.get(c)
            if not f:
                continue
            for k, v in pivots[c].items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        if not row:
            continue
        if rank_of is None:
            p = min(row)
        else:
            p = min(row, key=lambda c: (rank_of.get(c, len(rank_of) + c), c))
        inv = 1 / row[p]
        if inv != 1:
            row = {k: v * inv for k, v in row.items()}
        for prow in pivots.values():
            f = prow.get(p)
            if f:
                for k, v in row.items():
                    nv = prow.get(k, 0) - f * v
                    if nv:
                        prow[k] = nv
                    else:
                        prow.pop(k, None)
        pivots[p] = row
    return pivots


def rank(m, col_order: Sequence[int] | None = None) -> int:
    rows, _ = _rows_of(m)
    return len(echelon(rows, col_order))


def kernel(m, ncols: int | None = None) -> list[list]:
    """Basis of the null space ``{x : m x = 0}`` as dense vectors."""
    rows, nc = _rows_of(m)
    if ncols is not None:
        nc = ncols
    piv = echelon(rows)
    free = [c for c in range(nc) if c not in piv]
    basis = []
    for f in free:
        vec = [Fraction(0)] * nc
        vec[f] = Fraction(1)
        for p, row in piv.items():
            v = row.get(f)
            if v:
                vec[p] = -v
        basis.append(vec)
    return basis


def solve(m, b: Sequence, check: bool = True) -> list:
    """One solution of ``m x = b`` (free variables set to zero)."""
    rows, nc = _rows_of(m)
    if isinstance(m, Mat):
        nc = m.cols
    b = [as_scalar(x) for x in b]
    if len(b) != len(rows):
        raise ValueError("right-hand side has wrong length")
    aug = []
    for r, bi in zip(rows, b):
        rr = dict(r)
        if bi:
            rr[nc] = bi
        aug.append(rr)
    order = list(range(nc)) + [nc]
    piv = echelon(aug, order)
    if nc in piv:
        raise InconsistentSystem("system m x = b is inconsistent")
    x = [Fraction(0)] * nc
    for p, row in piv.items():
        x[p] = row.get(nc, Fraction(0))
    if check:
        for r, bi in zip(rows, b):
            s = sum((v * x[k] for k, v in r.items()), Fraction(0))
            if s != bi:
                raise AssertionError("back-substitution failed in solve")
    return x


def span_basis(vectors: Iterable[Sequence], n: int | None = None) -> list[list]:
    """Reduced basis of the span of the given dense vectors."""
    vecs = [list(v) for v in vectors]
    if n is None:
        if not vecs:
            return []
        n = len(vecs[0])
    piv = echelon(to_sparse(v) for v in vecs)
    return [to_dense(piv[p], n) for p in sorted(piv)]


def in_span(vec: Sequence, basis: Sequence[Sequence]) -> bool:
    if not any(vec):
        return True
    return rank(list(basis) + [list(vec)]) == rank(list(basis)) if basis else False


def subspace_sum(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    n = len(a[0]) if a else (len(b[0]) if b else 0)
    return span_basis(list(a) + list(b), n)


def subspace_intersection(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    """Basis of span(a) ∩ span(b)."""
    a = [list(v) for v in a]
    b = [list(v) for v in b]
    if not a or not b:
        return []
    n = len(a[0])
    if any(len(v) != n for v in a + b):
        raise ValueError("vectors of unequal length")
    a = span_basis(a, n)
    b = span_basis(b, n)
    if not a or not b:
        return []
    # columns: a_1..a_p, -b_1..-b_q ; kernel gives the common vectors
    cols = a + [[-x for x in v] for v in b]
    m = [[cols[j][i] for j in range(len(cols))] for i in range(n)]
    ker = kernel(m, len(cols))
    out = []
    for k in ker:
        vec = [Fraction(0)] * n
        for j, c in enumerate(k[:len(a)]):
            if c:
                for i in range(n):
                    vec[i] += c * a[j][i]
        out.append(vec)
    return span_basis(out, n)


def signature(m) -> tuple[int, int, int]:
    """(positive, negative, zero) inertia of a rational symmetric matrix.

    Uses symmetric Gaussian elimination (congruence), so no square roots or
    eigenvalues are needed.
    """
    a = m.to_rows() if isinstance(m, Mat) else [[as_scalar(x) for x in r] for r in m]
    n = len(a)
    for i in range(n):
        for j in range(n):
            if a[i][j] != a[j][i]:
                raise ValueError("matrix is not symmetric")
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # e_i + e_j has nonzero square; replace row/col i by it
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = i
        d = a[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        rest = [k for k in active if k != piv]
        for r in rest:
            f = a[r][piv] / d
            if f:
                for c in active:
                    a[r][c] -= f * a[piv][c]
        for r in rest:
            a[r][piv] = Fraction(0)
            a[piv][r] = Fraction(0)
        active = rest
    return pos, neg, n - pos - neg


def inverse(m) -> Mat:
    mm = m if isinstance(m, Mat) else Mat.from_rows(m)
    n = mm.rows
    if mm.cols != n:
        raise ValueError("inverse of non-square matrix")
    rows = []
    for i in range(n):
        r = to_sparse(mm.row(i))
        r[n + i] = Fraction(1)
        rows.append(r)
    piv = echelon(rows, list(range(2 * n)))
    if any(p >= n for p in piv) or len(piv) < n:
        raise ZeroDivisionError("matrix is singular")
    out = []
    for i in range(n):
        row = piv[i]
        out.append([row.get(n + j, Fraction(0)) for j in range(n)])
    return Mat.from_rows(out)


def determinant(m) -> Fraction:
    a = m.to_rows() if isinstance(m, Mat) else [[as_scalar(x) for x in r] for r in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return det
