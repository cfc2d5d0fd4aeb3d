"""so(n+1, n) in block form, its |2|-grading, and general matrix Lie algebras.

The metric on R^(2n+1) is the anti-diagonal form

    [[0, 0, I], [0, 1, 0], [I, 0, 0]]

and an element of the Lie algebra is the block matrix

    [[A,  v,   B ],
     [w,  0,  -v^t],
     [C, -w^t, -A^t]]

with B and C skew.  The minus signs on v^t and w^t are forced by the metric.
Grades: C is -2, w is -1, A is 0, v is +1, B is +2.  The basis is ordered
C, w, A, v, B with lexicographic indices inside each block.

Elements are coordinate vectors; structure constants are sparse dicts.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .rational_linalg import (
    InconsistentSystem,
    Mat,
    echelon,
    kernel,
    rank,
    solve,
    span_basis,
    to_sparse,
)
from .report import Report

__all__ = [
    "LieAlgebra",
    "MatrixLieAlgebra",
    "GradedLieAlgebra",
    "BlockElement",
    "GradingElement",
    "build_so",
    "so_of_form",
    "bracket",
    "grading_element",
    "nilradical_check",
    "killing_form",
    "metric_J",
    "commutator",
    "mat_mul",
]

SparseMat = dict  # {(i, j): value}


def mat_mul(a: SparseMat, b: SparseMat) -> SparseMat:
    by_row: dict[int, list] = {}
    for (k, j), v in b.items():
        by_row.setdefault(k, []).append((j, v))
    out: SparseMat = {}
    for (i, k), u in a.items():
        for j, v in by_row.get(k, ()):
            key = (i, j)
            s = out.get(key, 0) + u * v
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


def commutator(a: SparseMat, b: SparseMat) -> SparseMat:
    out = dict(mat_mul(a, b))
    for key, v in mat_mul(b, a).items():
        s = out.get(key, 0) - v
        if s:
            out[key] = s
        else:
            out.pop(key, None)
    return out


def _axpy(acc: dict, c, x: dict) -> None:
    """acc += c * x, dropping zeros."""
    if not c:
        return
    for k, v in x.items():
        s = acc.get(k, 0) + c * v
        if s:
            acc[k] = s
        else:
            acc.pop(k, None)


def _as_sparse(x) -> dict:
    if isinstance(x, dict):
        return {k: v for k, v in x.items() if v}
    return to_sparse(x)


class LieAlgebra:
    """A Lie algebra given by sparse structure constants ``table[i][j]``."""

    def __init__(self, dim: int, table: list[list[dict]], names: Sequence[str] | None = None):
        self.dim = dim
        self.table = table
        self.names = list(names) if names is not None else [f"e{i}" for i in range(dim)]
        self._killing = None

    # -- arithmetic -------------------------------------------------------
    def bracket_sparse(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for i, a in x.items():
            row = self.table[i]
            for j, b in y.items():
                _axpy(out, a * b, row[j])
        return out

    def bracket(self, x, y) -> list:
        for z in (x, y):
            if not isinstance(z, dict) and len(z) != self.dim:
                raise ValueError("dimension mismatch")
        return self.dense(self.bracket_sparse(_as_sparse(x), _as_sparse(y)))

    def dense(self, x: dict) -> list:
        out = [Fraction(0)] * self.dim
        for k, v in x.items():
            out[k] = Fraction(v) if isinstance(v, int) else v
        return out

    def basis_vector(self, i: int) -> list:
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return v

    def ad(self, x) -> Mat:
        xs = _as_sparse(x)
        cols = []
        for j in range(self.dim):
            cols.append(self.dense(self.bracket_sparse(xs, {j: 1})))
        return Mat.from_rows([[cols[j][i] for j in range(self.dim)] for i in range(self.dim)])

    def _ad_sparse(self, i: int) -> dict:
        """ad(e_i) as {(row, col): value}."""
        out = {}
        for j in range(self.dim):
            for k, v in self.table[i][j].items():
                out[(k, j)] = v
        return out

    def killing_matrix(self) -> list[list[Fraction]]:
        if self._killing is None:
            ads = [self._ad_sparse(i) for i in range(self.dim)]
            K = [[Fraction(0)] * self.dim for _ in range(self.dim)]
            for i in range(self.dim):
                ai = ads[i]
                for j in range(i, self.dim):
                    aj = ads[j]
                    s = 0
                    for (r, c), v in ai.items():
                        w = aj.get((c, r))
                        if w:
                            s += v * w
                    K[i][j] = K[j][i] = Fraction(s)
            self._killing = K
        return self._killing

    def killing(self, x, y) -> Fraction:
        K = self.killing_matrix()
        xs, ys = _as_sparse(x), _as_sparse(y)
        return sum((a * b * K[i][j] for i, a in xs.items() for j, b in ys.items()), Fraction(0))

    # -- structural checks ------------------------------------------------
    def antisymmetry_violations(self) -> list[tuple[int, int]]:
        bad = []
        for i in range(self.dim):
            for j in range(i, self.dim):
                s = dict(self.table[i][j])
                _axpy(s, 1, self.table[j][i])
                if s:
                    bad.append((i, j))
        return bad

    def jacobi_violations(self, limit: int | None = None) -> list[tuple[int, int, int]]:
        bad = []
        for i, j, k in combinations(range(self.dim), 3):
            s: dict = {}
            _axpy(s, 1, self.bracket_sparse(self.table[i][j], {k: 1}))
            _axpy(s, 1, self.bracket_sparse(self.table[j][k], {i: 1}))
            _axpy(s, 1, self.bracket_sparse(self.table[k][i], {j: 1}))
            if s:
                bad.append((i, j, k))
                if limit and len(bad) >= limit:
                    break
        return bad

    def span_of_brackets(self, a: Iterable, b: Iterable) -> list[list]:
        a = [_as_sparse(x) for x in a]
        b = [_as_sparse(x) for x in b]
        vecs = [self.dense(self.bracket_sparse(x, y)) for x in a for y in b]
        return span_basis(vecs, self.dim)

    def is_subalgebra(self, vectors: Sequence[Sequence]) -> bool:
        basis = span_basis(vectors, self.dim)
        r = len(basis)
        for x, y in combinations(basis, 2):
            z = self.bracket(x, y)
            if any(z) and rank(basis + [z]) != r:
                return False
        return True


class MatrixLieAlgebra(LieAlgebra):
    """Lie algebra spanned by N×N matrices under the commutator."""

    def __init__(self, N: int, mats: Sequence[SparseMat], names: Sequence[str] | None = None):
        self.N = N
        self.mats = [dict(m) for m in mats]
        dim = len(self.mats)
        self._setup_coords()
        table = [[{} for _ in range(dim)] for _ in range(dim)]
        for i in range(dim):
            for j in range(i + 1, dim):
                c = self.coords_sparse(commutator(self.mats[i], self.mats[j]))
                table[i][j] = c
                table[j][i] = {k: -v for k, v in c.items()}
        super().__init__(dim, table, names)

    def _setup_coords(self) -> None:
        N2 = self.N * self.N
        rows = []
        for k, m in enumerate(self.mats):
            r = {i * self.N + j: Fraction(v) for (i, j), v in m.items() if v}
            r[N2 + k] = Fraction(1)
            rows.append(r)
        piv = echelon(rows, list(range(N2 + len(self.mats))))
        if any(p >= N2 for p in piv):
            raise ValueError("matrices are linearly dependent")
        self._coord_rows = {p: {k - N2: v for k, v in row.items() if k >= N2}
                            for p, row in piv.items()}

    def coords_sparse(self, m: SparseMat) -> dict:
        out: dict = {}
        for (i, j), v in m.items():
            p = i * self.N + j
            row = self._coord_rows.get(p)
            if row is not None:
                _axpy(out, v, row)
        # membership check
        back = self.matrix_sparse(out)
        diff = dict(m)
        _axpy(diff, -1, back)
        if diff:
            raise InconsistentSystem("matrix is not in the algebra")
        return out

    def coords(self, m: SparseMat) -> list:
        return self.dense(self.coords_sparse(m))

    def contains(self, m: SparseMat) -> bool:
        try:
            self.coords_sparse(m)
        except InconsistentSystem:
            return False
        return True

    def matrix_sparse(self, x) -> SparseMat:
        out: SparseMat = {}
        for k, c in _as_sparse(x).items():
            _axpy(out, c, self.mats[k])
        return out

    def matrix(self, x) -> Mat:
        m = self.matrix_sparse(x)
        return Mat(self.N, self.N, [m.get((i, j), 0) for i in range(self.N) for j in range(self.N)])


class BlockElement:
    """Constructor/view for the block form of an element of so(n+1, n)."""

    def __init__(self, n: int, A=None, v=None, B=None, w=None, C=None):
        z = Fraction(0)
        self.n = n
        self.A = [[Fraction(x) for x in r] for r in A] if A else [[z] * n for _ in range(n)]
        self.v = [Fraction(x) for x in v] if v else [z] * n
        self.B = [[Fraction(x) for x in r] for r in B] if B else [[z] * n for _ in range(n)]
        self.w = [Fraction(x) for x in w] if w else [z] * n
        self.C = [[Fraction(x) for x in r] for r in C] if C else [[z] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                if self.B[i][j] != -self.B[j][i]:
                    raise ValueError("B must be skew")
                if self.C[i][j] != -self.C[j][i]:
                    raise ValueError("C must be skew")

    def to_matrix(self) -> SparseMat:
        n = self.n
        m: SparseMat = {}

        def put(i, j, val):
            if val:
                m[(i, j)] = m.get((i, j), 0) + val

        for i in range(n):
            for j in range(n):
                put(i, j, self.A[i][j])
                put(n + 1 + j, n + 1 + i, -self.A[i][j])
                put(i, n + 1 + j, self.B[i][j])
                put(n + 1 + i, j, self.C[i][j])
            put(i, n, self.v[i])
            put(n, n + 1 + i, -self.v[i])
            put(n, i, self.w[i])
            put(n + 1 + i, n, -self.w[i])
        return {k: v for k, v in m.items() if v}

    @classmethod
    def from_matrix(cls, n: int, m: SparseMat) -> "BlockElement":
        g = lambda i, j: Fraction(m.get((i, j), 0))
        A = [[g(i, j) for j in range(n)] for i in range(n)]
        B = [[g(i, n + 1 + j) for j in range(n)] for i in range(n)]
        C = [[g(n + 1 + i, j) for j in range(n)] for i in range(n)]
        v = [g(i, n) for i in range(n)]
        w = [g(n, i) for i in range(n)]
        return cls(n, A, v, B, w, C)


def metric_J(n: int) -> SparseMat:
    """The metric [[0,0,I],[0,1,0],[I,0,0]] on R^(2n+1)."""
    m = {(n, n): Fraction(1)}
    for i in range(n):
        m[(i, n + 1 + i)] = Fraction(1)
        m[(n + 1 + i, i)] = Fraction(1)
    return m


class GradedLieAlgebra(MatrixLieAlgebra):
    """so(n+1, n) with its |2|-grading and block labels."""

    GRADE_OF_BLOCK = {"C": -2, "w": -1, "A": 0, "v": 1, "B": 2}

    def __init__(self, n: int, mats, names, blocks, labels):
        self.n = n
        self.blocks = list(blocks)
        self.labels = list(labels)
        super().__init__(2 * n + 1, mats, names)
        self.grades = [self.GRADE_OF_BLOCK[b] for b in self.blocks]

    def grade_indices(self, j: int) -> list[int]:
        return [i for i, g in enumerate(self.grades) if g == j]

    def block_indices(self, name: str) -> list[int]:
        return [i for i, b in enumerate(self.blocks) if b == name]

    def index(self, block: str, *label) -> int:
        key = tuple(label)
        for i, (b, l) in enumerate(zip(self.blocks, self.labels)):
            if b == block and l == key:
                return i
        raise KeyError((block, label))

    @property
    def p_indices(self) -> list[int]:
        return [i for i, g in enumerate(self.grades) if g >= 0]

    @property
    def pperp_indices(self) -> list[int]:
        return [i for i, g in enumerate(self.grades) if g > 0]

    @property
    def minus_indices(self) -> list[int]:
        return [i for i, g in enumerate(self.grades) if g < 0]

    def grade_part(self, x, j: int) -> list:
        v = list(x)
        return [c if self.grades[i] == j else Fraction(0) for i, c in enumerate(v)]

    def grade_additivity_violations(self) -> list[tuple[int, int]]:
        bad = []
        for i in range(self.dim):
            for j in range(self.dim):
                g = self.grades[i] + self.grades[j]
                if any(self.grades[k] != g for k in self.table[i][j]):
                    bad.append((i, j))
        return bad

    def element(self, be: BlockElement) -> list:
        return self.coords(be.to_matrix())

    def block_view(self, x) -> BlockElement:
        return BlockElement.from_matrix(self.n, self.matrix_sparse(x))


def build_so(n: int) -> GradedLieAlgebra:
    """so(n+1, n) in the block basis C, w, A, v, B."""
    if not isinstance(n, int) or n < 1:
        raise ValueError("build_so needs n >= 1")
    mats, names, blocks, labels = [], [], [], []
    z = lambda: [[0] * n for _ in range(n)]

    def skew(k, l):
        m = z()
        m[k][l] = 1
        m[l][k] = -1
        return m

    def unit(k):
        v = [0] * n
        v[k] = 1
        return v

    for k, l in combinations(range(n), 2):
        mats.append(BlockElement(n, C=skew(k, l)).to_matrix())
        names.append(f"C{k + 1}{l + 1}"); blocks.append("C"); labels.append((k, l))
    for k in range(n):
        mats.append(BlockElement(n, w=unit(k)).to_matrix())
        names.append(f"w{k + 1}"); blocks.append("w"); labels.append((k,))
    for i in range(n):
        for j in range(n):
            A = z()
            A[i][j] = 1
            mats.append(BlockElement(n, A=A).to_matrix())
            names.append(f"A{i + 1}{j + 1}"); blocks.append("A"); labels.append((i, j))
    for k in range(n):
        mats.append(BlockElement(n, v=unit(k)).to_matrix())
        names.append(f"v{k + 1}"); blocks.append("v"); labels.append((k,))
    for k, l in combinations(range(n), 2):
        mats.append(BlockElement(n, B=skew(k, l)).to_matrix())
        names.append(f"B{k + 1}{l + 1}"); blocks.append("B"); labels.append((k, l))
    return GradedLieAlgebra(n, mats, names, blocks, labels)


def so_of_form(J: Sequence[Sequence]) -> MatrixLieAlgebra:
    """{X : X^t J + J X = 0} for a symmetric nondegenerate J."""
    N = len(J)
    Jm = [[Fraction(x) for x in r] for r in J]
    # unknown X[a][b] at index a*N+b; equation (a, b) with a <= b
    rows = []
    for a in range(N):
        for b in range(a, N):
            r: dict = {}
            for c in range(N):
                # (X^t J)[a][b] = sum_c X[c][a] J[c][b];  (J X)[a][b] = sum_c J[a][c] X[c][b]
                if Jm[c][b]:
                    r[c * N + a] = r.get(c * N + a, 0) + Jm[c][b]
                if Jm[a][c]:
                    r[c * N + b] = r.get(c * N + b, 0) + Jm[a][c]
            rows.append({k: v for k, v in r.items() if v})
    ker = kernel(rows, N * N)
    mats = [{(k // N, k % N): v for k, v in enumerate(vec) if v} for vec in ker]
    return MatrixLieAlgebra(N, mats)


def bracket(alg: LieAlgebra, x, y) -> list:
    """Lie bracket of coordinate vectors in ``alg``."""
    if len(x) != alg.dim or len(y) != alg.dim:
        raise ValueError("element dimension does not match the algebra")
    return alg.bracket(x, y)


class GradingElement:
    def __init__(self, alg: GradedLieAlgebra, element: list):
        self.alg = alg
        self.element = element

    def eigenvalue_on(self, i: int):
        """Return c with [eps, e_i] = c e_i, or None if e_i is not an eigenvector."""
        out = self.alg.bracket(self.element, self.alg.basis_vector(i))
        c = out[i]
        rest = [x for k, x in enumerate(out) if k != i and x]
        return None if rest else c


def grading_element(alg: GradedLieAlgebra) -> GradingElement:
    """Solve ad(eps)|g_j = j for eps; unique because g has trivial centre."""
    d = alg.dim
    rows, rhs = [], []
    for b in range(d):
        target = {b: alg.grades[b]}
        for k in range(d):
            r = {}
            for i in range(d):
                c = alg.table[i][b].get(k)
                if c:
                    r[i] = c
            rows.append(r)
            rhs.append(target.get(k, 0))
    try:
        eps = solve([_dense_row(r, d) for r in rows], rhs)
    except InconsistentSystem as exc:
        raise InconsistentSystem("no grading element: construction bug") from exc
    if kernel([_dense_row(r, d) for r in rows], d):
        raise AssertionError("grading element is not unique")
    return GradingElement(alg, eps)


def _dense_row(r: dict, d: int) -> list:
    out = [Fraction(0)] * d
    for k, v in r.items():
        out[k] = Fraction(v)
    return out


def killing_form(alg: LieAlgebra, x, y) -> Fraction:
    return alg.killing(x, y)


def nilradical_check(alg: GradedLieAlgebra) -> Report:
    """p-perp = g1 + g2 is free two-step nilpotent and an ideal of p."""
    rep = Report("nilradical")
    n = alg.n
    g1, g2 = alg.grade_indices(1), alg.grade_indices(2)
    e = alg.basis_vector
    br = alg.span_of_brackets([e(i) for i in g1], [e(i) for i in g1])
    rep.data["dim [g1,g1]"] = len(br)
    rep.data["dim g2"] = len(g2)
    rep.record("[g1,g1] = g2", len(br) == len(g2)
               and all(all(alg.grades[k] == 2 for k, x in enumerate(v) if x) for v in br),
               {"dim": len(br)})
    # the wedge map Λ²g1 -> g2
    wedge_rows = []
    for i, j in combinations(g1, 2):
        z = alg.bracket(e(i), e(j))
        wedge_rows.append([z[k] for k in g2])
    wr = rank(wedge_rows) if wedge_rows else 0
    rep.data["wedge rank"] = wr
    rep.record("wedge map bijective", wr == n * (n - 1) // 2 == len(g2), {"rank": wr})
    pperp = alg.pperp_indices
    bad = [(i, j) for i in pperp for j in g2 if alg.table[i][j]]
    rep.record("[p-perp, g2] = 0", not bad, bad[:5])
    bad = [(i, j) for i in alg.p_indices for j in pperp
           if any(alg.grades[k] <= 0 for k in alg.table[i][j])]
    rep.record("p-perp ideal of p", not bad, bad[:5])
    bad = []
    for i in pperp:
        for j in pperp:
            for k in pperp:
                if alg.bracket_sparse({i: 1}, alg.table[j][k]):
                    bad.append((i, j, k))
    rep.record("[p-perp,[p-perp,p-perp]] = 0", not bad, bad[:5])
    quot = alg.dim - len(alg.p_indices)
    rep.data["dim g - dim p"] = quot
    rep.record("dim g - dim p = n(n+1)/2", quot == n * (n + 1) // 2, quot)
    return rep
