"""Chain spaces Λ^c p⊥ ⊗ g, the codifferential ∂*, the differential ∂, and H_2.

A chain basis element is a pair ``(I, k)``: ``I`` an increasing tuple of
algebra indices drawn from p⊥ = g1 + g2, ``k`` an index of g.  Its
homogeneity is the sum of the grades of the wedge slots plus grade(k).

∂* uses the signed formula

    ∂*((u_1∧…∧u_c)⊗v) = Σ_{j<k} (-1)^{j+k} ({u_j,u_k}∧u_1∧…û_j…û_k…∧u_c)⊗v
                      + Σ_j (-1)^j (u_1∧…û_j…∧u_c)⊗{u_j,v}

with 1-based slot positions.  ∂ is the Chevalley-Eilenberg differential of
g/p ≅ g₋ with values in g, moved onto Λ^c p⊥ ⊗ g through the Killing pairing
p⊥ ≅ (g₋)*.  Both preserve homogeneity, so everything is computed one
homogeneity block at a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .graded_lie import GradedLieAlgebra, _axpy
from .rational_linalg import Mat, echelon, kernel
from .report import Report

__all__ = [
    "ChainSpace",
    "ChainVector",
    "HomologyReport",
    "chain_space",
    "codifferential_matrix",
    "codifferential_columns",
    "differential_columns",
    "compose_columns",
    "differential_matrix",
    "homology",
    "minimal_homogeneity",
    "block_label",
    "complex_report",
]


def _insert(idx: int, rest: tuple) -> tuple[int, tuple | None]:
    """Sign and sorted tuple for idx ∧ rest (rest increasing)."""
    if idx in rest:
        return 0, None
    pos = sum(1 for r in rest if r < idx)
    sign = -1 if pos % 2 else 1
    return sign, tuple(sorted(rest + (idx,)))


class ChainSpace:
    """Basis bookkeeping for Λ^c p⊥ ⊗ g."""

    def __init__(self, alg: GradedLieAlgebra, c: int):
        self.alg = alg
        self.c = c
        self.pperp = alg.pperp_indices
        self.basis = [(I, k) for I in combinations(self.pperp, c) for k in range(alg.dim)]
        self.index = {b: i for i, b in enumerate(self.basis)}
        self.homogeneity = [sum(alg.grades[i] for i in I) + alg.grades[k] for I, k in self.basis]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def block(self, h: int) -> list[int]:
        return [i for i, x in enumerate(self.homogeneity) if x == h]

    def homogeneities(self) -> list[int]:
        return sorted(set(self.homogeneity))

    def slot_grades(self, i: int) -> tuple:
        I, k = self.basis[i]
        return tuple(sorted(self.alg.grades[j] for j in I)) + (self.alg.grades[k],)


@dataclass
class ChainVector:
    """Element of Λ^c p⊥ ⊗ g in the canonical basis of a ChainSpace."""

    space: ChainSpace
    coords: dict

    @property
    def c(self) -> int:
        return self.space.c

    def homogeneity_parts(self) -> dict[int, dict]:
        out: dict[int, dict] = {}
        for i, v in self.coords.items():
            if v:
                out.setdefault(self.space.homogeneity[i], {})[i] = v
        return out


def chain_space(alg: GradedLieAlgebra, c: int) -> ChainSpace:
    return ChainSpace(alg, c)


def _codiff_columns(alg: GradedLieAlgebra, src: ChainSpace, dst: ChainSpace) -> list[dict]:
    """Column j = ∂* of source basis element j, as sparse dict over dst."""
    cols = []
    table = alg.table
    for I, k in src.basis:
        out: dict = {}
        c = len(I)
        for a in range(c):
            for b in range(a + 1, c):
                sgn = -1 if (a + b) % 2 else 1  # (-1)^{(a+1)+(b+1)}
                rest = I[:a] + I[a + 1:b] + I[b + 1:]
                for m, coef in table[I[a]][I[b]].items():
                    s, J = _insert(m, rest)
                    if s:
                        key = dst.index[(J, k)]
                        out[key] = out.get(key, 0) + sgn * s * coef
        for a in range(c):
            sgn = 1 if (a + 1) % 2 == 0 else -1  # (-1)^{a+1}
            rest = I[:a] + I[a + 1:]
            for m, coef in table[I[a]][k].items():
                key = dst.index[(rest, m)]
                out[key] = out.get(key, 0) + sgn * coef
        cols.append({r: Fraction(v) for r, v in out.items() if v})
    return cols


def _to_mat(cols: list[dict], nrows: int) -> Mat:
    ent = [[Fraction(0)] * len(cols) for _ in range(nrows)]
    for j, col in enumerate(cols):
        for i, v in col.items():
            ent[i][j] = v
    return Mat.from_rows(ent, len(cols)) if nrows else Mat(0, len(cols), [])


def codifferential_columns(alg: GradedLieAlgebra, c: int) -> tuple[ChainSpace, ChainSpace, list[dict]]:
    if c < 1:
        raise ValueError("codifferential needs c >= 1")
    src, dst = ChainSpace(alg, c), ChainSpace(alg, c - 1)
    return src, dst, _codiff_columns(alg, src, dst)


def codifferential_matrix(alg: GradedLieAlgebra, c: int) -> Mat:
    """Matrix of ∂*: Λ^c p⊥⊗g → Λ^{c-1} p⊥⊗g (rows: target basis)."""
    src, dst, cols = codifferential_columns(alg, c)
    return _to_mat(cols, dst.dim)


class _MinusDual:
    """Killing-dual basis ξ^u of g₋ for the basis u of p⊥."""

    def __init__(self, alg: GradedLieAlgebra):
        self.alg = alg
        self.pperp = alg.pperp_indices
        minus = alg.minus_indices
        K = alg.killing_matrix()
        # pairing matrix P[u][m] = K(u, e_m) for m in g₋; xi^u = sum_m X[u][m] e_m
        # with K(u', xi^u) = delta: solve P X^t = I
        from .rational_linalg import inverse
        P = Mat.from_rows([[K[u][m] for m in minus] for u in self.pperp])
        Pinv = inverse(P)  # columns indexed by pperp
        self.xi = {}
        for a, u in enumerate(self.pperp):
            vec = {}
            for b, m in enumerate(minus):
                v = Pinv[b, a]
                if v:
                    vec[m] = v
            self.xi[u] = vec
        self.K = K

    def coords_minus(self, y: dict) -> dict:
        """Coordinates of y ∈ g₋ in the ξ basis (via the Killing pairing)."""
        out = {}
        for u in self.pperp:
            s = sum((v * self.K[u][m] for m, v in y.items()), Fraction(0))
            if s:
                out[u] = s
        return out


def differential_columns(alg: GradedLieAlgebra, c: int) -> tuple[ChainSpace, ChainSpace, list[dict]]:
    if c < 0:
        raise ValueError("differential needs c >= 0")
    src, dst = ChainSpace(alg, c), ChainSpace(alg, c + 1)
    md = _MinusDual(alg)
    xi = md.xi
    # [xi^a, e_k] in g, and [xi^a, xi^b] in the xi basis
    act = {(a, k): alg.bracket_sparse(xi[a], {k: 1}) for a in md.pperp for k in range(alg.dim)}
    xb = {}
    for a in md.pperp:
        for b in md.pperp:
            xb[(a, b)] = md.coords_minus(alg.bracket_sparse(xi[a], xi[b]))
    cols: list[dict] = [dict() for _ in range(src.dim)]
    # iterate over target tuples J and distribute contributions to source columns
    for J in combinations(md.pperp, c + 1):
        for i in range(c + 1):
            sgn = -1 if i % 2 else 1
            I = J[:i] + J[i + 1:]
            for k in range(alg.dim):
                col = cols[src.index[(I, k)]]
                for m, v in act[(J[i], k)].items():
                    key = dst.index[(J, m)]
                    col[key] = col.get(key, 0) + sgn * v
        for i in range(c + 1):
            for j in range(i + 1, c + 1):
                sgn = -1 if (i + j) % 2 else 1
                rest = J[:i] + J[i + 1:j] + J[j + 1:]
                for m, coef in xb[(J[i], J[j])].items():
                    s, I = _insert(m, rest)
                    if not s:
                        continue
                    for k in range(alg.dim):
                        col = cols[src.index[(I, k)]]
                        key = dst.index[(J, k)]
                        col[key] = col.get(key, 0) + sgn * s * coef
    cols = [{r: Fraction(v) for r, v in col.items() if v} for col in cols]
    return src, dst, cols


def differential_matrix(alg: GradedLieAlgebra, c: int) -> Mat:
    """Matrix of ∂: Λ^c p⊥⊗g → Λ^{c+1} p⊥⊗g (rows: target basis)."""
    src, dst, cols = differential_columns(alg, c)
    return _to_mat(cols, dst.dim)


def compose_columns(outer: list[dict], inner: list[dict]) -> list[dict]:
    out = []
    for col in inner:
        acc: dict = {}
        for k, v in col.items():
            _axpy(acc, v, outer[k])
        out.append(acc)
    return out


def block_label(alg: GradedLieAlgebra, a: int, b: int, k: int) -> str:
    sub = {-2: "₋₂", -1: "₋₁", 0: "₀", 1: "₁", 2: "₂"}
    return f"(g{sub[a]}∧g{sub[b]})⊗g{sub[k]}"


@dataclass
class HomologyReport:
    """H_c = ker ∂*_c / im ∂*_{c+1}, split by homogeneity."""

    c: int
    n: int
    dims: dict[int, int] = field(default_factory=dict)
    ker_dims: dict[int, int] = field(default_factory=dict)
    im_dims: dict[int, int] = field(default_factory=dict)
    block_support: list[tuple[int, ...]] = field(default_factory=list)
    block_dims: dict[tuple[int, ...], int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.dims.values())

    def support_labels(self, alg: GradedLieAlgebra | None = None) -> list[str]:
        sub = {-2: "₋₂", -1: "₋₁", 0: "₀", 1: "₁", 2: "₂"}
        out = []
        for t in self.block_support:
            if len(t) == 3:
                out.append(f"(g{sub[t[0]]}∧g{sub[t[1]]})⊗g{sub[t[2]]}")
            else:
                out.append(str(t))
        return out


def _columns_to_rows(cols: list[dict], which: Sequence[int]) -> list[dict]:
    """Rows of the submatrix on the given columns (local column numbering)."""
    rows: dict[int, dict] = {}
    for local, j in enumerate(which):
        for r, v in cols[j].items():
            rows.setdefault(r, {})[local] = v
    return list(rows.values())


def homology(alg: GradedLieAlgebra, c: int = 2,
             homogeneities: Sequence[int] | None = None) -> HomologyReport:
    """Dimensions of ker ∂*_c / im ∂*_{c+1} per homogeneity, with block support.

    Block support of a slot-grade block β is
    dim((ker ∂*_c ∩ β) + im ∂*_{c+1}) - dim im ∂*_{c+1}.
    """
    src_c, _, d_c = codifferential_columns(alg, c) if c >= 1 else (ChainSpace(alg, 0), None, None)
    src_up, _, d_up = codifferential_columns(alg, c + 1)
    rep = HomologyReport(c=c, n=alg.n)
    hs = homogeneities if homogeneities is not None else src_c.homogeneities()
    for h in hs:
        blk = src_c.block(h)
        if not blk:
            continue
        up = src_up.block(h)
        im_piv = echelon(d_up[j] for j in up)
        im_dim = len(im_piv)
        if d_c is not None:
            kerb = kernel(_columns_to_rows(d_c, blk), len(blk))
        else:
            kerb = [[Fraction(int(i == j)) for j in range(len(blk))] for i in range(len(blk))]
        ker_dim = len(kerb)
        rep.ker_dims[h] = ker_dim
        rep.im_dims[h] = im_dim
        rep.dims[h] = ker_dim - im_dim
        if rep.dims[h] == 0:
            continue
        # block support within this homogeneity
        groups: dict[tuple, list[int]] = {}
        for local, i in enumerate(blk):
            groups.setdefault(src_c.slot_grades(i), []).append(local)
        for key in sorted(groups):
            locs = groups[key]
            sub = kernel(_columns_to_rows(d_c, [blk[l] for l in locs]), len(locs)) if d_c else \
                [[Fraction(int(i == j)) for j in range(len(locs))] for i in range(len(locs))]
            if not sub:
                continue
            vecs = []
            for vec in sub:
                vecs.append({blk[locs[l]]: x for l, x in enumerate(vec) if x})
            extra = len(echelon(list(im_piv.values()) + vecs)) - im_dim
            if extra:
                rep.block_support.append(key)
                rep.block_dims[key] = extra
    return rep


def minimal_homogeneity(v: ChainVector) -> int:
    parts = v.homogeneity_parts()
    if not parts:
        raise ValueError("minimal homogeneity of the zero chain is undefined")
    return min(parts)


def complex_report(alg: GradedLieAlgebra, c: int = 2) -> Report:
    """∂*∘∂* = 0 and ∂∘∂ = 0 around degree c, plus H_c with its block support."""
    rep = Report(f"kostant n={alg.n}")
    _, _, d_hi = codifferential_columns(alg, c + 1)
    _, _, d_lo = codifferential_columns(alg, c)
    bad = [j for j, col in enumerate(compose_columns(d_lo, d_hi)) if col]
    rep.record("d* d* = 0", not bad, bad[:5])
    _, _, e_lo = differential_columns(alg, c - 1)
    _, _, e_hi = differential_columns(alg, c)
    bad = [j for j, col in enumerate(compose_columns(e_hi, e_lo)) if col]
    rep.record("d d = 0", not bad, bad[:5])
    h = homology(alg, c)
    rep.data["homology"] = h
    rep.data["support"] = h.support_labels()
    return rep
