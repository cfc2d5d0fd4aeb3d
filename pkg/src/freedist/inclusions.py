"""Exceptional isomorphisms and Fefferman-type inclusions at the Lie algebra level.

sl(4,R) acts on Lambda^2 R^4 preserving the wedge pairing (signature (3,3));
su(2,2) acts on a real form of Lambda^2 C^4 preserving a (4,2) metric; the
same su(2,2) sits in so(4,4) as the stabilizer of a 4-form up to the extra
directions that make it spin(4,3).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .graded_lie import MatrixLieAlgebra, build_so, commutator, so_of_form
from .octonion import _act_on_tensor, stabilizer_algebra
from .rational_linalg import GaussScalar, in_span, kernel, rank, signature, solve, span_basis, subspace_intersection
from .report import Report

__all__ = [
    "RepMap",
    "sl4_basis",
    "su22_basis",
    "HERMITIAN_22",
    "lambda2_rep",
    "su22_rep",
    "four_form_R8",
    "kahler_square",
    "su22_four_form_check",
    "vector_stabilizer",
    "subspace_stabilizer",
    "fefferman_transversality",
    "fefferman_free_example",
    "fefferman_cr_example",
]

I = GaussScalar(0, 1)
PAIRS = list(combinations(range(4), 2))


def _perm_sign(p: Sequence[int]) -> int:
    s, p = 1, list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


def _wedge_sign(i, j, k, l) -> int:
    if len({i, j, k, l}) < 4:
        return 0
    return _perm_sign([i, j, k, l])


def _dense(m: dict, n: int, zero=Fraction(0)) -> list[list]:
    return [[m.get((i, j), zero) for j in range(n)] for i in range(n)]


def _sparse(m: Sequence[Sequence]) -> dict:
    return {(i, j): v for i, r in enumerate(m) for j, v in enumerate(r) if v}


def _realify_vec(v: Sequence) -> list[Fraction]:
    out = []
    for c in v:
        c = c if isinstance(c, GaussScalar) else GaussScalar(c, 0)
        out += [c.re, c.im]
    return out


def _matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [[sum((a[i][t] * b[t][j] for t in range(k)), a[i][0] * 0) for j in range(m)] for i in range(n)]


@dataclass
class RepMap:
    """Matrices images[k] representing the source basis element source[k]."""

    name: str
    source: list[list[list]]           # dense source matrices
    images: list[dict]                 # sparse target matrices
    target_dim: int
    form: list[list[Fraction]] | None = None
    notes: dict = field(default_factory=dict)

    def _source_coords(self, m: Sequence[Sequence]) -> list[Fraction]:
        cols = [_realify_vec([c for r in s for c in r]) for s in self.source]
        rows = [[col[i] for col in cols] for i in range(len(cols[0]))]
        return solve(rows, _realify_vec([c for r in m for c in r]))

    def _image(self, coords: Sequence[Fraction]) -> dict:
        out: dict = {}
        for c, img in zip(coords, self.images):
            if c:
                for k, v in img.items():
                    s = out.get(k, 0) + c * v
                    if s:
                        out[k] = s
                    else:
                        out.pop(k, None)
        return out

    def bracket_violations(self) -> list[tuple[int, int]]:
        bad = []
        for i, j in combinations(range(len(self.source)), 2):
            a, b = self.source[i], self.source[j]
            br = [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(_matmul(a, b), _matmul(b, a))]
            lhs = self._image(self._source_coords(br))
            if lhs != commutator(self.images[i], self.images[j]):
                bad.append((i, j))
        return bad

    def injective(self) -> bool:
        vecs = [[m.get((i, j), Fraction(0)) for i in range(self.target_dim) for j in range(self.target_dim)]
                for m in self.images]
        return rank(vecs) == len(vecs)

    def preserves_form(self) -> bool:
        if self.form is None:
            return True
        Q = self.form
        n = self.target_dim
        for m in self.images:
            M = _dense(m, n)
            for a, b in product(range(n), repeat=2):
                s = sum((M[c][a] * Q[c][b] + Q[a][c] * M[c][b] for c in range(n)), Fraction(0))
                if s:
                    return False
        return True

    def image_is_full_orthogonal_algebra(self) -> bool:
        so = so_of_form(self.form)
        vecs = [[m.get((i, j), Fraction(0)) for i in range(self.target_dim) for j in range(self.target_dim)]
                for m in self.images]
        return so.dim == rank(vecs) and self.preserves_form()

    def report(self) -> Report:
        rep = Report(self.name)
        rep.record("bracket preserving", not self.bracket_violations())
        rep.record("injective", self.injective())
        rep.record("preserves form", self.preserves_form())
        rep.record(f"image dimension {len(self.images)}", self.injective())
        rep.record("onto the orthogonal algebra", self.image_is_full_orthogonal_algebra())
        sig = signature(self.form)
        rep.data["signature"] = sig[:2]
        return rep


# ---------------------------------------------------------------------------
# sl(4, R) on Lambda^2 R^4


def sl4_basis() -> list[list[list[Fraction]]]:
    out = []
    for i, j in product(range(4), repeat=2):
        if i != j:
            m = [[Fraction(0)] * 4 for _ in range(4)]
            m[i][j] = Fraction(1)
            out.append(m)
    for k in range(3):
        m = [[Fraction(0)] * 4 for _ in range(4)]
        m[k][k], m[k + 1][k + 1] = Fraction(1), Fraction(-1)
        out.append(m)
    return out


def _lambda2_action(X: Sequence[Sequence], zero) -> list[list]:
    """Matrix of X acting on Lambda^2 in the basis e_i ^ e_j, i < j."""
    idx = {p: k for k, p in enumerate(PAIRS)}
    out = [[zero] * 6 for _ in range(6)]
    for col, (i, j) in enumerate(PAIRS):
        # X(e_i ^ e_j) = X e_i ^ e_j + e_i ^ X e_j
        for a in range(4):
            for src, other, first in ((X[a][i], j, True), (X[a][j], i, False)):
                if not src or a == other:
                    continue
                p, q = (a, other) if first else (other, a)
                sgn = 1 if p < q else -1
                out[idx[(min(p, q), max(p, q))]][col] += src * sgn
    return out


def wedge_pairing() -> list[list[Fraction]]:
    """Q(a, b) with a ^ b = Q(a, b) e1 ^ e2 ^ e3 ^ e4."""
    return [[Fraction(_wedge_sign(i, j, k, l)) for (k, l) in PAIRS] for (i, j) in PAIRS]


def lambda2_rep() -> RepMap:
    src = sl4_basis()
    imgs = [_sparse(_lambda2_action(X, Fraction(0))) for X in src]
    return RepMap("sl(4) on Lambda^2 R^4", src, imgs, 6, wedge_pairing())


# ---------------------------------------------------------------------------
# su(2,2) on a real form of Lambda^2 C^4

# anti-diagonal hermitian form of signature (2,2)
HERMITIAN_22 = [[Fraction(int(i + j == 3)) for j in range(4)] for i in range(4)]


def _real_kernel_complex(equations: list[list], nvars: int) -> list[list[GaussScalar]]:
    """Real solution space of complex-linear-in-(z, conj z) equations.

    Each equation is a list of pairs (coef, conj_coef) per variable, meaning
    sum coef*z + conj_coef*conj(z) = 0.
    """
    rows = []
    for eq in equations:
        re_row, im_row = [], []
        for c, d in eq:
            c = c if isinstance(c, GaussScalar) else GaussScalar(c)
            d = d if isinstance(d, GaussScalar) else GaussScalar(d)
            # (c + d) x + i (c - d) y with z = x + i y
            s, t = c + d, (c - d) * I
            re_row += [s.re, t.re]
            im_row += [s.im, t.im]
        rows += [re_row, im_row]
    ker = kernel(rows, 2 * nvars)
    return [[GaussScalar(v[2 * k], v[2 * k + 1]) for k in range(nvars)] for v in ker]


def su22_basis() -> list[list[list[GaussScalar]]]:
    """Real basis of {X : X^* H + H X = 0, tr X = 0}."""
    H = HERMITIAN_22
    eqs = []
    for a, b in product(range(4), repeat=2):
        eq = [(0, 0)] * 16
        eq = [list(e) for e in eq]
        for c in range(4):
            # (X^* H)[a][b] = sum_c conj(X[c][a]) H[c][b]
            eq[c * 4 + a][1] += H[c][b]
            eq[c * 4 + b][0] += H[a][c]
        eqs.append([tuple(e) for e in eq])
    tr = [(Fraction(int(k % 5 == 0)), 0) for k in range(16)]
    eqs.append(tr)
    sols = _real_kernel_complex(eqs, 16)
    return [[[v[4 * i + j] for j in range(4)] for i in range(4)] for v in sols]


def _induced_hermitian() -> list[list[Fraction]]:
    H = HERMITIAN_22
    return [[H[i][k] * H[j][l] - H[i][l] * H[j][k] for (k, l) in PAIRS] for (i, j) in PAIRS]


def real_structure() -> list[list[Fraction]]:
    """S with sigma(alpha) = S conj(alpha), S = -Q^{-1} Hh^t.

    Hh is the hermitian form induced on Lambda^2, Q the wedge pairing; both are
    real here, so S is a real matrix and sigma is antilinear. The overall sign
    picks which of the two real forms carries the (4,2) metric rather than (2,4).
    """
    Q = wedge_pairing()
    Hh = _induced_hermitian()
    Ht = [list(r) for r in zip(*Hh)]
    # Q is its own inverse up to reordering: solve column by column
    cols = [solve(Q, [Ht[i][j] for i in range(6)]) for j in range(6)]
    return [[-cols[j][i] for j in range(6)] for i in range(6)]


def su22_rep() -> RepMap:
    S = real_structure()
    # fixed space: S conj(a) = a, as real equations on 6 complex unknowns
    eqs = []
    for i in range(6):
        eq = [[0, 0] for _ in range(6)]
        eq[i][0] -= 1
        for j in range(6):
            eq[j][1] += S[i][j]
        eqs.append([tuple(e) for e in eq])
    fixed = _real_kernel_complex(eqs, 6)
    Q = wedge_pairing()
    Qc = [[GaussScalar(x) for x in r] for r in Q]
    gram = []
    for a in fixed:
        row = []
        for b in fixed:
            val = sum((a[i] * Qc[i][j] * b[j] for i in range(6) for j in range(6)), GaussScalar(0))
            if val.im:
                raise ArithmeticError("pairing is not real on the fixed space")
            row.append(val.re)
        gram.append(row)
    fixed_real = [_realify_vec(a) for a in fixed]
    cols = [[f[i] for f in fixed_real] for i in range(12)]
    src = su22_basis()
    imgs = []
    for X in src:
        A = _lambda2_action(X, GaussScalar(0))
        img = []
        for a in fixed:
            Xa = [sum((A[i][j] * a[j] for j in range(6)), GaussScalar(0)) for i in range(6)]
            img.append(solve(cols, _realify_vec(Xa)))
        imgs.append({(i, j): img[j][i] for j in range(6) for i in range(6) if img[j][i]})
    rm = RepMap("su(2,2) on real Lambda^2 C^4", src, imgs, 6, gram)
    rm.notes.update(real_structure=S, fixed_real_dim=len(fixed))
    return rm


# ---------------------------------------------------------------------------
# the 4-form on R^8 = C^4

def _realify_matrix(X: Sequence[Sequence]) -> dict:
    """Complex 4x4 as real 8x8 on (x1, y1, ..., x4, y4)."""
    out = {}
    for i, j in product(range(4), repeat=2):
        c = X[i][j] if isinstance(X[i][j], GaussScalar) else GaussScalar(X[i][j])
        for (di, dj), v in (((0, 0), c.re), ((0, 1), -c.im), ((1, 0), c.im), ((1, 1), c.re)):
            if v:
                out[(2 * i + di, 2 * j + dj)] = v
    return out


def _real_metric() -> list[list[Fraction]]:
    """Re h on R^8 for the anti-diagonal hermitian form."""
    H = HERMITIAN_22
    g = [[Fraction(0)] * 8 for _ in range(8)]
    for k, l in product(range(4), repeat=2):
        if H[k][l]:
            g[2 * k][2 * l] = g[2 * k + 1][2 * l + 1] = H[k][l]
    return g


def _kahler() -> list[list[Fraction]]:
    """mu = Im h, h(z, w) = sum conj(z_k) H_kl w_l."""
    H = HERMITIAN_22
    mu = [[Fraction(0)] * 8 for _ in range(8)]
    for k, l in product(range(4), repeat=2):
        if H[k][l]:
            # Im(conj(z_k) w_l) = x_k v_l - y_k u_l
            mu[2 * k][2 * l + 1] += H[k][l]
            mu[2 * k + 1][2 * l] -= H[k][l]
    return mu


def kahler_square() -> dict[tuple, Fraction]:
    """mu^2 in the divided-power normalization mu ^ mu / 2."""
    mu = _kahler()
    out = {}
    for a, b, c, d in product(range(8), repeat=4):
        v = (mu[a][b] * mu[c][d] - mu[a][c] * mu[b][d] + mu[a][d] * mu[b][c])
        if v:
            out[(a, b, c, d)] = v
    return out


def _re_volume() -> dict[tuple, Fraction]:
    """Re(dz1 ^ dz2 ^ dz3 ^ dz4) on R^8."""
    out = {}
    for idx in product(range(8), repeat=4):
        ks = [i // 2 for i in idx]
        s = _wedge_sign(*ks)
        if not s:
            continue
        # dz_k(e) = 1 on x_k, i on y_k
        val = GaussScalar(1)
        for i in idx:
            val = val * (I if i % 2 else GaussScalar(1))
        if val.re:
            out[idx] = s * val.re
    return out


def four_form_R8(weight: Fraction = Fraction(1)) -> dict[tuple, Fraction]:
    """Re(v) - weight * mu^2."""
    out = dict(_re_volume())
    for k, v in kahler_square().items():
        s = out.get(k, 0) - weight * v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def _annihilates(m: dict, tensor: dict) -> bool:
    return not _act_on_tensor(m, tensor, 4)


def su22_four_form_check(weight: Fraction = Fraction(1)) -> Report:
    rep = Report("su(2,2) four-form")
    src = su22_basis()
    imgs = [_realify_matrix(X) for X in src]
    g = _real_metric()
    rep.data["metric_signature"] = signature(g)[:2]
    so44 = so_of_form(g)
    phi = four_form_R8(weight)
    rep.record("su(2,2) in so(4,4)", all(so44.contains(m) for m in imgs))
    killed = sum(_annihilates(m, phi) for m in imgs)
    rep.record("su(2,2) annihilates Re(v) - mu^2", killed == len(imgs), f"{killed} of {len(imgs)}")
    st = stabilizer_algebra(phi, so44, 4)
    rep.data["stabilizer"] = st
    rep.record("annihilator in so(4,4) has dimension 21", st.dim == 21, st.dim)
    rep.record("annihilator closed under bracket", st.closed())
    J = _realify_matrix([[I if i == j else GaussScalar(0) for j in range(4)] for i in range(4)])
    mu2 = kahler_square()
    u22 = imgs + [J]
    killed = sum(_annihilates(m, mu2) for m in u22)
    rep.record("u(2,2) annihilates mu^2", killed == 16, f"{killed} of 16")
    st_mu = stabilizer_algebra(mu2, so44, 4)
    rep.data["mu2_stabilizer_dim"] = st_mu.dim
    return rep


# ---------------------------------------------------------------------------
# transversality


def vector_stabilizer(alg: MatrixLieAlgebra, u: Sequence) -> list[list[Fraction]]:
    """Coordinates (in alg) of {M : M u = 0}."""
    N = alg.N
    rows = [[sum((m.get((i, j), 0) * u[j] for j in range(N)), Fraction(0)) for m in alg.mats] for i in range(N)]
    return kernel(rows, alg.dim)


def subspace_stabilizer(alg: MatrixLieAlgebra, W: Sequence[Sequence]) -> list[list[Fraction]]:
    """Coordinates of {M : M W in W}."""
    N = alg.N
    ann = kernel([list(w) for w in W], N)
    rows = []
    for f in ann:
        for w in W:
            rows.append([sum((f[i] * m.get((i, j), 0) * w[j] for (i, j) in m), Fraction(0)) for m in alg.mats])
    return kernel(rows, alg.dim)


def fefferman_transversality(ambient_dim: int, sub: Sequence[Sequence], phat: Sequence[Sequence],
                             p: Sequence[Sequence] | None = None) -> Report:
    """sub and phat as coordinate vectors in a common ambient algebra of dimension ambient_dim."""
    rep = Report("fefferman transversality")
    sub = span_basis(sub, ambient_dim)
    phat = span_basis(phat, ambient_dim)
    inter = subspace_intersection(sub, phat)
    total = span_basis(sub + phat, ambient_dim)
    dims = {"ghat": ambient_dim, "phat": len(phat), "g": len(sub), "g cap phat": len(inter)}
    rep.record("dimension identity", len(sub) + len(phat) - len(inter) == len(total))
    rep.record("transverse: g + phat = ghat", len(total) == ambient_dim, len(total))
    if p is not None:
        p = span_basis(p, ambient_dim)
        dims["p"] = len(p)
        dims["fiber"] = len(p) - len(inter)
        rep.data["p_contains_intersection"] = all(in_span(v, p) for v in inter)
    rep.data["dims"] = dims
    rep.data["intersection"] = inter
    return rep


def _coords_in(big: MatrixLieAlgebra, mats: Sequence[dict]) -> list[list[Fraction]]:
    return [big.coords(m) for m in mats]


def _matrices(alg: MatrixLieAlgebra, coords: Sequence[Sequence]) -> list[dict]:
    return [alg.matrix_sparse(c) for c in coords]


def fefferman_free_example(n: int = 3) -> Report:
    """so(n+1, n) in so(n+1, n+1): g = stab(e_m2), phat = stab(span(top, e_m1 + e_m2))."""
    N = 2 * n + 2
    # order: top (n), m1, m2, bottom (n)
    G = [[Fraction(0)] * N for _ in range(N)]
    for i in range(n):
        G[i][n + 2 + i] = G[n + 2 + i][i] = Fraction(1)
    G[n][n], G[n + 1][n + 1] = Fraction(1), Fraction(-1)
    ghat = so_of_form(G)
    e = lambda k: [Fraction(int(i == k)) for i in range(N)]
    g = vector_stabilizer(ghat, e(n + 1))
    W = [e(i) for i in range(n)] + [[a + b for a, b in zip(e(n), e(n + 1))]]
    phat = subspace_stabilizer(ghat, W)
    # p: the free-distribution parabolic, i.e. the stabilizer of the top n-plane inside g
    gm = _matrices(ghat, g)
    galg = MatrixLieAlgebra(N, gm)
    p_in_g = subspace_stabilizer(galg, [e(i) for i in range(n)])
    p = [[sum((c * gv[k] for c, gv in zip(pc, g)), Fraction(0)) for k in range(ghat.dim)] for pc in p_in_g]
    rep = fefferman_transversality(ghat.dim, g, phat, p)
    inter = rep.data["intersection"]
    rep.record("g cap phat = p", len(inter) == len(p) and all(in_span(v, inter) for v in p), rep.data["dims"])
    # the block algebra so(n+1, n) is the same size as g
    rep.record("dim g = dim so(n+1, n)", len(g) == build_so(n).dim)
    return rep


def fefferman_cr_example() -> Report:
    """so(4,2) = stab(u) in so(4,3), u = e_top1 - e_bottom1; phat the top 3-plane parabolic."""
    n = 3
    alg = build_so(n)
    N = alg.N
    e = lambda k: [Fraction(int(i == k)) for i in range(N)]
    u = [a - b for a, b in zip(e(0), e(n + 1))]
    g = vector_stabilizer(alg, u)
    top = [e(i) for i in range(n)]
    phat = subspace_stabilizer(alg, top)
    # P: stabilizer in g of the isotropic 2-plane top cap u-perp
    J = _metric(n)
    Ju = [sum((J[i][j] * u[j] for j in range(N)), Fraction(0)) for i in range(N)]
    W = _span_kernel_in(top, Ju)
    galg = MatrixLieAlgebra(N, _matrices(alg, g))
    p_in_g = subspace_stabilizer(galg, W)
    p = [[sum((c * gv[k] for c, gv in zip(pc, g)), Fraction(0)) for k in range(alg.dim)] for pc in p_in_g]
    rep = fefferman_transversality(alg.dim, g, phat, p)
    d = rep.data["dims"]
    rep.data["pentuple"] = (d["ghat"], d["phat"], d["g"], d["p"], d["g cap phat"])
    rep.record("dims (21, 15, 15, 10, 9)", rep.data["pentuple"] == (21, 15, 15, 10, 9), rep.data["pentuple"])
    rep.record("g cap phat inside p", rep.data["p_contains_intersection"])
    rep.data["isotropic_plane"] = W
    return rep


def _metric(n: int) -> list[list[Fraction]]:
    N = 2 * n + 1
    J = [[Fraction(0)] * N for _ in range(N)]
    for i in range(n):
        J[i][n + 1 + i] = J[n + 1 + i][i] = Fraction(1)
    J[n][n] = Fraction(1)
    return J


def _span_kernel_in(basis: Sequence[Sequence], f: Sequence) -> list[list[Fraction]]:
    """Vectors of span(basis) killed by the covector f."""
    vals = [[sum((a * b for a, b in zip(v, f)), Fraction(0)) for v in basis]]
    ker = kernel(vals, len(basis))
    N = len(basis[0])
    return [[sum((c * v[i] for c, v in zip(k, basis)), Fraction(0)) for i in range(N)] for k in ker]
