"""Tractor splitting calculus for free n-distributions.

A tractor is stored as (cov, scal, vec) with cov in H*, vec in H; as a vector
of R^(2n+1) it is [cov; scal; vec] and so(n+1, n) acts by the block matrices
of ``graded_lie``. Under that action the grade one part v and grade two part
B of p-perp act as

    (cov, t, X) -> (cov + t v + B X, t - v.X, X) + ...

so a Weyl shift (ups1, ups2) is stored as ups1 = v and ups2 = B, giving
{ups2, X} = -B X.

Scalars may be Fraction, Poly or Jet: the routines only use ring operations
plus division by units.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .graded_lie import GradedLieAlgebra, build_so
from .poly_models import Jet, ModelFrame, Poly, standard_model
from .rational_linalg import as_scalar, rank, solve, kernel
from .report import Report

__all__ = [
    "TractorSection",
    "WeylShift",
    "RhoTensor",
    "SplittingData",
    "GenericityError",
    "h_metric",
    "gram_matrix",
    "upsilon_action",
    "shift_matrix",
    "compose_shifts",
    "flat_splitting",
    "tractor_derivative",
    "connection_change",
    "parallel_section",
    "mu_extraction",
    "gram_of_sections",
    "normalize_splitting_for_V",
    "closed_form_normalization",
    "composite_shift",
    "strong_defects",
    "random_generic_V",
    "verify_maxpref_properties",
    "h_invariance_check",
    "normalization_report",
]


class GenericityError(ValueError):
    """V does not project injectively to H at the base point."""


def _is_unit(c) -> bool:
    if isinstance(c, Jet):
        return c.is_unit()
    if isinstance(c, Poly):
        return c.is_constant() and bool(c.constant_term())
    return bool(c)


def _value(c):
    if isinstance(c, Jet):
        return c.value()
    if isinstance(c, Poly):
        return c.constant_term()
    return as_scalar(c)


def _isz(c) -> bool:
    if isinstance(c, (Jet, Poly)):
        return c.is_zero()
    return not c


def _dot(a, b):
    acc = 0
    for x, y in zip(a, b):
        if not _isz(x) and not _isz(y):
            acc = x * y + acc
    return acc


def _matvec(m, v):
    return [_dot(row, v) for row in m]


def _matmul(a, b):
    bt = list(zip(*b))
    return [[_dot(r, c) for c in bt] for r in a]


def _transpose(m):
    return [list(r) for r in zip(*m)]


def _madd(a, b, s=1):
    return [[x + s * y if not _isz(y) else x for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _ident(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def _inverse(m):
    """Gauss-Jordan with unit pivots; works over Fraction and Jet."""
    n = len(m)
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    for c in range(n):
        p = next((r for r in range(c, n) if _is_unit(a[r][c])), None)
        if p is None:
            raise GenericityError("matrix is singular at the base point")
        a[c], a[p] = a[p], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and not _isz(a[r][c]):
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [r[n:] for r in a]


# ---------------------------------------------------------------------------
# sections and shifts


@dataclass(frozen=True)
class TractorSection:
    cov: tuple
    scal: object
    vec: tuple

    def __post_init__(self):
        object.__setattr__(self, "cov", tuple(self.cov))
        object.__setattr__(self, "vec", tuple(self.vec))
        if len(self.cov) != len(self.vec):
            raise ValueError("cov and vec slots must both have length n")

    @property
    def n(self) -> int:
        return len(self.vec)

    @classmethod
    def from_vector(cls, n: int, x: Sequence) -> "TractorSection":
        x = list(x)
        return cls(tuple(x[:n]), x[n], tuple(x[n + 1:]))

    def to_vector(self) -> list:
        return list(self.cov) + [self.scal] + list(self.vec)

    def __add__(self, o):
        return TractorSection.from_vector(self.n, [a + b for a, b in zip(self.to_vector(), o.to_vector())])

    def __sub__(self, o):
        return TractorSection.from_vector(self.n, [a - b for a, b in zip(self.to_vector(), o.to_vector())])

    def scale(self, c) -> "TractorSection":
        return TractorSection.from_vector(self.n, [c * a for a in self.to_vector()])

    def to_json(self) -> dict:
        f = lambda c: str(_value(c)) if isinstance(c, (Jet, Poly)) else str(c)
        return {"cov": [f(c) for c in self.cov], "scal": f(self.scal), "vec": [f(c) for c in self.vec]}


def h_metric(s: TractorSection, t: TractorSection):
    """h(s, t) = 1/2 (w(Y) + v(X) + tau nu)."""
    if s.n != t.n:
        raise ValueError("sections of different rank")
    return Fraction(1, 2) * (_dot(t.cov, s.vec) + _dot(s.cov, t.vec) + s.scal * t.scal)


def gram_matrix(n: int) -> list[list[Fraction]]:
    basis = [TractorSection.from_vector(n, [Fraction(int(i == j)) for j in range(2 * n + 1)])
             for i in range(2 * n + 1)]
    return [[h_metric(a, b) for b in basis] for a in basis]


@dataclass(frozen=True)
class WeylShift:
    """ups1 in H* (the v block) and ups2 in Lambda^2 H* (the skew B block)."""

    ups1: tuple
    ups2: tuple

    def __post_init__(self):
        object.__setattr__(self, "ups1", tuple(self.ups1))
        object.__setattr__(self, "ups2", tuple(tuple(r) for r in self.ups2))
        n = len(self.ups1)
        if len(self.ups2) != n or any(len(r) != n for r in self.ups2):
            raise ValueError("ups2 must be n x n")
        for i in range(n):
            for j in range(i, n):
                a, b = self.ups2[i][j], self.ups2[j][i]
                if not _isz(a + b):
                    raise ValueError("ups2 must be skew")

    @property
    def n(self) -> int:
        return len(self.ups1)

    @classmethod
    def zero(cls, n: int) -> "WeylShift":
        z = Fraction(0)
        return cls((z,) * n, tuple((z,) * n for _ in range(n)))

    def __neg__(self):
        return WeylShift(tuple(-a for a in self.ups1), tuple(tuple(-a for a in r) for r in self.ups2))

    def bracket_with(self, X: Sequence):
        """{ups2, X} = -B X."""
        return [-c for c in _matvec(self.ups2, X)]

    def is_zero(self) -> bool:
        return all(_isz(a) for a in self.ups1) and all(_isz(a) for r in self.ups2 for a in r)


def _rho_p_perp(u: WeylShift) -> list[list]:
    n = u.n
    N = 2 * n + 1
    m = [[Fraction(0)] * N for _ in range(N)]
    for i in range(n):
        m[i][n] = u.ups1[i]
        m[n][n + 1 + i] = -u.ups1[i]
        for j in range(n):
            m[i][n + 1 + j] = u.ups2[i][j]
    return m


def shift_matrix(u: WeylShift) -> list[list]:
    """exp(rho(u)); the series stops after the quadratic term."""
    N = 2 * u.n + 1
    r = _rho_p_perp(u)
    r2 = _matmul(r, r)
    return [[_ident(N)[i][j] + r[i][j] + Fraction(1, 2) * r2[i][j] for j in range(N)] for i in range(N)]


def upsilon_action(s: TractorSection, u: WeylShift) -> TractorSection:
    """(v, t, X) -> (v + t U1 - {U2, X} - 1/2 U1(X) U1, t - U1(X), X)."""
    if s.n != u.n:
        raise ValueError("rank mismatch")
    ux = _dot(u.ups1, s.vec)
    br = u.bracket_with(s.vec)
    cov = [a + s.scal * b - c - Fraction(1, 2) * ux * b for a, b, c in zip(s.cov, u.ups1, br)]
    return TractorSection(tuple(cov), s.scal - ux, s.vec)


def compose_shifts(u: WeylShift, u2: WeylShift) -> WeylShift:
    """Shift equal to acting by ``u`` and then by ``u2``.

    exp(b) exp(a) = exp(a + b + 1/2 [b, a]) since p-perp is two-step nilpotent;
    [b, a] for grade one parts is the B block of the commutator.
    """
    n = u.n
    a, b = _rho_p_perp(WeylShift(u.ups1, WeylShift.zero(n).ups2)), _rho_p_perp(WeylShift(u2.ups1, WeylShift.zero(n).ups2))
    ab, ba = _matmul(a, b), _matmul(b, a)
    comm = [[ba[i][n + 1 + j] - ab[i][n + 1 + j] for j in range(n)] for i in range(n)]
    ups1 = [x + y for x, y in zip(u.ups1, u2.ups1)]
    ups2 = [[u.ups2[i][j] + u2.ups2[i][j] + Fraction(1, 2) * comm[i][j] for j in range(n)] for i in range(n)]
    return WeylShift(ups1, ups2)


@dataclass
class RhoTensor:
    """Blocks of P, indexed [direction][argument] over the adapted frame."""

    P11: list
    P12: list
    P21: list
    P22: list


# ---------------------------------------------------------------------------
# splittings


def _block_coords(alg: GradedLieAlgebra, M) -> dict:
    """Coordinates in ``alg`` of a (2n+1)-square matrix with generic entries."""
    n = alg.n
    out = {}
    for i, (blk, lab) in enumerate(zip(alg.blocks, alg.labels)):
        if blk == "C":
            c = M[n + 1 + lab[0]][lab[1]]
        elif blk == "w":
            c = M[n][lab[0]]
        elif blk == "A":
            c = M[lab[0]][lab[1]]
        elif blk == "v":
            c = M[lab[0]][n]
        else:
            c = M[lab[0]][n + 1 + lab[1]]
        if not _isz(c):
            out[i] = c
    return out


def _matrix_of(alg: GradedLieAlgebra, x: dict) -> list[list]:
    N = alg.N
    m = [[0] * N for _ in range(N)]
    for k, c in x.items():
        for (i, j), v in alg.mats[k].items():
            m[i][j] = c * v + m[i][j]
    return m


def _minus_images(alg: GradedLieAlgebra, frame: ModelFrame) -> list[dict]:
    """Frame symbol -> g_-: X_j -> -w_j, U_kl -> [X_k, X_l]."""
    w = {j: {alg.index("w", j): Fraction(-1)} for j in range(alg.n)}
    out = []
    for s in frame.symbols:
        out.append(dict(w[s[1]]) if s[0] == "X" else alg.bracket_sparse(w[s[1]], w[s[2]]))
    return out


class SplittingData:
    """A splitting of the tractor bundle over a model frame.

    ``omega[a]`` is the so(n+1,n)-valued connection form evaluated on the
    direction ``directions[a]`` (a dict base-frame index -> scalar). The
    directions are adapted: the g_- part of omega[a] is the image of the
    a-th frame symbol. The g_0 part is the preferred connection, the p-perp
    part is the rho tensor.
    """

    def __init__(self, frame: ModelFrame, alg: GradedLieAlgebra, omega: list[dict],
                 directions: list[dict] | None = None, conn: list | None = None):
        self.frame = frame
        self.alg = alg
        self.omega = omega
        self.directions = directions or [{a: Fraction(1)} for a in range(len(frame))]
        self.images = _minus_images(alg, frame)
        self._conn = conn

    @property
    def n(self) -> int:
        return self.alg.n

    def part(self, a: int, grades) -> dict:
        return {k: c for k, c in self.omega[a].items() if self.alg.grades[k] in grades}

    def soldering_defect(self) -> list[int]:
        """Directions whose g_- part differs from the frame symbol."""
        bad = []
        for a in range(len(self.frame)):
            got = self.part(a, (-2, -1))
            want = self.images[a]
            keys = set(got) | set(want)
            if any(not _isz(got.get(k, 0) - want.get(k, 0)) for k in keys):
                bad.append(a)
        return bad

    def gamma(self, a: int) -> list[list]:
        n = self.n
        A = [[0] * n for _ in range(n)]
        for k, c in self.part(a, (0,)).items():
            i, j = self.alg.labels[k]
            A[i][j] = c
        return A

    def rho(self, a: int) -> tuple[list, list[list]]:
        n = self.n
        v = [0] * n
        B = [[0] * n for _ in range(n)]
        for k, c in self.part(a, (1, 2)).items():
            lab = self.alg.labels[k]
            if self.alg.blocks[k] == "v":
                v[lab[0]] = c
            else:
                B[lab[0]][lab[1]] = c
                B[lab[1]][lab[0]] = -c
        return v, B

    def rho_tensor(self) -> RhoTensor:
        """P_ab(Z, W): v-block read on H arguments, B-block read on T_-2 arguments."""
        h = self.frame.h_part
        rest = [i for i in range(len(self.frame)) if i not in h]
        pairs = [self.frame.symbols[r][1:] for r in rest]
        P11, P12, P21, P22 = [], [], [], []
        for a in range(len(self.frame)):
            v, B = self.rho(a)
            one = list(v)
            two = [B[k][l] for k, l in pairs]
            if a in h:
                P11.append(one)
                P12.append(two)
            else:
                P21.append(one)
                P22.append(two)
        return RhoTensor(P11, P12, P21, P22)

    def apply_direction(self, a, f):
        """Derivative of a scalar along direction ``a``."""
        acc = 0
        for b, c in self.directions[a].items():
            fld = self.frame.fields[b]
            if isinstance(f, Jet):
                d = f.derivative(fld)
            elif isinstance(f, Poly):
                d = fld.apply(f)
            else:
                continue
            if not _isz(d):
                acc = c * d + acc
        return acc

    def connection(self) -> list[list[dict]]:
        """conn[a][b] = frame coordinates of nabla_{e_a} e_b."""
        if self._conn is not None:
            return self._conn
        out = []
        for a in range(len(self.frame)):
            g0 = self.part(a, (0,))
            row = []
            for b in range(len(self.frame)):
                y = {}
                for k, c in g0.items():
                    for m, d in self.images[b].items():
                        for r, e in self.alg.table[k][m].items():
                            y[r] = c * (d * e) + y.get(r, 0)
                row.append(_to_frame(self, {r: c for r, c in y.items() if not _isz(c)}))
            out.append(row)
        self._conn = out
        return out


def _to_frame(d: SplittingData, x: dict) -> dict:
    """g_- vector (generic scalars) -> frame coordinates via the symbol images."""
    out = {}
    for a, img in enumerate(d.images):
        # images are +-1 multiples of distinct basis elements
        (k, e), = img.items()
        if k in x:
            out[a] = x[k] / e
    return out


def flat_splitting(n: int, frame: ModelFrame | None = None, alg: GradedLieAlgebra | None = None) -> SplittingData:
    """The standard splitting of the homogeneous model: omega(e_a) = symbol(e_a)."""
    frame = frame or standard_model(n)
    alg = alg or build_so(n)
    images = _minus_images(alg, frame)
    return SplittingData(frame, alg, [dict(i) for i in images])


def tractor_derivative(Z, s: TractorSection, d: SplittingData) -> TractorSection:
    """Z(s) + rho(omega(Z)) s; ``Z`` is a direction index or {index: coefficient}."""
    if isinstance(Z, int):
        Z = {Z: Fraction(1)}
    comps = s.to_vector()
    out = [0] * len(comps)
    for a, c in Z.items():
        M = _matrix_of(d.alg, d.omega[a])
        act = _matvec(M, comps)
        der = [d.apply_direction(a, f) for f in comps]
        out = [o + c * (x + y) for o, x, y in zip(out, act, der)]
    return TractorSection.from_vector(d.n, out)


def connection_change(d: SplittingData, u: WeylShift) -> SplittingData:
    """nabla_X Y -> nabla_X Y + {{X, ups}, Y}_- on the frame."""
    alg = d.alg
    n = alg.n
    ups = {}
    for i in range(n):
        if not _isz(u.ups1[i]):
            ups[alg.index("v", i)] = u.ups1[i]
    for k, l in combinations(range(n), 2):
        if not _isz(u.ups2[k][l]):
            ups[alg.index("B", k, l)] = u.ups2[k][l]
    minus = set(alg.minus_indices)

    def br(x, y):
        out = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, e in alg.table[i][j].items():
                    out[k] = a * (b * e) + out.get(k, 0)
        return {k: c for k, c in out.items() if not _isz(c)}

    old = d.connection()
    new = []
    for a in range(len(d.frame)):
        xa = br(d.images[a], ups)
        row = []
        for b in range(len(d.frame)):
            y = br(xa, d.images[b])
            extra = _to_frame(d, {k: c for k, c in y.items() if k in minus})
            cell = dict(old[a][b])
            for k, c in extra.items():
                cell[k] = cell.get(k, 0) + c
            row.append({k: c for k, c in cell.items() if not _isz(c)})
        new.append(row)
    return SplittingData(d.frame, alg, d.omega, d.directions, new)


def _exp_nilpotent(M, N: int):
    out = _ident(N)
    term = _ident(N)
    for k in range(1, 2 * N):
        term = [[x * Fraction(1, k) for x in r] for r in _matmul(term, M)]
        if all(_isz(x) for r in term for x in r):
            break
        out = _madd(out, term)
    return out


def parallel_section(d: SplittingData, s0: Sequence) -> TractorSection:
    """exp(-rho(sum_a x_a symbol_a)) s0 on the homogeneous model."""
    fr = d.frame
    co = fr.coords
    x = {}
    for a, c in enumerate(co):
        for k, e in d.images[a].items():
            x[k] = x.get(k, 0) + Poly.var(co, c) * (-e)
    N = d.alg.N
    M = _matrix_of(d.alg, x)
    G = _exp_nilpotent(M, N)
    vec = [as_scalar(c) for c in s0]
    return TractorSection.from_vector(d.n, [_dot(r, vec) if True else 0 for r in G])


# ---------------------------------------------------------------------------
# V-preferred splittings


def mu_extraction(V: Sequence[TractorSection]) -> tuple[list[list], list[list]]:
    """(mu, g) on A with respect to the basis of vec slots of ``V``.

    mu[i][j] = mu(X_i)(X_j) = cov_i . X_j; g is its symmetric part.
    """
    for s in V:
        if not _isz(s.scal):
            raise ValueError("V has an R component in this splitting")
    mu = [[_dot(si.cov, sj.vec) for sj in V] for si in V]
    g = [[Fraction(1, 2) * (mu[i][j] + mu[j][i]) for j in range(len(V))] for i in range(len(V))]
    return mu, g


def gram_of_sections(V: Sequence[TractorSection]) -> list[list]:
    return [[h_metric(a, b) for b in V] for a in V]


def _vec_matrix(V):
    return [list(s.vec) for s in V]


def _dual_frame(Xs: list[list], n: int) -> list[list]:
    """Covectors Y*_p with Y*_p(X_q) = delta_pq for q < len(Xs).

    Xs is completed to a basis with standard vectors chosen at the base point.
    """
    r = len(Xs)
    base = [[_value(c) for c in x] for x in Xs]
    if rank(base) < r:
        raise GenericityError("vec slots of V are dependent at the base point")
    full = [list(x) for x in Xs]
    cur = [list(b) for b in base]
    for i in range(n):
        if len(full) == n:
            break
        e = [Fraction(int(i == j)) for j in range(n)]
        if rank(cur + [e]) > len(cur):
            cur.append(e)
            full.append(e)
    # rows of inverse(transpose(full)) are the dual covectors
    inv = _inverse(_transpose(full))
    return inv[:r]


def _skew_bracket(a: Sequence, b: Sequence) -> list[list]:
    """B block of [a, b] for grade one elements with v blocks a and b."""
    n = len(a)
    ra = _rho_p_perp(WeylShift(a, WeylShift.zero(n).ups2))
    rb = _rho_p_perp(WeylShift(b, WeylShift.zero(n).ups2))
    ab, ba = _matmul(ra, rb), _matmul(rb, ra)
    return [[ab[i][n + 1 + j] - ba[i][n + 1 + j] for j in range(n)] for i in range(n)]


def _shift(n, ups1=None, ups2=None) -> WeylShift:
    z = WeylShift.zero(n)
    return WeylShift(ups1 if ups1 is not None else z.ups1, ups2 if ups2 is not None else z.ups2)


def _orthogonal_frame(V: list[TractorSection]) -> list[TractorSection]:
    """Diagonalize h on V by congruence (pivots must be units)."""
    W = list(V)
    r = len(W)
    k = 0
    while k < r:
        G = gram_of_sections(W)
        piv = next((i for i in range(k, r) if _is_unit(G[i][i])), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, r) for j in range(i + 1, r) if _is_unit(G[i][j])), None)
            if pair is None:
                break
            i, j = pair
            W[i] = W[i] + W[j]
            continue
        W[k], W[piv] = W[piv], W[k]
        G = gram_of_sections(W)
        inv = 1 / G[k][k]
        for j in range(k + 1, r):
            if not _isz(G[j][k]):
                W[j] = W[j] - W[k].scale(G[j][k] * inv)
        k += 1
    return W


def _apply_all(V, u):
    return [upsilon_action(s, u) for s in V]


def normalize_splitting_for_V(V: Sequence[TractorSection], strong: bool = False,
                              stage2_coefficient: str = "computed"):
    """Run the three-stage normalization on sections of V.

    Returns (shifts, sections) where ``sections`` are the V sections in the
    final splitting. Stage two uses the shift sum_k c_k {Y*_{l+1}, Y*_k};
    ``stage2_coefficient="literal"`` takes c_k = nu_{l+1}(Y_k) unscaled,
    the default rescales c_k by the computed action of the unit shift.
    """
    V = list(V)
    if not V:
        return [], []
    n = V[0].n
    shifts: list[WeylShift] = []

    def act(u):
        nonlocal V
        if not u.is_zero():
            V = _apply_all(V, u)
            shifts.append(u)

    # stage 1: kill the R component. With v1' = v1 / tau_1 and the other
    # frame sections cleared of R, alpha(X'_j) = delta_1j is the same covector
    # as alpha(X_j) = tau_j, which needs no unit tau.
    if any(not _isz(s.scal) for s in V):
        duals = _dual_frame(_vec_matrix(V), n)
        alpha = [_dot([s.scal for s in V], [d[i] for d in duals]) for i in range(n)]
        act(_shift(n, ups1=alpha))
    # stage 2: make mu symmetric through an orthogonal frame
    W = _orthogonal_frame(V)
    r = len(W)
    for l in range(r):
        duals = _dual_frame(_vec_matrix(W), n)
        ups2 = [[0] * n for _ in range(n)]
        touched = False
        for k in range(l + 1, r):
            nu = _dot(W[l].cov, W[k].vec)
            if _isz(nu):
                continue
            unit = _skew_bracket(duals[l], duals[k])
            if stage2_coefficient == "literal":
                c = nu
            else:
                # a unit shift adds (B Y_l)(Y_k) to nu_l(Y_k)
                eff = _dot(_matvec(unit, W[l].vec), W[k].vec)
                c = -nu / eff
            ups2 = _madd(ups2, unit, c)
            touched = True
        if touched:
            u = _shift(n, ups2=ups2)
            W = _apply_all(W, u)
            V = _apply_all(V, u)
            shifts.append(u)
    # stage 3: strong variant kills mu on the isotropic part
    if strong:
        G = gram_of_sections(V)
        Gv = [[_value(c) for c in row] for row in G]
        iso = kernel(Gv, len(V)) if Gv else []
        if iso:
            comb = [TractorSection.from_vector(n, [sum((c * s.to_vector()[t] for c, s in zip(kv, V)), 0)
                                                   for t in range(2 * n + 1)]) for kv in iso]
            rest = []
            basis = [list(k) for k in iso]
            for i in range(len(V)):
                e = [Fraction(int(i == j)) for j in range(len(V))]
                if rank(basis + [e]) > len(basis):
                    basis.append(e)
                    rest.append(V[i])
            F = comb + rest
            p = len(comb)
            for l in range(p):
                tau = list(F[l].cov)
                if all(_isz(t) for t in tau):
                    continue
                xi = _dual_frame(_vec_matrix(F), n)[l]
                unit = _skew_bracket(xi, tau)
                eff = _matvec(unit, F[l].vec)
                # unit shift changes cov by +B X; find c with tau + c * eff = 0
                j = next(i for i, t in enumerate(tau) if _is_unit(t) or not _isz(t))
                c = -tau[j] / eff[j]
                u = _shift(n, ups2=[[c * x for x in row] for row in unit])
                F = _apply_all(F, u)
                V = _apply_all(V, u)
                shifts.append(u)
    return shifts, V


def composite_shift(shifts: Sequence[WeylShift], n: int) -> WeylShift:
    total = WeylShift.zero(n)
    for u in shifts:
        total = compose_shifts(total, u)
    return total


def strong_defects(V: Sequence[TractorSection]) -> list:
    """Sections of iso^h(V) whose cov slot is nonzero (empty when strongly preferred)."""
    V = list(V)
    if not V:
        return []
    n = V[0].n
    G = [[_value(c) for c in row] for row in gram_of_sections(V)]
    bad = []
    for kv in kernel(G, len(V)):
        cov = [sum((c * _value(s.cov[t]) for c, s in zip(kv, V)), Fraction(0)) for t in range(n)]
        if any(cov):
            bad.append(cov)
    return bad


def closed_form_normalization(V: Sequence[TractorSection]):
    """Independent route for rank-n generic V: solve alpha(X_j) = tau_j, then
    take ups2 = minus the skew part of mu in the coordinate basis."""
    V = list(V)
    n = V[0].n
    Xs = _vec_matrix(V)
    inv = _inverse(_transpose(Xs))  # rows: dual covectors
    alpha = [_dot([V[j].scal for j in range(len(V))], [inv[j][i] for j in range(len(V))]) for i in range(n)]
    u1 = _shift(n, ups1=alpha)
    V1 = _apply_all(V, u1)
    # matrix of mu in coordinates: cov = M X
    covs = _transpose([list(s.cov) for s in V1])
    vecs_inv = _inverse(_transpose(_vec_matrix(V1)))
    M = _matmul(covs, vecs_inv)
    # cov + B X symmetrizes M + B
    B = [[-Fraction(1, 2) * (M[i][j] - M[j][i]) for j in range(n)] for i in range(n)]
    u2 = _shift(n, ups2=B)
    return [u1, u2], _apply_all(V1, u2)


def random_generic_V(n: int, r: int, rng: random.Random, g_rank: int | None = None) -> list[TractorSection]:
    """Random generic V of rank r; with ``g_rank`` the metric h on V has that rank.

    Degenerate cases are built in a nice splitting (no R part, symmetric mu
    of the requested rank) and then scrambled by a random shift and basis change.
    """
    def q():
        return Fraction(rng.randint(-6, 6), rng.randint(1, 4))

    while True:
        X = [[q() for _ in range(n)] for _ in range(r)]
        if rank(X) == r:
            break
    if g_rank is None:
        return [TractorSection([q() for _ in range(n)], q(), x) for x in X]
    # symmetric mu on A of given rank, mu(X_i)(X_j) = S_ij
    while True:
        L = [[q() for _ in range(g_rank)] for _ in range(r)]
        S = [[sum((L[i][k] * L[j][k] * (1 if k % 2 == 0 else -1) for k in range(g_rank)), Fraction(0))
              for j in range(r)] for i in range(r)]
        if rank(S) == g_rank:
            break
    # cov_i with cov_i . X_j = S_ij; pick the minimal solution
    covs = []
    for i in range(r):
        covs.append(solve(X, S[i]))
    V = [TractorSection(c, Fraction(0), x) for c, x in zip(covs, X)]
    n2 = [[q() for _ in range(n)] for _ in range(n)]
    skew = [[n2[i][j] - n2[j][i] for j in range(n)] for i in range(n)]
    V = _apply_all(V, WeylShift([q() for _ in range(n)], skew))
    while True:
        T = [[q() for _ in range(r)] for _ in range(r)]
        if rank(T) == r:
            break
    out = []
    for row in T:
        vec = [sum((c * s.to_vector()[t] for c, s in zip(row, V)), Fraction(0)) for t in range(2 * n + 1)]
        out.append(TractorSection.from_vector(n, vec))
    return out


# ---------------------------------------------------------------------------
# the maximal-rank pipeline on the flat model


def _to_jets(x, coords, order):
    if isinstance(x, Jet):
        return x
    if isinstance(x, Poly):
        return Jet(x, order)
    return Jet(Poly.const(coords, x), order)


def _new_splitting(flat: SplittingData, total: WeylShift, order: int) -> SplittingData:
    """Splitting obtained from ``flat`` by the (jet-valued) shift ``total``."""
    alg = flat.alg
    co = flat.frame.coords
    J = lambda c: _to_jets(c, co, order)
    G = [[J(c) for c in row] for row in shift_matrix(total)]
    Ginv = [[J(c) for c in row] for row in shift_matrix(-total)]
    om_old = []
    for a in range(len(flat.frame)):
        Ma = [[J(c) for c in row] for row in _matrix_of(alg, flat.omega[a])]
        dG = [[flat.apply_direction(a, c) for c in row] for row in G]
        dG = [[J(c) for c in row] for row in dG]
        M = _madd(_matmul(_matmul(G, Ma), Ginv), _matmul(dG, Ginv), -1)
        om_old.append(_block_coords(alg, M))
    # re-adapt the directions so the soldering part is the frame symbol
    nf = len(flat.frame)
    images = flat.images
    S = []
    for a in range(nf):
        row = []
        for b in range(nf):
            (k, e), = images[b].items()
            row.append(J(om_old[a].get(k, 0)) * (1 / e) if k in om_old[a] else J(0))
        S.append(row)
    Sinv = _inverse(S)
    omega, directions = [], []
    for c in range(nf):
        om = {}
        dirs = {}
        for b in range(nf):
            coef = Sinv[c][b]
            if _isz(coef):
                continue
            for k, val in om_old[b].items():
                om[k] = coef * val + om.get(k, 0)
            for bb, cc in flat.directions[b].items():
                dirs[bb] = coef * cc + dirs.get(bb, 0)
        omega.append({k: v for k, v in om.items() if not _isz(v)})
        directions.append(dirs)
    return SplittingData(flat.frame, alg, omega, directions)


def _lambda2(mu, pairs):
    return [[mu[k][m] * mu[l][nn] - mu[k][nn] * mu[l][m] for (m, nn) in pairs] for (k, l) in pairs]


def verify_maxpref_properties(s0: Sequence[Sequence], n: int | None = None, order: int = 2,
                              mutate: bool = False, strong: bool = True) -> Report:
    """Flat model pipeline: parallel V from constant vectors ``s0``, normalize,
    read off mu, nabla and P in the new splitting and check the bullets."""
    n = n or (len(s0[0]) - 1) // 2
    flat = flat_splitting(n)
    frame = flat.frame
    co = frame.coords
    rep = Report("maxpref")
    V = [parallel_section(flat, s) for s in s0]
    if mutate:
        x1 = Poly.var(co, co[0])
        bumped = list(V[0].to_vector())
        bumped[n] = bumped[n] + x1
        V[0] = TractorSection.from_vector(n, bumped)
    par = all(all(_isz(c) for c in tractor_derivative(a, s, flat).to_vector())
              for s in V for a in range(len(frame)))
    rep.data["parallel"] = par
    Vj = [TractorSection.from_vector(n, [_to_jets(c, co, order) for c in s.to_vector()]) for s in V]
    shifts, Vn = normalize_splitting_for_V(Vj, strong=strong)
    total = composite_shift(shifts, n)
    total = WeylShift([_to_jets(c, co, order) for c in total.ups1],
                      [[_to_jets(c, co, order) for c in r] for r in total.ups2])
    d = _new_splitting(flat, total, order)
    rep.data["splitting"] = d
    r = len(Vn)
    # vec slots of V span A; for rank n these are coordinates for H
    rep.record("no R component", all(_isz(s.scal) for s in Vn),
               [str(s.scal) for s in Vn])
    mu, g = mu_extraction(Vn)
    h = gram_of_sections(Vn)
    rep.record("mu symmetric", all(mu[i][j] == mu[j][i] for i in range(r) for j in range(r)))
    rep.record("mu = h on V", all(mu[i][j] == h[i][j] for i in range(r) for j in range(r)))
    # mu as a matrix on H: cov = M X
    Xs = _transpose(_vec_matrix(Vn))
    covs = _transpose([list(s.cov) for s in Vn])
    if r == n:
        M = _matmul(covs, _inverse(Xs))
    else:
        M = None
    mu0 = [[_value(c) for c in row] for row in mu]
    nondeg = rank(mu0) == r == n
    rep.data["mu_nondegenerate"] = nondeg
    rho = d.rho_tensor()
    hidx = frame.h_part
    rest = [i for i in range(len(frame)) if i not in hidx]
    pairs = [frame.symbols[q][1:] for q in rest]
    at0 = lambda c: _value(c) if not isinstance(c, int) else Fraction(c)
    if nondeg:
        # mu_ab = mu(e_a)(e_b) = M[b][a]
        mu_h = _transpose(M)
        # nabla mu: Z(M) + A M + M A^T for every direction
        bad = []
        for a in range(len(frame)):
            A = d.gamma(a)
            ZM = [[d.apply_direction(a, c) for c in row] for row in M]
            val = _madd(_madd(ZM, _matmul(A, M)), _matmul(M, _transpose(A)))
            if any(at0(c) for row in val for c in row):
                bad.append(frame.names[a])
        rep.record("nabla mu = 0", not bad, bad)
        p11 = [[at0(c) for c in row] for row in rho.P11]
        rep.record("P11 = -mu", p11 == [[-at0(c) for c in row] for row in mu_h],
                   {"P11": p11, "mu": [[at0(c) for c in row] for row in mu_h]})
        rep.record("P12 = 0", all(at0(c) == 0 for row in rho.P12 for c in row), rho.P12)
        rep.record("P21 = 0", all(at0(c) == 0 for row in rho.P21 for c in row), rho.P21)
        lam = _lambda2([[at0(c) for c in row] for row in mu_h], pairs)
        p22 = [[at0(c) for c in row] for row in rho.P22]
        rep.record("P22 = -mu", p22 == [[-c for c in row] for row in lam], {"P22": p22, "mu": lam})
        rep.record("nabla P = 0", not _nabla_P_defects(d), _nabla_P_defects(d))
    else:
        _general_properties(rep, d, Vn, frame, at0)
    return rep


def _nabla_P_defects(d: SplittingData) -> list:
    """(nabla_a P)(b) = e_a(P(e_b)) + [Gamma_a, P(e_b)] - P(nabla_{e_a} e_b), at the base point."""
    alg = d.alg
    nf = len(d.frame)
    conn = d.connection()
    P = [d.part(b, (1, 2)) for b in range(nf)]
    bad = []
    for a in range(nf):
        g0 = d.part(a, (0,))
        for b in range(nf):
            val = {}
            for k, c in P[b].items():
                dc = d.apply_direction(a, c)
                if not _isz(dc):
                    val[k] = dc + val.get(k, 0)
            for i, x in g0.items():
                for j, y in P[b].items():
                    for k, e in alg.table[i][j].items():
                        val[k] = x * (y * e) + val.get(k, 0)
            for c_idx, coef in conn[a][b].items():
                for k, y in P[c_idx].items():
                    val[k] = -(coef * y) + val.get(k, 0)
            vals = {alg.names[k]: _value(v) for k, v in val.items() if _value(v)}
            if vals:
                bad.append((d.frame.names[a], d.frame.names[b], {k: str(v) for k, v in vals.items()}))
    return bad


def _general_properties(rep: Report, d: SplittingData, Vn, frame, at0) -> None:
    """Properties of the normalized connection for degenerate or lower-rank V."""
    n = d.n
    r = len(Vn)
    X0 = [[at0(c) for c in s.vec] for s in Vn]           # basis of A at 0
    hidx = frame.h_part
    rest = [i for i in range(len(frame)) if i not in hidx]
    pairs = [frame.symbols[q][1:] for q in rest]
    rho = d.rho_tensor()
    # item 3: P11(Z, X) = -mu(X)(Z) for X in A
    bad = []
    for j, row in enumerate(rho.P11):
        for i, s in enumerate(Vn):
            lhs = sum((at0(c) * x for c, x in zip(row, X0[i])), Fraction(0))
            if lhs != -at0(s.cov[j]):
                bad.append((j, i, str(lhs), str(-at0(s.cov[j]))))
    rep.record("P11 = -mu + eta, eta in H* x A-perp", not bad, bad)
    # item 5: P21 kills A, P12 vanishes on A ^ A
    bad21 = [(q, i) for q, row in enumerate(rho.P21) for i in range(r)
             if sum((at0(c) * x for c, x in zip(row, X0[i])), Fraction(0))]
    rep.record("P21 in T2* x A-perp", not bad21, bad21)

    def on_AA(two):
        B = [[Fraction(0)] * n for _ in range(n)]
        for (k, l), c in zip(pairs, two):
            B[k][l] = at0(c)
            B[l][k] = -at0(c)
        return [sum((X0[i][p] * B[p][q] * X0[j][q] for p in range(n) for q in range(n)), Fraction(0))
                for i in range(r) for j in range(r)]

    bad12 = [j for j, two in enumerate(rho.P12) if any(on_AA(two))]
    rep.record("P12 in T1* x {A-perp, H*}", not bad12, bad12)
    # item 4: P22 + mu vanishes on B x B, B = {A, A}, with mu extended as in the rank-n case
    mu_A = [[_dot([at0(c) for c in si.cov], X0[j]) for j in range(r)] for si in Vn]

    def biv(i, j):
        return [X0[i][k] * X0[j][l] - X0[i][l] * X0[j][k] for k, l in pairs]

    bad22 = []
    for i, j in combinations(range(r), 2):
        coef = biv(i, j)
        two = [sum((c * at0(row[t]) for c, row in zip(coef, rho.P22)), Fraction(0)) for t in range(len(pairs))]
        vals = on_AA(two)
        for p, q in combinations(range(r), 2):
            lam = mu_A[i][p] * mu_A[j][q] - mu_A[i][q] * mu_A[j][p]
            if vals[p * r + q] + lam:
                bad22.append(((i, j), (p, q), str(vals[p * r + q]), str(-lam)))
    rep.record("P22 = -mu + eta'", not bad22, bad22)
    # item 2: nabla mu vanishes on A x A
    badmu = []
    for a in range(len(frame)):
        A = d.gamma(a)
        for i, si in enumerate(Vn):
            for j, sj in enumerate(Vn):
                # Z(mu(X_i, X_j)) - mu(nabla X_i, X_j) - mu(X_i, nabla X_j) with X_i the vec slots
                val = d.apply_direction(a, _dot(si.cov, sj.vec))
                nXi = [d.apply_direction(a, c) for c in si.vec]
                nXi = [x - y for x, y in zip(nXi, _matvec(_transpose(A), si.vec))]
                nXj = [d.apply_direction(a, c) for c in sj.vec]
                nXj = [x - y for x, y in zip(nXj, _matvec(_transpose(A), sj.vec))]
                val = val - _dot(si.cov, nXj) - _dot(sj.cov, nXi)
                if at0(val) if not isinstance(val, int) else val:
                    badmu.append((frame.names[a], i, j))
    rep.record("nabla mu = 0 on A x A", not badmu, badmu)


# ---------------------------------------------------------------------------
# aggregate checks


def h_invariance_check(n: int, rng: random.Random | None = None, trials: int = 10) -> Report:
    """h(s', t') = h(s, t) under the Upsilon action.

    With ``rng`` None the check is symbolic: all slots of s, t and the shift
    are independent polynomial variables.
    """
    rep = Report(f"h invariance n={n}")
    if rng is None:
        names = ([f"s{i}" for i in range(2 * n + 1)] + [f"t{i}" for i in range(2 * n + 1)]
                 + [f"u{i}" for i in range(n)] + [f"b{i}{j}" for i, j in combinations(range(n), 2)])
        var = lambda s: Poly.var(names, s)
        s = TractorSection.from_vector(n, [var(f"s{i}") for i in range(2 * n + 1)])
        t = TractorSection.from_vector(n, [var(f"t{i}") for i in range(2 * n + 1)])
        zero = Poly.zero(names)
        B = [[zero] * n for _ in range(n)]
        for i, j in combinations(range(n), 2):
            B[i][j] = var(f"b{i}{j}")
            B[j][i] = -B[i][j]
        u = WeylShift([var(f"u{i}") for i in range(n)], B)
        diff = h_metric(upsilon_action(s, u), upsilon_action(t, u)) - h_metric(s, t)
        rep.record("symbolic h invariance", diff.is_zero(), repr(diff))
        return rep
    q = lambda: Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    bad = []
    for _ in range(trials):
        s = TractorSection.from_vector(n, [q() for _ in range(2 * n + 1)])
        t = TractorSection.from_vector(n, [q() for _ in range(2 * n + 1)])
        m = [[q() for _ in range(n)] for _ in range(n)]
        u = WeylShift([q() for _ in range(n)], [[m[i][j] - m[j][i] for j in range(n)] for i in range(n)])
        if h_metric(upsilon_action(s, u), upsilon_action(t, u)) != h_metric(s, t):
            bad.append((s.to_json(), t.to_json()))
    rep.record("randomized h invariance", not bad, bad[:1])
    return rep


def normalization_report(n: int, r: int, count: int, rng: random.Random, strong: bool = False,
                         g_rank: int | None = None) -> Report:
    """Normalize ``count`` random generic V of rank r and check the V-preferred conditions."""
    rep = Report(f"normalize n={n} r={r}" + (f" g_rank={g_rank}" if g_rank is not None else ""))
    no_r, sym, metric, strong_bad = [], [], [], []
    for trial in range(count):
        V = random_generic_V(n, r, rng, g_rank)
        _, Vn = normalize_splitting_for_V(V, strong=strong)
        if any(not _isz(s.scal) for s in Vn):
            no_r.append(trial)
            continue
        mu, g = mu_extraction(Vn)
        if any(mu[i][j] != mu[j][i] for i in range(r) for j in range(r)):
            sym.append({"trial": trial, "mu": [[str(c) for c in row] for row in mu]})
        if g != gram_of_sections(Vn):
            metric.append(trial)
        if strong and strong_defects(Vn):
            strong_bad.append(trial)
    rep.record("no R component", not no_r, no_r[:3])
    rep.record("mu symmetric", not sym, sym[:1])
    rep.record("mu = h on V", not metric, metric[:3])
    if strong:
        rep.record("mu kills iso(A)", not strong_bad, strong_bad[:3])
    rep.data["count"] = count
    return rep
