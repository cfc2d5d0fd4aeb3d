"""Split octonions as Zorn vector matrices, the G2' three-form and friends.

A split octonion is (a, v, w, b) with a, b scalars and v, w in R^3:

    (a, v, w, b)(a', v', w', b') = (aa' + v.w', a v' + b' v + w x w',
                                    a' w + b w' - v x v', bb' + v'.w)

and N(x, x) = ab - v.w. Imaginary elements have a = -b. Coordinates on
Im O' are (v1, v2, v3, w1, w2, w3, a).
"""

from __future__ import annotations

import random
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .graded_lie import MatrixLieAlgebra, build_so, commutator, so_of_form
from .poly_models import Poly
from .rational_linalg import (
    as_scalar,
    in_span,
    kernel,
    rank,
    solve,
    span_basis,
    subspace_intersection,
)
from .report import Report

__all__ = [
    "ZornOctonion",
    "zorn_mul",
    "alternator",
    "zorn_mul_literal",
    "symbolic_identities",
    "norm",
    "polar",
    "theta",
    "ONE",
    "basis",
    "im_basis",
    "from_im",
    "to_im",
    "im_gram",
    "theta_tensor",
    "cayley_form",
    "octonion_gram",
    "alternator_form",
    "IsotropicPlane",
    "PlaneClass",
    "classify_isotropic_plane",
    "canonical_closed_plane",
    "standard_triple",
    "find_triple",
    "lam",
    "TRIPLE_SCALE",
    "triple_table_check",
    "StabilizerAlgebra",
    "stabilizer_algebra",
    "g2_graded_decomposition",
    "sl3_example_check",
    "symbolic_octonion",
    "random_basis_change",
    "random_group_element",
    "random_plane",
]


def _z(x) -> bool:
    if isinstance(x, Poly):
        return x.is_zero()
    return not x


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


@dataclass(frozen=True)
class ZornOctonion:
    a: object
    v: tuple
    w: tuple
    b: object

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(self.v))
        object.__setattr__(self, "w", tuple(self.w))
        if len(self.v) != 3 or len(self.w) != 3:
            raise ValueError("v and w must be 3-vectors")

    def __add__(self, o):
        return ZornOctonion(self.a + o.a, tuple(p + q for p, q in zip(self.v, o.v)),
                            tuple(p + q for p, q in zip(self.w, o.w)), self.b + o.b)

    def __sub__(self, o):
        return self + o.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "ZornOctonion":
        return ZornOctonion(self.a * c, tuple(p * c for p in self.v), tuple(p * c for p in self.w), self.b * c)

    def __mul__(self, o):
        if isinstance(o, ZornOctonion):
            return zorn_mul(self, o)
        return self.scale(o)

    def conjugate(self) -> "ZornOctonion":
        return ZornOctonion(self.b, tuple(-p for p in self.v), tuple(-p for p in self.w), self.a)

    def is_imaginary(self) -> bool:
        return _z(self.a + self.b)

    def is_zero(self) -> bool:
        return all(_z(c) for c in self.to_vector())

    def to_vector(self) -> list:
        return [self.a, *self.v, *self.w, self.b]

    def __repr__(self):
        return f"Zorn({self.a}, {list(self.v)}, {list(self.w)}, {self.b})"


def zorn_mul(x: ZornOctonion, y: ZornOctonion) -> ZornOctonion:
    a, v, w, b = x.a, x.v, x.w, x.b
    a2, v2, w2, b2 = y.a, y.v, y.w, y.b
    ww = _cross(w, w2)
    vv = _cross(v, v2)
    return ZornOctonion(
        a * a2 + _dot(v, w2),
        tuple(a * p + b2 * q + r for p, q, r in zip(v2, v, ww)),
        tuple(a2 * p + b * q - r for p, q, r in zip(w, w2, vv)),
        b * b2 + _dot(v2, w),
    )


def zorn_mul_literal(x: ZornOctonion, y: ZornOctonion) -> ZornOctonion:
    """The product with a w' in the third slot; kept only to show it is not alternative."""
    a, v, w, b = x.a, x.v, x.w, x.b
    a2, v2, w2, b2 = y.a, y.v, y.w, y.b
    ww = _cross(w, w2)
    vv = _cross(v, v2)
    return ZornOctonion(
        a * a2 + _dot(v, w2),
        tuple(a * p + b2 * q + r for p, q, r in zip(v2, v, ww)),
        tuple(a2 * p + a * q - r for p, q, r in zip(w, w2, vv)),
        b * b2 + _dot(v2, w),
    )


def alternator(x, y, z) -> ZornOctonion:
    """[x, y, z] = (xy)z - x(yz)."""
    return (x * y) * z - x * (y * z)


def norm(x: ZornOctonion):
    return x.a * x.b - _dot(x.v, x.w)


def polar(x: ZornOctonion, y: ZornOctonion):
    """N(x, y) with N(x, x) = norm(x)."""
    return Fraction(1, 2) * (x.a * y.b + y.a * x.b - _dot(x.v, y.w) - _dot(y.v, x.w))


def theta(x, y, z):
    """theta(x, y, z) = N(xy, z) on imaginary octonions."""
    for e in (x, y, z):
        if not e.is_imaginary():
            raise ValueError("theta needs imaginary arguments")
    return polar(x * y, z)


ONE = ZornOctonion(Fraction(1), (0, 0, 0), (0, 0, 0), Fraction(1))


def _unit(i):
    return tuple(Fraction(int(i == j)) for j in range(3))


def basis() -> list[ZornOctonion]:
    z = (Fraction(0),) * 3
    out = [ZornOctonion(Fraction(1), z, z, Fraction(0))]
    out += [ZornOctonion(Fraction(0), _unit(i), z, Fraction(0)) for i in range(3)]
    out += [ZornOctonion(Fraction(0), z, _unit(i), Fraction(0)) for i in range(3)]
    out.append(ZornOctonion(Fraction(0), z, z, Fraction(1)))
    return out


def from_im(c: Sequence) -> ZornOctonion:
    c = [as_scalar(x) for x in c]
    return ZornOctonion(c[6], c[0:3], c[3:6], -c[6])


def to_im(x: ZornOctonion) -> list:
    if not x.is_imaginary():
        raise ValueError("not imaginary")
    return [*x.v, *x.w, x.a]


def im_basis() -> list[ZornOctonion]:
    return [from_im([int(i == j) for j in range(7)]) for i in range(7)]


def im_gram() -> list[list[Fraction]]:
    e = im_basis()
    return [[polar(x, y) for y in e] for x in e]


def symbolic_octonion(prefix: str, coords: Sequence[str], imaginary: bool = False) -> ZornOctonion:
    var = lambda k: Poly.var(coords, f"{prefix}{k}")
    if imaginary:
        a = var(0)
        return ZornOctonion(a, (var(1), var(2), var(3)), (var(4), var(5), var(6)), -a)
    return ZornOctonion(var(0), (var(1), var(2), var(3)), (var(4), var(5), var(6)), var(7))


def theta_tensor() -> dict[tuple, Fraction]:
    e = im_basis()
    out = {}
    for i, j, k in product(range(7), repeat=3):
        t = theta(e[i], e[j], e[k])
        if t:
            out[(i, j, k)] = t
    return out


def alternator_form() -> dict[tuple, Fraction]:
    """N([x, y, z], w) on the Im O' basis."""
    e = im_basis()
    out = {}
    for i, j, k, l in product(range(7), repeat=4):
        t = polar(alternator(e[i], e[j], e[k]), e[l])
        if t:
            out[(i, j, k, l)] = t
    return out


def _real_split(x: ZornOctonion):
    r = (x.a + x.b) / 2
    return r, x - ONE.scale(r)


# with this weight on the alternator part the stabilizer in so(4,4) is 21-dimensional;
# other weights only give g2'
CAYLEY_WEIGHT = Fraction(1, 2)


def cayley_form() -> dict[tuple, Fraction]:
    """4-form on O' with 1 -| lam = theta: e^ theta + 1/2 N([x, y, z], w) on Im O'."""
    e = basis()
    parts = [_real_split(x) for x in e]
    out = {}
    for idx in product(range(8), repeat=4):
        xs = [parts[i] for i in idx]
        val = Fraction(0)
        for i in range(4):
            if xs[i][0]:
                rest = [xs[j][1] for j in range(4) if j != i]
                val += (-1) ** i * xs[i][0] * theta(*rest)
        val += CAYLEY_WEIGHT * polar(alternator(xs[0][1], xs[1][1], xs[2][1]), xs[3][1])
        if val:
            out[idx] = val
    return out


def octonion_gram() -> list[list[Fraction]]:
    e = basis()
    return [[polar(x, y) for y in e] for x in e]


def symbolic_identities(mul=zorn_mul) -> Report:
    """Alternativity, multiplicativity and skewness as polynomial identities."""
    rep = Report("octonion identities")
    names = [f"{p}{i}" for p in "xyzw" for i in range(8)]
    x, y, z, w = (symbolic_octonion(p, names) for p in "xyzw")
    alt = lambda p, q, r: mul(mul(p, q), r) - mul(p, mul(q, r))
    rep.record("[x, x, y] = 0", alt(x, x, y).is_zero())
    rep.record("[y, x, x] = 0", alt(y, x, x).is_zero())
    d = norm(mul(x, y)) - norm(x) * norm(y)
    rep.record("N(xy) = N(x) N(y)", d.is_zero(), None if d.is_zero() else f"{len(d.terms)} terms")
    rep.record("1 x = x 1 = x", (mul(ONE, x) - x).is_zero() and (mul(x, ONE) - x).is_zero())
    xi, yi, zi, wi = (symbolic_octonion(p, names, imaginary=True) for p in "xyzw")
    th = lambda p, q, r: polar(mul(p, q), r)
    rep.record("theta(x, x, y) = 0", th(xi, xi, yi).is_zero())
    rep.record("theta(x, y, x) = 0", th(xi, yi, xi).is_zero())
    rep.record("theta(y, x, x) = 0", th(yi, xi, xi).is_zero())
    phi = lambda p, q, r, s: polar(alt(p, q, r), s)
    base = phi(xi, yi, zi, wi)
    swaps = [phi(yi, xi, zi, wi), phi(xi, zi, yi, wi), phi(xi, yi, wi, zi)]
    rep.record("N([x, y, z], w) skew in all four entries", all((base + s).is_zero() for s in swaps))
    return rep


# ---------------------------------------------------------------------------
# isotropic planes


class IsotropicPlane:
    def __init__(self, basis: Sequence[ZornOctonion]):
        self.basis = list(basis)
        if len(self.basis) != 3:
            raise ValueError("a plane needs three basis vectors")
        for x in self.basis:
            if not x.is_imaginary():
                raise ValueError("basis vectors must be imaginary")
        if any(polar(x, y) for x in self.basis for y in self.basis):
            raise ValueError("plane is not isotropic")
        if rank([to_im(x) for x in self.basis]) != 3:
            raise ValueError("basis vectors are dependent")

    def coords(self) -> list[list]:
        return [to_im(x) for x in self.basis]

    def contains(self, x: ZornOctonion) -> bool:
        return x.is_imaginary() and in_span(to_im(x), self.coords())

    def transformed(self, m: Sequence[Sequence]) -> "IsotropicPlane":
        """Image under a 7x7 matrix acting on Im O' coordinates."""
        out = []
        for x in self.basis:
            c = to_im(x)
            out.append(from_im([sum((m[i][j] * c[j] for j in range(7)), Fraction(0)) for i in range(7)]))
        return IsotropicPlane(out)

    def rebased(self, t: Sequence[Sequence]) -> "IsotropicPlane":
        b = self.basis
        return IsotropicPlane([b[0].scale(r[0]) + b[1].scale(r[1]) + b[2].scale(r[2]) for r in t])


@dataclass
class PlaneClass:
    tag: str                 # "Closed" or "Open"
    theta: Fraction
    products_closed: bool    # B.B inside B
    z: ZornOctonion | None = None
    kernel_span: list | None = None


def _two_sided_kernel(z: ZornOctonion) -> list[list]:
    """Im O' elements x with xz = zx = 0."""
    e = im_basis()
    rows = []
    for side in (lambda x: x * z, lambda x: z * x):
        cols = [side(x).to_vector() for x in e]
        rows += [[cols[j][i] for j in range(7)] for i in range(8)]
    return kernel(rows, 7)


def classify_isotropic_plane(B: IsotropicPlane) -> PlaneClass:
    x, y, z = B.basis
    t = theta(x, y, z)
    prods = [p * q for p in B.basis for q in B.basis]
    closed_mult = all(B.contains(p) for p in prods)
    if t:
        return PlaneClass("Open", t, closed_mult)
    nz = next((p for p in prods if not p.is_zero()), None)
    ker = _two_sided_kernel(nz) if nz is not None else None
    return PlaneClass("Closed", t, closed_mult, nz, ker)


def canonical_closed_plane() -> IsotropicPlane:
    z = (Fraction(0),) * 3
    return IsotropicPlane([
        ZornOctonion(Fraction(0), _unit(0), z, Fraction(0)),
        ZornOctonion(Fraction(0), z, _unit(1), Fraction(0)),
        ZornOctonion(Fraction(0), z, _unit(2), Fraction(0)),
    ])


# The relation table for an octonionic triple holds exactly when
# 2 N(xy, z) = -1 with N polarized as above. The pairing used in the table
# is therefore lam(x, y, z) = -2 N(xy, z), which makes lam(x, y, z) = 1.
TRIPLE_SCALE = Fraction(-2)
TRIPLE_THETA = 1 / TRIPLE_SCALE


def lam(x, y, z):
    return TRIPLE_SCALE * theta(x, y, z)


def standard_triple() -> tuple[ZornOctonion, ZornOctonion, ZornOctonion]:
    """x = (0,e1,0,0), y = (0,e2,0,0), z = (0,-e3,0,0): lam(x, y, z) = 1."""
    z3 = (Fraction(0),) * 3
    x = ZornOctonion(Fraction(0), _unit(0), z3, Fraction(0))
    y = ZornOctonion(Fraction(0), _unit(1), z3, Fraction(0))
    zz = ZornOctonion(Fraction(0), tuple(-c for c in _unit(2)), z3, Fraction(0))
    return x, y, zz


def find_triple() -> tuple[ZornOctonion, ZornOctonion, ZornOctonion]:
    """Exact search over elements with one +-1 entry in an Im O' slot."""
    simple = [from_im([s * int(i == j) for j in range(7)]) for i in range(7) for s in (1, -1)]
    for x, y, z in product(simple, repeat=3):
        try:
            IsotropicPlane([x, y, z])
        except ValueError:
            continue
        if lam(x, y, z) == 1:
            return x, y, z
    raise RuntimeError("no triple found")


def triple_table_check(x: ZornOctonion, y: ZornOctonion, z: ZornOctonion) -> Report:
    rep = Report("octonionic triple")
    IsotropicPlane([x, y, z])
    if lam(x, y, z) != 1:
        raise ValueError("need lam(x, y, z) = -2 N(xy, z) = 1")
    xy, yz, zx = x * y, y * z, z * x
    a = (yz) * x - x * (yz)
    b = xy * yz
    rep.data.update(xy=xy, yz=yz, zx=zx, a=a, b=b)
    eq = lambda p, q: (p - q).is_zero()
    rep.record("squares of x, y, z, xy, yz, zx vanish",
               all((p * p).is_zero() for p in (x, y, z, xy, yz, zx)))
    rep.record("x(xy), x(zx), y(yz), y(xy), z(zx), z(yz) vanish",
               all((p * q).is_zero() for p, q in ((x, xy), (x, zx), (y, yz), (y, xy), (z, zx), (z, yz))))
    rep.record("xy orthogonal to x, y (cyclic)",
               all(polar(p, u) == 0 for p, us in ((xy, (x, y)), (yz, (y, z)), (zx, (z, x))) for u in us))
    rep.record("lam(yz, zx, xy) = -1", lam(yz, zx, xy) == -1, lam(yz, zx, xy))
    nb = TRIPLE_SCALE * polar(b, zx)
    rep.record("N(b, zx) = -1 for b = (xy)(yz)", nb == -1, nb)
    rep.record("(xy)(yz) = -y", eq(b, -y), b)
    rep.record("(yz)(zx) = -z", eq(yz * zx, -z), yz * zx)
    rep.record("(zx)(xy) = -x", eq(zx * xy, -x), zx * xy)
    rep.record("a imaginary", eq(a.conjugate(), -a))
    rep.record("a = (xy)z - z(xy) = (zx)y - y(zx)", eq(a, xy * z - z * xy) and eq(a, zx * y - y * zx))
    rep.record("xa = x = -ax (and y, z)", all(eq(u * a, u) and eq(a * u, -u) for u in (x, y, z)))
    rep.record("a c = c = -c a for c in yz, zx, xy",
               all(eq(a * c, c) and eq(c * a, -c) for c in (yz, zx, xy)))
    rep.record("a a = 1", eq(a * a, ONE), a * a)
    span8 = [ONE, x, y, z, xy, yz, zx, a]
    rep.record("1, x, y, z, xy, yz, zx, a independent", rank([e.to_vector() for e in span8]) == 8)
    return rep


def random_basis_change(rng: random.Random, k: int = 3) -> list[list[Fraction]]:
    while True:
        t = [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(k)] for _ in range(k)]
        if rank(t) == k:
            return t


def _exp_nilpotent(m: dict, t: Fraction, n: int) -> list[list[Fraction]]:
    out = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    term = [row[:] for row in out]
    k = 1
    while True:
        nxt = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for (p, q), v in m.items():
                if term[i][p]:
                    nxt[i][q] += term[i][p] * v * t / k
        if not any(c for r in nxt for c in r):
            return out
        if k > n:
            raise ValueError("matrix is not nilpotent")
        out = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(out, nxt)]
        term = nxt
        k += 1


def _is_nilpotent(m: dict, n: int) -> bool:
    try:
        _exp_nilpotent(m, Fraction(1), n)
    except ValueError:
        return False
    return True


@lru_cache(maxsize=None)
def _im_so() -> MatrixLieAlgebra:
    return so_of_form(im_gram())


@lru_cache(maxsize=None)
def _g2_mats() -> tuple:
    return tuple(stabilizer_algebra(theta_tensor(), _im_so()).matrices())


def random_group_element(mats: Sequence[dict], rng: random.Random, steps: int = 4, n: int = 7):
    """Product of exponentials of nilpotent generators with random rational times."""
    nil = [m for m in mats if _is_nilpotent(m, n)]
    if not nil:
        raise ValueError("no nilpotent generators")
    g = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        e = _exp_nilpotent(rng.choice(nil), Fraction(rng.randint(-3, 3), rng.randint(1, 2)), n)
        g = [[sum((e[i][k] * g[k][j] for k in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]
    return g


def random_plane(rng: random.Random, group: str = "so") -> IsotropicPlane:
    """Translate of a standard plane by a random element of SO(4,3) or G2'.

    group "so": translate of the closed plane (generically open);
    group "g2-closed" / "g2-open": G2' translates of the closed plane or of the triple plane.
    """
    if group == "so":
        g = random_group_element(_im_so().mats, rng)
        start = canonical_closed_plane()
    else:
        g = random_group_element(_g2_mats(), rng)
        start = canonical_closed_plane() if group == "g2-closed" else IsotropicPlane(list(standard_triple()))
    return start.transformed(g).rebased(random_basis_change(rng))


# ---------------------------------------------------------------------------
# stabilizers


@dataclass
class StabilizerAlgebra:
    ambient: MatrixLieAlgebra
    generators: list[list[Fraction]]    # coordinates in the ambient basis

    @property
    def dim(self) -> int:
        return len(self.generators)

    def matrices(self) -> list[dict]:
        return [self.ambient.matrix_sparse(g) for g in self.generators]

    def closed(self) -> bool:
        gens = self.generators
        for i, j in combinations(range(len(gens)), 2):
            if not in_span(self.ambient.bracket(gens[i], gens[j]), gens):
                return False
        return True


def _act_on_tensor(m: dict, tensor: dict, degree: int) -> dict:
    """(m . T)(x1..xk) = -sum_j T(.., m x_j, ..) as a dense-keyed dict."""
    # m x_j: T(.., e_p, ..) * m[p][q] contributes to index q in slot j
    out: dict = {}
    by_row: dict[int, list] = {}
    for (p, q), v in m.items():
        by_row.setdefault(p, []).append((q, v))
    for idx, t in tensor.items():
        for slot in range(degree):
            for q, v in by_row.get(idx[slot], ()):
                key = idx[:slot] + (q,) + idx[slot + 1:]
                s = out.get(key, 0) - t * v
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
    return out


def stabilizer_algebra(tensor: dict, ambient: MatrixLieAlgebra, degree: int | None = None) -> StabilizerAlgebra:
    """Basis of {m in ambient: m . tensor = 0}; tensor is a dict index-tuple -> value."""
    if degree is None:
        degree = len(next(iter(tensor)))
    cols = [_act_on_tensor(m, tensor, degree) for m in ambient.mats]
    keys = sorted({k for c in cols for k in c})
    rows = [[c.get(k, Fraction(0)) for c in cols] for k in keys]
    ker = kernel(rows, len(ambient.mats)) if rows else [
        [Fraction(int(i == j)) for j in range(ambient.dim)] for i in range(ambient.dim)]
    return StabilizerAlgebra(ambient, ker)


# ---------------------------------------------------------------------------
# the graded picture of g2' inside so(4,3)


def _im_frame(x, y, z, sign):
    """R^7 with metric J -> Im O': top -> x, y, z; bottom -> s(yz, zx, xy); middle -> a."""
    a = (y * z) * x - x * (y * z)
    if sign * polar(a, a) != 1:
        raise ValueError("middle vector is not a unit vector")
    s = 1 / (sign * polar(x, y * z))
    top = [x, y, z]
    bottom = [(y * z).scale(s), (z * x).scale(s), (x * y).scale(s)]
    return top + [a] + bottom


def g2_graded_decomposition(B: IsotropicPlane) -> Report:
    rep = Report("g2' graded decomposition")
    cls = classify_isotropic_plane(B)
    if cls.tag != "Open":
        raise ValueError("graded decomposition needs a plane in an open orbit")
    x, y, z = B.basis
    z = z.scale(TRIPLE_THETA / theta(x, y, z))
    sign = Fraction(-1)
    frame = _im_frame(x, y, z, sign)
    gram = [[sign * polar(p, q) for q in frame] for p in frame]
    n = 3
    J = [[Fraction(0)] * 7 for _ in range(7)]
    for i in range(n):
        J[i][n + 1 + i] = J[n + 1 + i][i] = Fraction(1)
    J[n][n] = Fraction(1)
    rep.record("frame is an isometry R^7(J) -> (Im O', -N)", gram == J, gram)
    T = {}
    for i, j, k in product(range(7), repeat=3):
        v = theta(frame[i], frame[j], frame[k])
        if v:
            T[(i, j, k)] = v
    g = build_so(3)
    st = stabilizer_algebra(T, g, 3)
    rep.data["dim"] = st.dim
    rep.record("dim g2' = 14", st.dim == 14, st.dim)
    rep.record("g2' closed under bracket", st.closed())
    gens = st.generators
    minus = g.minus_indices
    proj_minus = [[v[i] for i in minus] for v in gens]
    rk = rank(proj_minus)
    rep.record("projection to g_- surjective", rk == len(minus), rk)
    ker = kernel(_transpose(proj_minus), len(gens)) if gens else []
    kvecs = [[sum((c * gv[i] for c, gv in zip(kv, gens)), Fraction(0)) for i in range(g.dim)] for kv in ker]
    rep.data["kernel_dim"] = len(kvecs)
    pure0 = all(all(v[i] == 0 for i in range(g.dim) if g.grades[i] != 0) for v in kvecs)
    rep.record("g2' cap p = g2' cap g_0 of dim 8", len(kvecs) == 8 and pure0, len(kvecs))
    # pure negative elements
    pos = [i for i in range(g.dim) if g.grades[i] >= 0]
    neg_only = kernel(_transpose([[v[i] for i in pos] for v in gens]), len(gens)) if gens else []
    rep.record("no element of pure negative grade", not neg_only, len(neg_only))
    # the graph map g_- -> g_+ is well defined; check block structure
    blocks = {}
    for gm, gp in ((-2, 1), (-1, 2), (-2, 2), (-1, 1)):
        src = g.grade_indices(gm)
        dst = g.grade_indices(gp)
        mat = []
        for s in src:
            target = [Fraction(int(i == s)) for i in minus]
            coef = solve(_transpose(proj_minus), target)
            elt = [sum((c * gv[i] for c, gv in zip(coef, gens)), Fraction(0)) for i in range(g.dim)]
            mat.append([elt[d] for d in dst])
        blocks[(gm, gp)] = mat
    rep.data["graph_blocks"] = blocks
    rep.record("g_-2 -> g_1 invertible", rank(blocks[(-2, 1)]) == 3)
    rep.record("g_-1 -> g_2 invertible", rank(blocks[(-1, 2)]) == 3)
    rep.record("no cross terms g_-2 -> g_2, g_-1 -> g_1",
               not any(c for r in blocks[(-2, 2)] for c in r) and not any(c for r in blocks[(-1, 1)] for c in r))
    return rep


def _transpose(m):
    return [list(r) for r in zip(*m)] if m else []


# ---------------------------------------------------------------------------
# SL(3)/T^2


def sl3_example_check() -> Report:
    rep = Report("sl3 example")

    def E(i, j):
        return {(i, j): Fraction(1)}

    H = [E(0, 1), E(1, 2), E(2, 0)]
    T2 = [{(0, 0): Fraction(1), (1, 1): Fraction(-1)}, {(1, 1): Fraction(1), (2, 2): Fraction(-1)}]
    vec = lambda m: [m.get((i, j), Fraction(0)) for i in range(3) for j in range(3)]
    Hv = [vec(h) for h in H]
    rep.record("{H, t2} in H", all(in_span(vec(commutator(t, h)), Hv) for t in T2 for h in H))
    HH = span_basis([vec(commutator(a, b)) for a, b in combinations(H, 2)], 9)
    Ht = [vec({(j, i): v for (i, j), v in h.items()}) for h in H]
    rep.record("dim {H, H} = 3", len(HH) == 3, len(HH))
    rep.record("{H, H} = H^t", rank(HH + Ht) == 3 and len(HH) == 3)
    rep.record("{H, H} cap H = 0", not subspace_intersection(HH, Hv))
    return rep
