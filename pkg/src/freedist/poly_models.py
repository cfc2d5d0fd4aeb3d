"""Polynomial vector fields and the coordinate models of free distributions.

Coordinates are named strings; a ``Poly`` lives in a fixed ordered tuple of
coordinate names and stores a sparse map exponent-tuple -> Fraction.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .graded_lie import GradedLieAlgebra, build_so, _axpy
from .rational_linalg import as_scalar, rank, signature
from .report import Report

__all__ = [
    "CoordinateMismatch",
    "Poly",
    "Jet",
    "PolyVectorField",
    "ModelFrame",
    "lie_bracket",
    "standard_model",
    "nonflat_example",
    "flat_curvature",
    "normality_check",
    "twisted_product",
    "twisted_product_report",
    "commutator_table_check",
    "ConformalForm",
    "conformal_structure",
    "upsilon_shifted_frame",
    "conformal_invariance_check",
    "freeness_rank",
    "random_point",
    "frame_to_json",
    "curvature_to_json",
]


class CoordinateMismatch(ValueError):
    """Raised when objects over different coordinate systems are combined."""


def _check_coords(a, b) -> None:
    if a != b:
        raise CoordinateMismatch(f"coordinate systems differ: {a} vs {b}")


class Poly:
    """Sparse polynomial with exact coefficients."""

    __slots__ = ("coords", "terms")

    def __init__(self, coords: Sequence[str], terms: Mapping[tuple, object] | None = None):
        self.coords = tuple(coords)
        nv = len(self.coords)
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(mono)
            if len(mono) != nv or any(e < 0 for e in mono):
                raise ValueError(f"bad monomial {mono}")
            c = as_scalar(c)
            if c:
                clean[mono] = clean.get(mono, 0) + c
                if not clean[mono]:
                    del clean[mono]
        self.terms = clean

    # constructors
    @classmethod
    def _raw(cls, coords: tuple, terms: dict) -> "Poly":
        # trusted: exponents valid, no zero coefficients
        p = object.__new__(cls)
        p.coords = coords
        p.terms = terms
        return p

    @classmethod
    def zero(cls, coords) -> "Poly":
        return cls(coords)

    @classmethod
    def const(cls, coords, c) -> "Poly":
        return cls(coords, {(0,) * len(tuple(coords)): c})

    @classmethod
    def var(cls, coords, name: str) -> "Poly":
        coords = tuple(coords)
        e = [0] * len(coords)
        e[coords.index(name)] = 1
        return cls(coords, {tuple(e): 1})

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            _check_coords(self.coords, other.coords)
            return other
        return Poly.const(self.coords, other)

    # arithmetic
    def __add__(self, other):
        other = self._lift(other)
        t = dict(self.terms)
        _axpy(t, 1, other.terms)
        return Poly._raw(self.coords, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.coords, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        return self.mul_trunc(other)

    def mul_trunc(self, other, deg: int | None = None) -> "Poly":
        """Product, dropping monomials of total degree above ``deg``."""
        if not isinstance(other, Poly):
            c = as_scalar(other)
            if not c:
                return Poly._raw(self.coords, {})
            t = {m: c * v for m, v in self.terms.items()}
            if deg is not None:
                t = {m: v for m, v in t.items() if sum(m) <= deg}
            return Poly._raw(self.coords, t)
        _check_coords(self.coords, other.coords)
        out: dict = {}
        if deg is None:
            deg = 1 << 30
        b = [(m2, c2, sum(m2)) for m2, c2 in other.terms.items()]
        for m1, c1 in self.terms.items():
            d1 = sum(m1)
            for m2, c2, d2 in b:
                if d1 + d2 > deg:
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Poly._raw(self.coords, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly.const(self.coords, 1)
        for _ in range(k):
            out = out * self
        return out

    def diff(self, name: str) -> "Poly":
        i = self.coords.index(name)
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                e = list(m)
                e[i] -= 1
                out[tuple(e)] = c * m[i]
        return Poly(self.coords, out)

    def evaluate(self, point: Mapping[str, object] | Sequence) -> Fraction:
        if isinstance(point, Mapping):
            vals = [as_scalar(point.get(c, 0)) for c in self.coords]
        else:
            vals = [as_scalar(v) for v in point]
        total = Fraction(0)
        for m, c in self.terms.items():
            term = c
            for v, e in zip(vals, m):
                if e:
                    term = term * v ** e
            total += term
        return total

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def truncate(self, deg: int) -> "Poly":
        return Poly._raw(self.coords, {m: c for m, c in self.terms.items() if sum(m) <= deg})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.coords), Fraction(0))

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coords == other.coords and self.terms == other.terms
        return self.is_constant() and self.constant_term() == as_scalar(other)

    def __hash__(self):
        return hash((self.coords, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (sum(m), m)):
            c = self.terms[m]
            mono = "*".join(
                f"{n}^{e}" if e > 1 else n for n, e in zip(self.coords, m) if e
            )
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts)

    def to_json(self) -> list:
        return [
            [list(m), c.numerator, c.denominator]
            for m, c in sorted(self.terms.items())
        ]


class Jet:
    """Truncated power series at the origin: a Poly known up to total degree ``order``."""

    __slots__ = ("poly", "order")

    def __init__(self, poly: Poly, order: int):
        self.poly = poly.truncate(order)
        self.order = order

    @classmethod
    def _raw(cls, poly: Poly, order: int) -> "Jet":
        j = object.__new__(cls)
        j.poly = poly
        j.order = order
        return j

    @property
    def coords(self):
        return self.poly.coords

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        if isinstance(other, Poly):
            return Jet(other, self.order)
        return Jet(Poly.const(self.coords, other), self.order)

    def __add__(self, other):
        o = self._lift(other)
        if o.order == self.order:
            return Jet._raw(self.poly + o.poly, self.order)
        return Jet(self.poly + o.poly, min(self.order, o.order))

    __radd__ = __add__

    def __neg__(self):
        return Jet._raw(-self.poly, self.order)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, (Jet, Poly)):
            return Jet._raw(self.poly.mul_trunc(other, self.order), self.order)
        o = self._lift(other)
        order = min(self.order, o.order)
        return Jet._raw(self.poly.mul_trunc(o.poly, order), order)

    __rmul__ = __mul__

    def value(self) -> Fraction:
        return self.poly.constant_term()

    def is_unit(self) -> bool:
        return self.value() != 0

    def inverse(self) -> "Jet":
        c = self.value()
        if not c:
            raise ZeroDivisionError("jet with zero constant term is not invertible")
        r = (self.poly - c) * (1 / c)
        out = Poly.const(self.coords, 1)
        term = Poly.const(self.coords, 1)
        for _ in range(self.order):
            term = (term * -r).truncate(self.order)
            out = out + term
        return Jet(out * (1 / c), self.order)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def derivative(self, field: "PolyVectorField") -> "Jet":
        return Jet(field.apply(self.poly), self.order - 1)

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __bool__(self):
        return not self.poly.is_zero()

    def __eq__(self, other):
        o = self._lift(other)
        order = min(self.order, o.order)
        return (self.poly - o.poly).truncate(order).is_zero()

    def __hash__(self):
        return hash((self.poly, self.order))

    def __repr__(self):
        return f"{self.poly} + O({self.order + 1})"


class PolyVectorField:
    """Vector field sum_i f_i d/dx_i with polynomial coefficients."""

    __slots__ = ("coords", "components")

    def __init__(self, coords: Sequence[str], components: Mapping[str, object] | None = None):
        self.coords = tuple(coords)
        comps = {}
        for name, f in (components or {}).items():
            if name not in self.coords:
                raise CoordinateMismatch(f"unknown coordinate {name}")
            if not isinstance(f, Poly):
                f = Poly.const(self.coords, f)
            _check_coords(self.coords, f.coords)
            if f:
                comps[name] = f
        self.components = comps

    @classmethod
    def partial(cls, coords, name: str) -> "PolyVectorField":
        return cls(coords, {name: 1})

    def __getitem__(self, name: str) -> Poly:
        return self.components.get(name, Poly.zero(self.coords))

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        _check_coords(self.coords, other.coords)
        comps = dict(self.components)
        for k, f in other.components.items():
            comps[k] = comps[k] + f if k in comps else f
        return PolyVectorField(self.coords, comps)

    def __neg__(self):
        return PolyVectorField(self.coords, {k: -f for k, f in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> "PolyVectorField":
        return PolyVectorField(self.coords, {k: g * f for k, g in self.components.items()})

    __rmul__ = scale

    def apply(self, f: Poly) -> Poly:
        _check_coords(self.coords, f.coords)
        out = Poly.zero(self.coords)
        for k, c in self.components.items():
            out = out + c * f.diff(k)
        return out

    def evaluate(self, point) -> list[Fraction]:
        return [self[c].evaluate(point) for c in self.coords]

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other):
        return (
            isinstance(other, PolyVectorField)
            and self.coords == other.coords
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.coords, frozenset(self.components.items())))

    def __repr__(self):
        if not self.components:
            return "0"
        return " + ".join(f"({f})d/d{k}" for k, f in self.components.items())

    def to_json(self) -> dict:
        return {k: f.to_json() for k, f in sorted(self.components.items())}


def lie_bracket(f: PolyVectorField, g: PolyVectorField) -> PolyVectorField:
    """[f, g]^i = f(g^i) - g(f^i)."""
    _check_coords(f.coords, g.coords)
    comps = {}
    for c in f.coords:
        v = f.apply(g[c]) - g.apply(f[c])
        if v:
            comps[c] = v
    return PolyVectorField(f.coords, comps)


# ---------------------------------------------------------------------------
# frames


class ModelFrame:
    """An ordered frame of polynomial vector fields plus its algebraic bracket.

    ``algebraic_bracket[(i, j)]`` for i < j is a dict frame-index -> Fraction.
    ``symbols[i]`` names the field as an element of the standard g_- of rank
    ``rank``: ("X", j) for the j-th distribution generator, ("U", k, l) for the
    bracket of generators k < l (0-based).
    """

    def __init__(
        self,
        coords: Sequence[str],
        fields: Sequence[PolyVectorField],
        names: Sequence[str],
        h_part: Sequence[int],
        algebraic_bracket: Mapping[tuple[int, int], Mapping[int, object]],
        symbols: Sequence[tuple] | None = None,
        rank: int | None = None,
    ):
        self.coords = tuple(coords)
        self.fields = list(fields)
        self.names = list(names)
        self.h_part = list(h_part)
        for f in self.fields:
            _check_coords(self.coords, f.coords)
        if len(self.fields) != len(self.coords):
            raise ValueError("frame size must equal the number of coordinates")
        table = {}
        for (i, j), v in algebraic_bracket.items():
            v = {k: as_scalar(c) for k, c in v.items() if c}
            if i == j:
                if v:
                    raise ValueError("algebraic bracket must vanish on the diagonal")
                continue
            if i > j:
                i, j = j, i
                v = {k: -c for k, c in v.items()}
            if (i, j) in table and table[(i, j)] != v:
                raise ValueError(f"algebraic bracket is not antisymmetric at {(i, j)}")
            if v:
                table[(i, j)] = v
        self.algebraic_bracket = table
        self.symbols = list(symbols) if symbols is not None else None
        self.rank = rank if rank is not None else len(self.h_part)
        self._order = self._pivot_order()

    def __len__(self):
        return len(self.fields)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def field(self, name: str) -> PolyVectorField:
        return self.fields[self.index(name)]

    def alg(self, i: int, j: int) -> dict:
        """{e_i, e_j} in frame coordinates."""
        if i == j:
            return {}
        if i < j:
            return dict(self.algebraic_bracket.get((i, j), {}))
        return {k: -c for k, c in self.algebraic_bracket.get((j, i), {}).items()}

    def matrix_at(self, point) -> list[list[Fraction]]:
        """Rows are the frame fields evaluated at ``point``."""
        return [f.evaluate(point) for f in self.fields]

    def independent_at(self, point) -> bool:
        return rank(self.matrix_at(point)) == len(self.fields)

    # frame coordinates by back substitution on pivots
    def _pivot_order(self) -> list[tuple[int, str]]:
        pivots = {}
        for i, f in enumerate(self.fields):
            cands = [c for c, p in f.components.items() if p == 1 and c not in pivots.values()]
            if not cands:
                return []
            # prefer a coordinate that no other field touches first
            pivots[i] = cands[0] if len(cands) == 1 else self._pick(i, cands)
        owner = {c: i for i, c in pivots.items()}
        # i must come before j when field i has a component on pivot(j)
        after = {i: set() for i in pivots}
        for i, f in enumerate(self.fields):
            for c in f.components:
                j = owner.get(c)
                if j is not None and j != i:
                    after[j].add(i)
        order, done = [], set()
        while len(order) < len(pivots):
            ready = [i for i in pivots if i not in done and after[i] <= done]
            if not ready:
                return []
            i = min(ready)
            order.append((i, pivots[i]))
            done.add(i)
        return order

    def _pick(self, i: int, cands: list[str]) -> str:
        for c in cands:
            if self.coords.index(c) == i:
                return c
        return cands[0]

    def frame_coords(self, vf: PolyVectorField) -> dict[int, Poly]:
        """Write ``vf`` as sum_k a_k e_k with polynomial a_k."""
        _check_coords(self.coords, vf.coords)
        if not self._order:
            raise ValueError("frame is not unit triangular; polynomial inversion unavailable")
        res = vf
        out = {}
        for i, c in self._order:
            a = res[c]
            if a:
                out[i] = a
                res = res - self.fields[i].scale(a)
        if not res.is_zero():
            raise ValueError(f"not expressible in the frame: residual {res}")
        return out

    def combination(self, coeffs: Mapping[int, object]) -> PolyVectorField:
        out = PolyVectorField(self.coords)
        for k, a in coeffs.items():
            out = out + self.fields[k].scale(a)
        return out

    def bracket_table(self) -> dict[tuple[int, int], dict[int, Poly]]:
        """Differential brackets [e_i, e_j], i < j, in frame coordinates."""
        table = {}
        for i, j in combinations(range(len(self.fields)), 2):
            c = self.frame_coords(lie_bracket(self.fields[i], self.fields[j]))
            if c:
                table[(i, j)] = c
        return table


def _std_coords(n: int, suffix: str = "x") -> tuple[list[str], list[str]]:
    h = [f"{suffix}{j + 1}" for j in range(n)]
    v = [f"{suffix}{k + 1}{l + 1}" for k, l in combinations(range(n), 2)]
    return h, v


def standard_model(n: int, var: str = "x", field_names: tuple[str, str] = ("X", "U")) -> ModelFrame:
    """Homogeneous model: U_kl = d/dx_kl, X_j = d/dx_j + 1/2 sum_p x_p U_pj."""
    if not isinstance(n, int) or n < 2:
        raise ValueError("standard_model needs n >= 2")
    hc, vc = _std_coords(n, var)
    coords = hc + vc
    pairs = list(combinations(range(n), 2))
    U = {}
    for (k, l), c in zip(pairs, vc):
        U[(k, l)] = PolyVectorField.partial(coords, c)
        U[(l, k)] = -U[(k, l)]
    fields, names = [], []
    for j in range(n):
        f = PolyVectorField.partial(coords, hc[j])
        for p in range(n):
            if p != j:
                f = f + U[(p, j)].scale(Poly.var(coords, hc[p]) * Fraction(1, 2))
        fields.append(f)
        names.append(f"{field_names[0]}{j + 1}")
    for k, l in pairs:
        fields.append(U[(k, l)])
        names.append(f"{field_names[1]}{k + 1}{l + 1}")
    uidx = {p: n + i for i, p in enumerate(pairs)}
    alg = {(p, j): {uidx[(p, j)]: 1} for p, j in pairs}
    symbols = [("X", j) for j in range(n)] + [("U", k, l) for k, l in pairs]
    return ModelFrame(coords, fields, names, list(range(n)), alg, symbols, n)


def nonflat_example(n: int) -> ModelFrame:
    """Replace X1, X2 of the homogeneous model by
    X1' = X1 + x12 U34 + 1/2 x2 U21 and X2' = X2 - 1/2 x1 U12."""
    if not isinstance(n, int) or n < 4:
        raise ValueError("nonflat_example needs n >= 4")
    m = standard_model(n)
    c = m.coords
    U12 = m.field("U12")
    U34 = m.field("U34")
    x1, x2, x12 = (Poly.var(c, s) for s in ("x1", "x2", "x12"))
    fields = list(m.fields)
    fields[0] = fields[0] + U34.scale(x12) - U12.scale(x2 * Fraction(1, 2))
    fields[1] = fields[1] - U12.scale(x1 * Fraction(1, 2))
    names = list(m.names)
    names[0], names[1] = "X1'", "X2'"
    return ModelFrame(c, fields, names, m.h_part, m.algebraic_bracket, m.symbols, n)


def freeness_rank(frame: ModelFrame, point) -> int:
    """Rank of Lambda^2 H -> T/H at ``point``, using the frame's non-H fields as T/H basis."""
    h = frame.h_part
    rest = [i for i in range(len(frame)) if i not in h]
    rows = []
    for a, b in combinations(h, 2):
        c = frame.frame_coords(lie_bracket(frame.fields[a], frame.fields[b]))
        rows.append([c[k].evaluate(point) if k in c else Fraction(0) for k in rest])
    return rank(rows) if rows else 0


def random_point(frame: ModelFrame, seed: int) -> dict[str, Fraction]:
    rng = random.Random(seed)
    return {c: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for c in frame.coords}


def flat_curvature(frame: ModelFrame) -> dict[tuple[int, int], dict[int, Poly]]:
    """kappa(e_i, e_j) = [e_i, e_j] - {e_i, e_j} for the connection killing the frame.

    With this sign the torsion of the non-flat example reads kappa(U12, X1') = U34.
    """
    diff = frame.bracket_table()
    out = {}
    for i, j in combinations(range(len(frame)), 2):
        val: dict = dict(diff.get((i, j), {}))
        for k, c in frame.alg(i, j).items():
            val[k] = val[k] - c if k in val else Poly.const(frame.coords, -c)
        val = {k: p for k, p in val.items() if p}
        if val:
            out[(i, j)] = val
    return out


def _kappa(curv, i, j) -> dict:
    if i == j:
        return {}
    if i < j:
        return curv.get((i, j), {})
    return {k: -p for k, p in curv.get((j, i), {}).items()}


class _MinusEmbedding:
    """Frame symbols -> g_- of so(r+1, r), X_j -> -w_j, U_kl -> [X_k, X_l]."""

    def __init__(self, frame: ModelFrame, alg: GradedLieAlgebra | None = None):
        if frame.symbols is None:
            raise ValueError("frame carries no g_- symbols")
        r = frame.rank
        self.alg = alg or build_so(r)
        g = self.alg
        w = {j: {g.index("w", j): Fraction(-1)} for j in range(r)}
        self.images = []
        for s in frame.symbols:
            if s[0] == "X":
                self.images.append(w[s[1]])
            else:
                self.images.append(g.bracket_sparse(w[s[1]], w[s[2]]))
        # dense inverse on g_-
        minus = g.minus_indices
        self.minus = minus
        from .rational_linalg import solve as _solve
        cols = [[img.get(m, Fraction(0)) for img in self.images] for m in minus]
        self._solve = lambda vec: _solve(cols, [vec.get(m, Fraction(0)) for m in minus])
        # the frame must realize the algebraic bracket
        for (i, j), v in frame.algebraic_bracket.items():
            lhs = g.bracket_sparse(self.images[i], self.images[j])
            rhs: dict = {}
            for k, c in v.items():
                _axpy(rhs, c, self.images[k])
            if lhs != rhs:
                raise ValueError(f"frame symbols do not realize the bracket at {(i, j)}")

    def to_frame(self, x: dict) -> dict[int, Fraction]:
        sol = self._solve(x)
        return {k: c for k, c in enumerate(sol) if c}


def normality_check(frame: ModelFrame, curvature=None, alg: GradedLieAlgebra | None = None) -> Report:
    """(d* kappa)(X) = sum_l {Z^l, kappa(Z_l, X)} - 1/2 kappa({Z^l, X}_-, Z_l).

    Z_l runs over the frame (identified with g_-), Z^l over the Killing-dual
    basis of p-perp. Values are g-vectors with polynomial coefficients.
    """
    if curvature is None:
        curvature = flat_curvature(frame)
    emb = _MinusEmbedding(frame, alg)
    g = emb.alg
    K = g.killing_matrix()
    pperp = g.pperp_indices
    nf = len(frame)
    # dual basis: Z^l in p-perp with K(Z^l, Z_m) = delta
    from .rational_linalg import solve as _solve
    rows = [[sum(K[a][b] * c for b, c in emb.images[m].items()) for a in pperp] for m in range(nf)]
    duals = []
    for l in range(nf):
        sol = _solve(rows, [Fraction(int(l == m)) for m in range(nf)])
        duals.append({pperp[a]: c for a, c in enumerate(sol) if c})
    rep = Report("normality")
    values = {}
    zero = Poly.zero(frame.coords)
    minus = set(g.minus_indices)
    for x in range(nf):
        acc: dict = {}

        def add(vec: dict, coef: Poly):
            for k, c in vec.items():
                acc[k] = acc.get(k, zero) + coef * c

        for l in range(nf):
            for k, p in _kappa(curvature, l, x).items():
                add(g.bracket_sparse(duals[l], emb.images[k]), p)
            br = g.bracket_sparse(duals[l], emb.images[x])
            yv = emb.to_frame({i: c for i, c in br.items() if i in minus})
            for y, cy in yv.items():
                for k, p in _kappa(curvature, y, l).items():
                    add(emb.images[k], p * (-Fraction(1, 2) * cy))
        acc = {k: p for k, p in acc.items() if p}
        values[frame.names[x]] = acc
        rep.record(f"d*kappa({frame.names[x]}) = 0", not acc,
                   {g.names[k]: repr(p) for k, p in acc.items()})
    rep.data["values"] = values
    return rep


# ---------------------------------------------------------------------------
# twisted product


def twisted_product(m1: ModelFrame, m2: ModelFrame, x=None, y=None, check: bool = True) -> ModelFrame:
    """Twisted product of two flat frames on M1 x M2 x (fiber H1 (x) H2).

    ``x[j]`` and ``y[k]`` are Polys on the respective factors with
    X_j . x^k = delta and Y_j . y^k = delta; the defaults are the
    coordinate functions x_j and y_k.
    """
    n1, n2 = m1.rank, m2.rank
    c1 = tuple(f"a_{c}" for c in m1.coords)
    c2 = tuple(f"b_{c}" for c in m2.coords)
    fib = tuple(f"t{j + 1}{k + 1}" for j in range(n1) for k in range(n2))
    coords = c1 + c2 + fib
    off2 = len(c1)

    def lift_poly(p: Poly, off: int) -> Poly:
        nv = len(coords)
        t = {}
        for m, c in p.terms.items():
            e = [0] * nv
            e[off:off + len(m)] = m
            t[tuple(e)] = c
        return Poly(coords, t)

    def lift(vf: PolyVectorField, src: tuple, off: int) -> PolyVectorField:
        comps = {coords[off + src.index(k)]: lift_poly(f, off) for k, f in vf.components.items()}
        return PolyVectorField(coords, comps)

    if x is None:
        x = [Poly.var(m1.coords, m1.coords[j]) for j in range(n1)]
    if y is None:
        y = [Poly.var(m2.coords, m2.coords[k]) for k in range(n2)]
    if check:
        for j in range(n1):
            for k in range(n1):
                v = m1.fields[m1.h_part[j]].apply(x[k])
                if v != Fraction(int(j == k)):
                    raise ValueError(f"X{j + 1} . x^{k + 1} = {v}, expected {int(j == k)}")
            for i in range(len(m1)):
                if i not in m1.h_part and not m1.fields[i].apply(x[j]).is_zero():
                    raise ValueError(f"{m1.names[i]} . x^{j + 1} != 0")
        for j in range(n2):
            for k in range(n2):
                v = m2.fields[m2.h_part[j]].apply(y[k])
                if v != Fraction(int(j == k)):
                    raise ValueError(f"Y{j + 1} . y^{k + 1} = {v}, expected {int(j == k)}")
    xs = [lift_poly(p, 0) for p in x]
    ys = [lift_poly(p, off2) for p in y]
    T = {(j, k): PolyVectorField.partial(coords, f"t{j + 1}{k + 1}") for j in range(n1) for k in range(n2)}
    half = Fraction(1, 2)

    fields, names, symbols = [], [], []
    for j, hj in enumerate(m1.h_part):
        f = lift(m1.fields[hj], m1.coords, 0)
        for k in range(n2):
            f = f - T[(j, k)].scale(ys[k] * half)
        fields.append(f)
        names.append(f"X~{j + 1}")
        symbols.append(("X", j))
    for k, hk in enumerate(m2.h_part):
        f = lift(m2.fields[hk], m2.coords, off2)
        for j in range(n1):
            f = f + T[(j, k)].scale(xs[j] * half)
        fields.append(f)
        names.append(f"Y~{k + 1}")
        symbols.append(("X", n1 + k))
    # old index -> new index
    map1 = {h: i for i, h in enumerate(m1.h_part)}
    map2 = {h: n1 + i for i, h in enumerate(m2.h_part)}
    for i in range(len(m1)):
        if i not in map1:
            map1[i] = len(fields)
            fields.append(lift(m1.fields[i], m1.coords, 0))
            names.append(m1.names[i])
            symbols.append(m1.symbols[i] if m1.symbols else None)
    for i in range(len(m2)):
        if i not in map2:
            map2[i] = len(fields)
            fields.append(lift(m2.fields[i], m2.coords, off2))
            names.append(m2.names[i].replace("U", "V", 1))
            s = m2.symbols[i] if m2.symbols else None
            symbols.append(("U", s[1] + n1, s[2] + n1) if s else None)
    tidx = {}
    for j in range(n1):
        for k in range(n2):
            tidx[(j, k)] = len(fields)
            fields.append(T[(j, k)])
            names.append(f"T{j + 1}{k + 1}")
            symbols.append(("U", j, n1 + k))
    alg = {}
    for (a, b), v in m1.algebraic_bracket.items():
        alg[(map1[a], map1[b])] = {map1[k]: c for k, c in v.items()}
    for (a, b), v in m2.algebraic_bracket.items():
        alg[(map2[a], map2[b])] = {map2[k]: c for k, c in v.items()}
    for j in range(n1):
        for k in range(n2):
            alg[(j, n1 + k)] = {tidx[(j, k)]: 1}
    if any(s is None for s in symbols):
        symbols = None
    frame = ModelFrame(coords, fields, names, list(range(n1 + n2)), alg, symbols, n1 + n2)
    frame.factor_maps = (map1, map2)
    return frame


def commutator_table_check(frame: ModelFrame) -> Report:
    """The differential brackets of the frame equal its algebraic bracket exactly."""
    rep = Report("commutator table")
    diff = frame.bracket_table()
    bad = {}
    for i, j in combinations(range(len(frame)), 2):
        want = {k: Poly.const(frame.coords, c) for k, c in frame.alg(i, j).items() if c}
        got = diff.get((i, j), {})
        if want != got:
            bad[f"[{frame.names[i]}, {frame.names[j]}]"] = {frame.names[k]: repr(p) for k, p in got.items()}
    rep.record("commutator table", not bad, bad)
    return rep


def twisted_product_report(m1: ModelFrame, m2: ModelFrame, x=None, y=None, seed: int = 0) -> Report:
    """Commutator relations, freeness and curvature of the twisted product."""
    prod = twisted_product(m1, m2, x, y)
    n1, n2 = m1.rank, m2.rank
    rep = Report("twisted product")
    rep.data["frame"] = prod
    diff = prod.bracket_table()
    map1, map2 = prod.factor_maps

    def got(i, j):
        return diff.get((i, j), {}) if i < j else {k: -p for k, p in diff.get((j, i), {}).items()}

    def lifted(m, mp, a, b):
        return {mp[k]: Poly.const(prod.coords, c) for k, c in m.alg(a, b).items()}

    ok1 = all(got(map1[a], map1[b]) == lifted(m1, map1, a, b)
              for a, b in combinations(m1.h_part, 2))
    ok2 = all(got(map2[a], map2[b]) == lifted(m2, map2, a, b)
              for a, b in combinations(m2.h_part, 2))
    t = {(j, k): prod.index(f"T{j + 1}{k + 1}") for j in range(n1) for k in range(n2)}
    ok3 = all(got(j, n1 + k) == {t[(j, k)]: Poly.const(prod.coords, 1)} for j in range(n1) for k in range(n2))
    rep.record("[X~j, X~k] = [Xj, Xk]", ok1)
    rep.record("[Y~j, Y~k] = [Yj, Yk]", ok2)
    rep.record("[X~j, Y~k] = Tjk", ok3)
    zero = {c: Fraction(0) for c in prod.coords}
    r0 = freeness_rank(prod, zero)
    r1 = freeness_rank(prod, random_point(prod, seed))
    want = (n1 + n2) * (n1 + n2 - 1) // 2
    rep.data["freeness_rank"] = (r0, r1)
    rep.record(f"free of rank {n1 + n2}", r0 == r1 == want == len(prod) - n1 - n2, (r0, r1))
    curv = flat_curvature(prod)
    rep.record("curvature is the direct sum (zero)", not curv, curvature_to_json(prod, curv) if curv else None)
    rep.record("normal", normality_check(prod, curv).ok)
    return rep


# ---------------------------------------------------------------------------
# conformal structure for n = 3


def _perm_sign(seq) -> int:
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    s = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


class ConformalForm:
    """g sigma^{-1} on T = T_{-2} (+) H in the frame of a splitting."""

    def __init__(self, frame: ModelFrame, gram: list[list[Fraction]], sigma):
        self.frame = frame
        self.gram = gram
        self.sigma = sigma

    def __call__(self, a: Mapping[int, object], b: Mapping[int, object]) -> Fraction:
        return sum(
            (as_scalar(ca) * as_scalar(cb) * self.gram[i][j]
             for i, ca in a.items() for j, cb in b.items()),
            Fraction(0),
        )

    def signature(self) -> tuple[int, int, int]:
        return signature(self.gram)

    def in_coordinates(self) -> list[list[Poly]]:
        """Entries g(d/dx_a, d/dx_b) as polynomials."""
        fr = self.frame
        co = [fr.frame_coords(PolyVectorField.partial(fr.coords, c)) for c in fr.coords]
        zero = Poly.zero(fr.coords)
        out = []
        for a in co:
            row = []
            for b in co:
                s = zero
                for i, pa in a.items():
                    for j, pb in b.items():
                        if self.gram[i][j]:
                            s = s + pa * pb * self.gram[i][j]
                row.append(s)
            out.append(row)
        return out


def conformal_structure(frame: ModelFrame, sigma=1) -> ConformalForm:
    """Pair T_{-2} = Lambda^2 H with H into Lambda^3 H, relative to sigma X1^X2^X3.

    The identification T_{-2} -> Lambda^2 H is read off the algebraic bracket,
    so it only uses U modulo H.
    """
    if frame.rank != 3 or len(frame.h_part) != 3:
        raise ValueError("conformal_structure needs n = 3")
    sigma = as_scalar(sigma)
    if not sigma:
        raise ValueError("sigma must be nonzero")
    h = frame.h_part
    nf = len(frame)
    rest = [i for i in range(nf) if i not in h]
    # e_r = sum over k<l of c_r^{kl} {X_k, X_l}
    bra = []
    for a, b in combinations(range(3), 2):
        v = frame.alg(h[a], h[b])
        bra.append([v.get(r, Fraction(0)) for r in rest])
    from .rational_linalg import solve as _solve
    cols = [[bra[p][q] for p in range(3)] for q in range(len(rest))]
    wedge = {}
    for q, r in enumerate(rest):
        e = [Fraction(int(q == s)) for s in range(len(rest))]
        wedge[r] = _solve(cols, e)
    gram = [[Fraction(0)] * nf for _ in range(nf)]
    pairs = list(combinations(range(3), 2))
    for r in rest:
        for j in range(3):
            val = sum(
                (c * _perm_sign((k, l, j)) for c, (k, l) in zip(wedge[r], pairs)),
                Fraction(0),
            ) / sigma
            gram[r][h[j]] = gram[h[j]][r] = val
    return ConformalForm(frame, gram, sigma)


def upsilon_shifted_frame(frame: ModelFrame, ups: Sequence) -> tuple[ModelFrame, list[list[Fraction]]]:
    """U_kl -> U_kl + Ups(X_k) X_l - Ups(X_l) X_k on the grade -2 fields.

    Returns the new frame (same algebraic bracket) and the matrix P with
    new_e_i = sum_j P[i][j] e_j.
    """
    ups = [as_scalar(u) for u in ups]
    nf = len(frame)
    h = frame.h_part
    P = [[Fraction(int(i == j)) for j in range(nf)] for i in range(nf)]
    fields = list(frame.fields)
    for i, s in enumerate(frame.symbols or []):
        if s and s[0] == "U":
            k, l = s[1], s[2]
            P[i][h[l]] += ups[k]
            P[i][h[k]] -= ups[l]
            fields[i] = (frame.fields[i] + frame.fields[h[l]].scale(ups[k])
                         - frame.fields[h[k]].scale(ups[l]))
    new = ModelFrame.__new__(ModelFrame)
    new.__dict__.update(frame.__dict__)
    new.fields = fields
    new._order = []
    return new, P


def conformal_invariance_check(frame: ModelFrame, ups: Sequence, sigma=1) -> Report:
    """Build g from the shifted splitting and compare with the original form."""
    rep = Report("conformal invariance")
    g = conformal_structure(frame, sigma)
    shifted, P = upsilon_shifted_frame(frame, ups)
    g2 = conformal_structure(shifted, sigma)
    G, nf = g.gram, len(frame)
    # g2 is expressed in the new basis; pull the old form back to it
    pulled = [[sum((P[i][a] * G[a][b] * P[j][b] for a in range(nf) for b in range(nf)), Fraction(0))
               for j in range(nf)] for i in range(nf)]
    rep.record("g' = g", pulled == g2.gram, {"pulled": pulled, "new": g2.gram})
    h = frame.h_part
    rest = [i for i in range(nf) if i not in h]
    bad = []
    for r in rest:
        for y in h:
            for x in h:
                lhs = g({r: 1, y: 1}, {x: 1})
                if lhs != g({r: 1}, {x: 1}):
                    bad.append((frame.names[r], frame.names[y], frame.names[x]))
    rep.record("g(U+Y, X) = g(U, X)", not bad, bad)
    rep.record("signature (3,3)", g.signature() == (3, 3, 0), g.signature())
    return rep


# ---------------------------------------------------------------------------
# serialization


def frame_to_json(frame: ModelFrame) -> dict:
    return {
        "coords": list(frame.coords),
        "names": list(frame.names),
        "h_part": list(frame.h_part),
        "fields": [f.to_json() for f in frame.fields],
        "algebraic_bracket": [
            [i, j, [[k, c.numerator, c.denominator] for k, c in sorted(v.items())]]
            for (i, j), v in sorted(frame.algebraic_bracket.items())
        ],
    }


def curvature_to_json(frame: ModelFrame, curv) -> list:
    return [
        [frame.names[i], frame.names[j], {frame.names[k]: p.to_json() for k, p in sorted(v.items())}]
        for (i, j), v in sorted(curv.items())
    ]
