from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from freedist.poly_models import (
    CoordinateMismatch,
    Poly,
    PolyVectorField,
    commutator_table_check,
    conformal_invariance_check,
    conformal_structure,
    curvature_to_json,
    flat_curvature,
    freeness_rank,
    lie_bracket,
    nonflat_example,
    normality_check,
    random_point,
    standard_model,
    twisted_product,
    twisted_product_report,
)

COORDS = ("a", "b", "c")
SYMS = sympy.symbols(COORDS)
coef = st.fractions(min_value=-4, max_value=4, max_denominator=3)
mono = st.tuples(*[st.integers(0, 2)] * 3)
polys = st.dictionaries(mono, coef, max_size=5).map(lambda t: Poly(COORDS, t))
fields = st.lists(polys, min_size=3, max_size=3).map(lambda fs: PolyVectorField(COORDS, dict(zip(COORDS, fs))))


def to_sympy(p):
    return sum((sympy.Rational(c.numerator, c.denominator) * sympy.prod([s**e for s, e in zip(SYMS, m)])
                for m, c in p.terms.items()), sympy.Integer(0))


class TestPolyRing:
    @given(polys, polys, polys)
    def test_ring_laws(self, p, q, r):
        assert (p + q) - (q + p) == Poly.zero(COORDS)
        assert p * (q + r) == p * q + p * r
        assert (p * q) * r == p * (q * r)
        assert p * q == q * p
        assert p - p == Poly.zero(COORDS)

    @given(polys, polys)
    def test_product_matches_sympy(self, p, q):
        assert sympy.expand(to_sympy(p * q) - to_sympy(p) * to_sympy(q)) == 0

    @given(polys, st.sampled_from(COORDS))
    def test_derivative_matches_sympy(self, p, v):
        assert sympy.expand(to_sympy(p.diff(v)) - sympy.diff(to_sympy(p), sympy.Symbol(v))) == 0

    @given(polys, polys, st.sampled_from(COORDS))
    def test_leibniz(self, p, q, v):
        assert (p * q).diff(v) == p.diff(v) * q + p * q.diff(v)

    @given(polys, st.lists(coef, min_size=3, max_size=3))
    def test_evaluate(self, p, pt):
        expect = to_sympy(p).subs(dict(zip(SYMS, pt)))
        assert p.evaluate(dict(zip(COORDS, pt))) == Fraction(str(expect))

    def test_coordinate_mismatch(self):
        with pytest.raises(CoordinateMismatch):
            Poly.var(("a",), "a") + Poly.var(("b",), "b")


class TestVectorFields:
    @given(fields, fields)
    def test_bracket_antisymmetric(self, f, g):
        assert (lie_bracket(f, g) + lie_bracket(g, f)).is_zero()

    @given(fields, fields, fields)
    def test_jacobi(self, f, g, h):
        j = lie_bracket(f, lie_bracket(g, h)) + lie_bracket(g, lie_bracket(h, f)) + lie_bracket(h, lie_bracket(f, g))
        assert j.is_zero()

    @given(fields, fields, polys)
    def test_bracket_as_commutator(self, f, g, p):
        assert lie_bracket(f, g).apply(p) == f.apply(g.apply(p)) - g.apply(f.apply(p))


class TestStandardModel:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_commutator_table(self, n):
        assert commutator_table_check(standard_model(n)).ok

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_flat(self, n):
        assert flat_curvature(standard_model(n)) == {}

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_normal(self, n):
        assert normality_check(standard_model(n)).ok

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_free(self, n):
        m = standard_model(n)
        assert freeness_rank(m, random_point(m, 3)) == n * (n - 1) // 2

    def test_bracket_of_generators(self):
        m = standard_model(3)
        assert (lie_bracket(m.field("X1"), m.field("X2")) - m.field("U12")).is_zero()
        assert (lie_bracket(m.field("X3"), m.field("X1")) + m.field("U13")).is_zero()

    def test_rejects_small_rank(self):
        with pytest.raises(ValueError):
            standard_model(1)
        with pytest.raises(ValueError):
            nonflat_example(3)


@pytest.fixture(scope="module")
def model():
    return nonflat_example(4)


class TestNonflat:
    def test_single_entry(self, model):
        curv = flat_curvature(model)
        assert len(curv) == 1
        (i, j), val = next(iter(curv.items()))
        assert {model.names[i], model.names[j]} == {"X1'", "U12"}
        u34 = model.index("U34")
        sign = 1 if (model.names[i], model.names[j]) == ("U12", "X1'") else -1
        assert set(val) == {u34} and val[u34] == Poly.const(model.coords, sign)

    def test_normal(self, model):
        assert normality_check(model, flat_curvature(model)).ok

    def test_table_differs(self, model):
        rep = commutator_table_check(model)
        assert not rep.ok

    def test_json(self, model):
        out = curvature_to_json(model, flat_curvature(model))
        assert out[0][0] == "X1'" and out[0][1] == "U12"

    def test_planted_entry_detected(self, model):
        curv = dict(flat_curvature(model))
        curv[(0, 1)] = {model.index("U34"): Poly.const(model.coords, 1)}
        assert not normality_check(model, curv).ok


class TestTwisted:
    def test_report(self):
        rep = twisted_product_report(standard_model(2), standard_model(2))
        assert rep.ok, rep.failures

    def test_product_dimension(self):
        p = twisted_product(standard_model(2), standard_model(2))
        assert len(p) == 10 and len(p.h_part) == 4


class TestConformal:
    def test_signature(self):
        cf = conformal_structure(standard_model(3))
        p, q, z = cf.signature()
        assert z == 0 and {p, q} == {3}

    def test_invariance(self):
        assert conformal_invariance_check(standard_model(3), [1, Fraction(-2, 3), 5]).ok
