from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from freedist import inclusions as I
from freedist.graded_lie import build_so, commutator

q = st.fractions(min_value=-3, max_value=3, max_denominator=2)


@pytest.fixture(scope="module")
def l2():
    return I.lambda2_rep()


@pytest.fixture(scope="module")
def su():
    return I.su22_rep()


def _combo(rep, coords):
    n = len(rep.source[0])
    return [[sum((c * s[i][j] for c, s in zip(coords, rep.source)), 0 * rep.source[0][0][0]) for j in range(n)]
            for i in range(n)]


class TestLambda2:
    def test_report(self, l2):
        rep = l2.report()
        assert rep.ok, rep.failures
        assert rep.data["signature"] == (3, 3)

    def test_wedge_pairing_signature(self):
        m = sympy.Matrix(I.wedge_pairing())
        ev = m.eigenvals()
        assert sum(k for e, k in ev.items() if e > 0) == 3
        assert sum(k for e, k in ev.items() if e < 0) == 3

    @given(st.lists(q, min_size=15, max_size=15), st.lists(q, min_size=15, max_size=15))
    def test_bracket_on_combinations(self, l2, x, y):
        X, Y = _combo(l2, x), _combo(l2, y)
        n = len(X)
        br = [[sum(X[i][k] * Y[k][j] - Y[i][k] * X[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        lhs = l2._image(l2._source_coords(br))
        assert lhs == commutator(l2._image(x), l2._image(y))

    def test_sl4_basis_traceless(self):
        basis = I.sl4_basis()
        assert len(basis) == 15
        assert all(sum(m[i][i] for i in range(4)) == 0 for m in basis)


class TestSU22:
    def test_report(self, su):
        rep = su.report()
        assert rep.ok, rep.failures
        assert rep.data["signature"] == (4, 2)

    def test_real_structure(self, su):
        assert su.notes["fixed_real_dim"] == 6
        S = I.real_structure()
        assert len(S) == 6

    def test_basis_is_skew_hermitian(self):
        H = I.HERMITIAN_22
        for X in I.su22_basis():
            # X^* H + H X = 0
            for i in range(4):
                for j in range(4):
                    s = sum(X[k][i].conjugate() * H[k][j] + H[i][k] * X[k][j] for k in range(4))
                    assert s == 0


class TestFourForm:
    def test_weight_one(self):
        rep = I.su22_four_form_check()
        assert rep.ok, rep.failures

    def test_other_weight_breaks_annihilator(self):
        rep = I.su22_four_form_check(Fraction(2))
        assert not rep.ok

    def test_kahler_square_nonzero(self):
        assert I.kahler_square()


class TestTransversality:
    def test_free(self):
        rep = I.fefferman_free_example(3)
        assert rep.ok, rep.failures
        d = rep.data["dims"]
        assert (d["ghat"], d["phat"], d["g"], d["g cap phat"], d["p"], d["fiber"]) == (28, 22, 21, 15, 15, 0)

    def test_cr(self):
        rep = I.fefferman_cr_example()
        assert rep.ok, rep.failures
        assert rep.data["pentuple"] == (21, 15, 15, 10, 9)
        assert rep.data["dims"]["fiber"] == 1

    @given(st.lists(st.lists(q, min_size=6, max_size=6), min_size=0, max_size=4),
           st.lists(st.lists(q, min_size=6, max_size=6), min_size=0, max_size=4))
    def test_dimension_identity(self, a, b):
        rep = I.fefferman_transversality(6, a, b)
        assert rep.checks["dimension identity"]
        ra = sympy.Matrix(a).rank() if a else 0
        rb = sympy.Matrix(b).rank() if b else 0
        rs = sympy.Matrix(a + b).rank() if a + b else 0
        assert rep.data["dims"]["g cap phat"] == ra + rb - rs
        assert rep.checks["transverse: g + phat = ghat"] == (rs == 6)

    def test_vector_stabilizers(self):
        alg = build_so(3)
        N = alg.N
        e = lambda k: [Fraction(int(i == k)) for i in range(N)]
        assert len(I.vector_stabilizer(alg, e(3))) == 15  # non-null: so(3,3)
        assert len(I.vector_stabilizer(alg, e(0))) == 15  # null: so(3,2) + R^5
        assert len(I.subspace_stabilizer(alg, [e(0), e(1), e(2)])) == 15
