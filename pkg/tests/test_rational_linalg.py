from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from freedist.rational_linalg import (
    GaussScalar,
    InconsistentSystem,
    Mat,
    determinant,
    in_span,
    inverse,
    kernel,
    rank,
    signature,
    solve,
    span_basis,
    subspace_intersection,
    subspace_sum,
)

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


def square(max_n=4):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n))


def _sym(rows):
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows])


class TestAgainstSympy:
    @given(matrices())
    def test_rank(self, rows):
        assert rank(Mat.from_rows(rows)) == _sym(rows).rank()

    @given(matrices())
    def test_kernel_is_kernel_of_right_dimension(self, rows):
        ncols = len(rows[0])
        ker = kernel(Mat.from_rows(rows), ncols)
        assert len(ker) == ncols - _sym(rows).rank()
        for v in ker:
            assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)

    @given(square())
    def test_determinant(self, rows):
        assert determinant(Mat.from_rows(rows)) == Fraction(str(_sym(rows).det()))

    @given(square())
    def test_inverse(self, rows):
        m = Mat.from_rows(rows)
        if determinant(m) == 0:
            with pytest.raises(ZeroDivisionError):
                inverse(m)
            return
        inv = inverse(m)
        n = len(rows)
        prod = [[sum(rows[i][k] * inv[k, j] for k in range(n)) for j in range(n)] for i in range(n)]
        assert prod == [[int(i == j) for j in range(n)] for i in range(n)]


class TestSolve:
    @given(matrices(), st.data())
    def test_solution_of_consistent_system(self, rows, data):
        x = data.draw(st.lists(small, min_size=len(rows[0]), max_size=len(rows[0])))
        b = [sum(a * c for a, c in zip(r, x)) for r in rows]
        y = solve(Mat.from_rows(rows), b)
        assert [sum(a * c for a, c in zip(r, y)) for r in rows] == b

    def test_inconsistent(self):
        with pytest.raises(InconsistentSystem):
            solve(Mat.from_rows([[1, 1], [2, 2]]), [1, 3])


class TestSubspaces:
    @given(matrices(4, 4), matrices(4, 4))
    def test_dimension_formula(self, a, b):
        if len(a[0]) != len(b[0]):
            return
        s = subspace_sum(a, b)
        i = subspace_intersection(a, b)
        assert len(s) + len(i) == len(span_basis(a)) + len(span_basis(b))
        for v in i:
            assert in_span(v, a) and in_span(v, b)


class TestSignature:
    def test_split_forms(self):
        J = [[0, 0, 1], [0, 1, 0], [1, 0, 0]]
        assert signature(Mat.from_rows(J)) == (2, 1, 0)
        assert signature(Mat.from_rows([[1, 0], [0, 0]])) == (1, 0, 1)

    @given(square(3))
    def test_congruence_invariant(self, rows):
        n = len(rows)
        sym = [[rows[i][j] + rows[j][i] for j in range(n)] for i in range(n)]
        ev = _sym(sym).eigenvals()
        pos = sum(m for e, m in ev.items() if sympy.re(sympy.N(e)) > 1e-12)
        neg = sum(m for e, m in ev.items() if sympy.re(sympy.N(e)) < -1e-12)
        p, q, z = signature(Mat.from_rows(sym))
        assert (p, q, z) == (pos, neg, n - pos - neg)


class TestGauss:
    def test_field_ops(self):
        i = GaussScalar(0, 1)
        assert i * i == -1
        assert (GaussScalar(1, 2) * GaussScalar(1, 2).conjugate()) == 5
        assert GaussScalar(3, 4).norm() == 25
