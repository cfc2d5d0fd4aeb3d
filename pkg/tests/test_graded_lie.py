from fractions import Fraction

import pytest

from freedist.graded_lie import (
    BlockElement,
    build_so,
    grading_element,
    killing_form,
    metric_J,
    nilradical_check,
    so_of_form,
)


@pytest.fixture(scope="module", params=[2, 3, 4])
def alg(request):
    return build_so(request.param)


class TestStructure:
    def test_dimension(self, alg):
        n = alg.n
        assert alg.dim == n * (2 * n + 1)

    def test_grade_dimensions(self, alg):
        n = alg.n
        dims = {j: len(alg.grade_indices(j)) for j in range(-2, 3)}
        assert dims == {-2: n * (n - 1) // 2, -1: n, 0: n * n, 1: n, 2: n * (n - 1) // 2}

    def test_jacobi_and_antisymmetry(self, alg):
        assert alg.antisymmetry_violations() == []
        assert alg.jacobi_violations(limit=1) == []

    def test_grade_additivity(self, alg):
        assert alg.grade_additivity_violations() == []

    def test_matrices_preserve_metric(self, alg):
        J = metric_J(alg.n)
        for i in range(alg.dim):
            m = alg.matrix(alg.basis_vector(i)).to_rows()
            N = len(m)
            Jd = [[J.get((r, c), 0) for c in range(N)] for r in range(N)]
            lhs = [[sum(m[k][r] * Jd[k][c] + Jd[r][k] * m[k][c] for k in range(N)) for c in range(N)]
                   for r in range(N)]
            assert all(x == 0 for row in lhs for x in row)

    def test_grading_element(self, alg):
        e = grading_element(alg)
        assert all(e.eigenvalue_on(i) == alg.grades[i] for i in range(alg.dim))

    def test_killing_is_multiple_of_trace(self, alg):
        # Killing form of so(N) is (N - 2) tr(XY)
        n = alg.n
        for i, j in [(0, 0), (0, alg.dim - 1), (1, alg.dim - 2)]:
            x, y = alg.basis_vector(i), alg.basis_vector(j)
            X, Y = alg.matrix(x).to_rows(), alg.matrix(y).to_rows()
            tr = sum(X[a][b] * Y[b][a] for a in range(len(X)) for b in range(len(X)))
            assert killing_form(alg, x, y) == (2 * n - 1) * tr


class TestNilradical:
    def test_all_checks(self, alg):
        rep = nilradical_check(alg)
        assert rep.ok, rep.failures

    def test_codimension(self, alg):
        n = alg.n
        assert alg.dim - len(alg.p_indices) == n * (n + 1) // 2
        assert len(alg.minus_indices) == n * (n + 1) // 2


class TestBlocks:
    def test_block_roundtrip(self):
        g = build_so(3)
        for i in range(g.dim):
            be = g.block_view(g.basis_vector(i))
            assert g.element(be) == g.basis_vector(i)
            assert BlockElement.from_matrix(3, be.to_matrix()).to_matrix() == be.to_matrix()

    def test_so_of_form_matches(self):
        J = [[0, 0, 1], [0, 1, 0], [1, 0, 0]]
        assert so_of_form(J).dim == 3
        assert so_of_form([[Fraction(1) if i == j else 0 for j in range(4)] for i in range(4)]).dim == 6
