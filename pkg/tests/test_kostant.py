from fractions import Fraction

import pytest
import sympy

from freedist.graded_lie import build_so
from freedist.kostant import (
    chain_space,
    codifferential_columns,
    complex_report,
    compose_columns,
    differential_columns,
    homology,
)


@pytest.fixture(scope="module", params=[2, 3])
def alg(request):
    return build_so(request.param)


class TestComplex:
    def test_chain_dimensions(self, alg):
        n = alg.n
        m = n * (n + 1) // 2
        for c in range(3):
            assert chain_space(alg, c).dim == sympy.binomial(m, c) * alg.dim

    @pytest.mark.parametrize("c", [1, 2])
    def test_codifferential_squares_to_zero(self, alg, c):
        _, _, hi = codifferential_columns(alg, c + 1)
        _, _, lo = codifferential_columns(alg, c)
        assert not any(compose_columns(lo, hi))

    @pytest.mark.parametrize("c", [0, 1])
    def test_differential_squares_to_zero(self, alg, c):
        _, _, lo = differential_columns(alg, c)
        _, _, hi = differential_columns(alg, c + 1)
        assert not any(compose_columns(hi, lo))

    def test_codifferential_lowers_degree_preserves_homogeneity(self, alg):
        src, dst, cols = codifferential_columns(alg, 2)
        for h in src.homogeneities():
            for j in src.block(h):
                assert set(cols[j]) <= set(dst.block(h))


def _gram(alg, space):
    M = [alg.matrix_sparse({i: 1}) for i in range(alg.dim)]
    G = [[sum((v * M[j].get(k, 0) for k, v in M[i].items()), Fraction(0)) for j in range(alg.dim)]
         for i in range(alg.dim)]
    out = {}
    for (I, k), a in space.index.items():
        for (J, l), b in space.index.items():
            if G[k][l]:
                d = sympy.Matrix([[G[i][j] for j in J] for i in I]).det() if I else 1
                if d:
                    out[(a, b)] = Fraction(str(d)) * G[k][l]
    return out


class TestAdjointness:
    """<d x, y> = -1/(2n-1) <x, d* y> for the pairing tr(X Y^t) extended by Gram determinants."""

    @pytest.mark.parametrize("n,c", [(2, 1), (2, 2), (3, 1)])
    def test_scalar(self, n, c):
        g = build_so(n)
        src, dst, D = differential_columns(g, c)
        _, _, Ds = codifferential_columns(g, c + 1)
        G0, G1 = _gram(g, src), _gram(g, dst)
        ratios = set()
        pairs = [(x, r) for x in range(src.dim) for r in D[x]][:300]
        pairs += [(x, y) for y in range(dst.dim) for x in Ds[y]][:300]
        for x, y in pairs:
            lhs = sum(v * G1.get((r, y), 0) for r, v in D[x].items())
            rhs = sum(v * G0.get((x, r), 0) for r, v in Ds[y].items())
            assert (lhs == 0) == (rhs == 0)
            if rhs:
                ratios.add(lhs / rhs)
        assert ratios == {Fraction(-1, 2 * n - 1)}


class TestHomology:
    @pytest.mark.parametrize("n", [2, 3])
    def test_support_low_rank(self, n):
        rep = complex_report(build_so(n))
        assert rep.ok
        assert rep.data["support"] == ["(g₁∧g₂)⊗g₀"]

    def test_support_rank_four(self):
        rep = complex_report(build_so(4))
        assert rep.ok
        assert "(g₁∧g₂)⊗g₋₂" in rep.data["support"]

    def test_homogeneity_positive(self, alg):
        h = homology(alg)
        assert h.total > 0
        assert all(k > 0 for k, v in h.dims.items() if v)

    def test_h0_is_trivial_rep_free(self, alg):
        # H_0 = g / [p-perp, g] is the g0-module g_-... nonzero and graded negatively
        h = homology(alg, 0)
        assert h.total > 0
        assert all(k < 0 for k, v in h.dims.items() if v)
