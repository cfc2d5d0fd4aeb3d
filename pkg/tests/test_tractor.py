import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from freedist.rational_linalg import Mat, signature
from freedist.tractor import (
    TractorSection,
    WeylShift,
    closed_form_normalization,
    compose_shifts,
    gram_matrix,
    gram_of_sections,
    h_invariance_check,
    h_metric,
    mu_extraction,
    normalization_report,
    normalize_splitting_for_V,
    random_generic_V,
    shift_matrix,
    strong_defects,
    upsilon_action,
    verify_maxpref_properties,
)

q = st.fractions(min_value=-4, max_value=4, max_denominator=3)
N = 3


def sections(n=N):
    return st.lists(q, min_size=2 * n + 1, max_size=2 * n + 1).map(lambda x: TractorSection.from_vector(n, x))


def shifts(n=N):
    def build(args):
        u1, m = args
        return WeylShift(u1, [[m[i][j] - m[j][i] for j in range(n)] for i in range(n)])
    return st.tuples(st.lists(q, min_size=n, max_size=n),
                     st.lists(st.lists(q, min_size=n, max_size=n), min_size=n, max_size=n)).map(build)


class TestMetric:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_signature(self, n):
        assert signature(Mat.from_rows(gram_matrix(n))) == (n + 1, n, 0)

    @given(sections(), sections(), shifts())
    def test_invariance(self, s, t, u):
        assert h_metric(upsilon_action(s, u), upsilon_action(t, u)) == h_metric(s, t)

    @given(sections(), shifts())
    def test_action_is_exponential(self, s, u):
        m = shift_matrix(u)
        x = s.to_vector()
        y = [sum(m[i][j] * x[j] for j in range(len(x))) for i in range(len(x))]
        assert upsilon_action(s, u).to_vector() == y

    @given(sections(), shifts(), shifts())
    def test_composition(self, s, u, v):
        assert upsilon_action(upsilon_action(s, u), v) == upsilon_action(s, compose_shifts(u, v))

    def test_rejects_non_skew(self):
        with pytest.raises(ValueError):
            WeylShift([0, 0], [[0, 1], [1, 0]])

    @pytest.mark.parametrize("n", [2])
    def test_symbolic(self, n):
        assert h_invariance_check(n).ok

    @pytest.mark.parametrize("n", [3, 4])
    def test_randomized(self, n):
        assert h_invariance_check(n, random.Random(n), 5).ok


class TestNormalization:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_all_ranks(self, n):
        rng = random.Random(100 + n)
        for r in range(1, n + 1):
            rep = normalization_report(n, r, 15, rng)
            assert rep.ok, (r, rep.failures)

    @pytest.mark.parametrize("n,r,g", [(3, 2, 0), (3, 3, 1), (4, 3, 2), (4, 4, 1)])
    def test_strong(self, n, r, g):
        rep = normalization_report(n, r, 5, random.Random(7), True, g)
        assert rep.ok, rep.failures

    def test_strong_kills_isotropic_part(self):
        V = random_generic_V(3, 3, random.Random(5), g_rank=1)
        _, Vn = normalize_splitting_for_V(V, strong=True)
        assert strong_defects(Vn) == []

    @pytest.mark.parametrize("seed", range(5))
    def test_agrees_with_closed_form(self, seed):
        V = random_generic_V(3, 3, random.Random(seed))
        _, a = normalize_splitting_for_V(V)
        _, b = closed_form_normalization(V)
        assert mu_extraction(a)[0] == mu_extraction(b)[0]

    def test_mu_symmetric_part_is_h(self):
        V = random_generic_V(4, 3, random.Random(11))
        _, Vn = normalize_splitting_for_V(V)
        mu, g = mu_extraction(Vn)
        assert mu == g == gram_of_sections(Vn)

    def test_literal_stage_two_coefficient_breaks_symmetry(self):
        rng = random.Random(3)
        asym = 0
        for _ in range(5):
            V = random_generic_V(3, 3, rng)
            try:
                _, Vn = normalize_splitting_for_V(V, stage2_coefficient="literal")
            except ValueError:
                continue
            mu, _ = mu_extraction(Vn)
            asym += any(mu[i][j] != mu[j][i] for i in range(3) for j in range(3))
        assert asym > 0


class TestMaxpref:
    @pytest.mark.parametrize("n", [2, 3])
    def test_parallel_rank_n(self, n):
        V = random_generic_V(n, n, random.Random(n))
        rep = verify_maxpref_properties([s.to_vector() for s in V], n)
        assert rep.ok, rep.failures

    def test_mutation_detected(self):
        V = random_generic_V(2, 2, random.Random(2))
        rep = verify_maxpref_properties([s.to_vector() for s in V], 2, mutate=True)
        assert not rep.ok
        assert rep.data["parallel"] is False

    def test_zero_shift(self):
        s = TractorSection([1, 2], Fraction(3), [4, 5])
        assert upsilon_action(s, WeylShift.zero(2)) == s
