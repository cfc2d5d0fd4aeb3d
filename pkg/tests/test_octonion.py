import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from freedist import octonion as O
from freedist.graded_lie import so_of_form
from freedist.rational_linalg import Mat, signature

q = st.fractions(min_value=-3, max_value=3, max_denominator=3)
octs = st.tuples(q, st.tuples(q, q, q), st.tuples(q, q, q), q).map(lambda t: O.ZornOctonion(*t))
ims = st.lists(q, min_size=7, max_size=7).map(O.from_im)


class TestAlgebra:
    @given(octs, octs)
    def test_alternative(self, x, y):
        assert O.alternator(x, x, y).is_zero()
        assert O.alternator(y, x, x).is_zero()

    @given(octs, octs)
    def test_composition(self, x, y):
        assert O.norm(x * y) == O.norm(x) * O.norm(y)

    @given(octs, octs)
    def test_conjugation_antiautomorphism(self, x, y):
        assert (x * y).conjugate() == y.conjugate() * x.conjugate()
        assert x * x.conjugate() == O.ONE.scale(O.norm(x))

    @given(octs, octs, octs)
    def test_moufang(self, x, y, z):
        assert (x * y) * (z * x) == x * ((y * z) * x) == (x * (y * z)) * x

    @given(ims, ims, ims)
    def test_theta_skew(self, x, y, z):
        t = O.theta(x, y, z)
        assert O.theta(y, x, z) == -t
        assert O.theta(x, z, y) == -t
        assert O.theta(y, z, x) == t

    def test_unit(self):
        for e in O.basis():
            assert O.ONE * e == e * O.ONE == e

    def test_theta_rejects_real_part(self):
        with pytest.raises(ValueError):
            O.theta(O.ONE, O.im_basis()[0], O.im_basis()[1])

    def test_literal_product_fails_identities(self):
        rep = O.symbolic_identities(O.zorn_mul_literal)
        assert not rep.ok
        assert "N(xy) = N(x) N(y)" in rep.failures

    def test_symbolic(self):
        assert O.symbolic_identities().ok

    def test_im_gram_signature(self):
        assert signature(Mat.from_rows(O.im_gram())) == (3, 4, 0)

    @given(ims)
    def test_im_roundtrip(self, x):
        assert O.from_im(O.to_im(x)) == x


class TestTriple:
    def test_search_matches_standard(self):
        assert list(O.find_triple()) == list(O.standard_triple())

    def test_table(self):
        rep = O.triple_table_check(*O.find_triple())
        assert rep.ok, rep.failures

    def test_normalization(self):
        x, y, z = O.find_triple()
        assert O.lam(x, y, z) == 1
        assert O.theta(x, y, z) == Fraction(-1, 2)

    def test_rejects_wrong_scale(self):
        x, y, z = O.find_triple()
        with pytest.raises(ValueError):
            O.triple_table_check(x, y, z.scale(2))


class TestPlanes:
    def test_canonical_closed(self):
        c = O.classify_isotropic_plane(O.canonical_closed_plane())
        assert c.tag == "Closed" and c.theta == 0 and c.products_closed

    def test_triple_open(self):
        c = O.classify_isotropic_plane(O.IsotropicPlane(list(O.find_triple())))
        assert c.tag == "Open" and c.theta != 0 and not c.products_closed

    @given(st.integers(0, 10**6))
    def test_basis_change_invariance(self, seed):
        rng = random.Random(seed)
        for plane, tag in ((O.canonical_closed_plane(), "Closed"),
                           (O.IsotropicPlane(list(O.find_triple())), "Open")):
            assert O.classify_isotropic_plane(plane.rebased(O.random_basis_change(rng))).tag == tag

    @pytest.mark.parametrize("group,tag", [("g2-closed", "Closed"), ("g2-open", "Open")])
    def test_g2_orbits(self, group, tag):
        rng = random.Random(1)
        for _ in range(5):
            assert O.classify_isotropic_plane(O.random_plane(rng, group)).tag == tag

    def test_theta_zero_iff_products_closed(self):
        rng = random.Random(2)
        for _ in range(10):
            c = O.classify_isotropic_plane(O.random_plane(rng, "so"))
            assert (c.theta == 0) == c.products_closed


class TestStabilizers:
    def test_theta(self):
        st_ = O.stabilizer_algebra(O.theta_tensor(), so_of_form(O.im_gram()))
        assert st_.dim == 14 and st_.closed()

    def test_cayley(self):
        st_ = O.stabilizer_algebra(O.cayley_form(), so_of_form(O.octonion_gram()), 4)
        assert st_.dim == 21 and st_.closed()

    def test_graded(self):
        rep = O.g2_graded_decomposition(O.IsotropicPlane(list(O.find_triple())))
        assert rep.ok, rep.failures

    def test_graded_rejects_closed(self):
        with pytest.raises(ValueError):
            O.g2_graded_decomposition(O.canonical_closed_plane())

    def test_sl3(self):
        assert O.sl3_example_check().ok
