"""Tests for formalcurves.witt module."""

import time

import pytest

from formalcurves import generators as gen
from formalcurves.artin import ArtinSpec, LaurentPoly, RingElem, laurent_substitute
from formalcurves.errors import MidNotAUnit, NotAUnit, NotInvertible, NotNilpotent, OutOfSubgroup
from formalcurves.witt import (
    NegAut,
    NormalForm,
    PosAut,
    WittAut,
    as_automorphism,
    birkhoff_factor,
    compose_aut,
    invert_aut,
    normal_power,
    normal_product,
    scale_conjugate_neg,
    scale_conjugate_pos,
)


@pytest.fixture
def spec():
    """Q[e1]/(e1^2)."""
    return ArtinSpec(1, 1)


@pytest.fixture
def e(spec):
    return RingElem.var(spec, 1)


class TestWittAut:
    """Tests for WittAut."""

    def test_absorbs_constant_correction(self, spec1, eps):
        """Test a constant term in n moves into the scaling."""
        f = WittAut(RingElem.one(spec1), LaurentPoly.constant(spec1, eps))
        assert f.c == 1 + eps
        assert f.n.is_zero()

    def test_rejects_non_unit(self, spec1, eps):
        """Test the scaling must be a unit."""
        with pytest.raises(NotAUnit):
            WittAut(eps, LaurentPoly.zero(spec1))

    def test_rejects_non_nilpotent(self, spec1):
        """Test corrections must be nilpotent."""
        with pytest.raises(NotNilpotent):
            WittAut(RingElem.one(spec1), LaurentPoly.monomial(spec1, 1))

    def test_from_laurent(self, spec1, eps):
        """Test u + e reads as c = 1, n = e u^-1."""
        f = WittAut.from_laurent(LaurentPoly.identity(spec1) + eps)
        assert f.c == 1
        assert f.n == LaurentPoly.monomial(spec1, -1, eps)
        assert f.laurent() == LaurentPoly.identity(spec1) + eps

    def test_compose_and_invert(self, spec2, rng):
        """Test f o f^-1 is the identity."""
        for _ in range(10):
            f = gen.random_witt(rng, spec2)
            assert compose_aut(f, invert_aut(f)) == WittAut.identity(spec2)
            assert compose_aut(invert_aut(f), f) == WittAut.identity(spec2)

    def test_json(self, spec1, eps):
        """Test the JSON form has c and n."""
        f = WittAut.from_laurent(LaurentPoly.identity(spec1) + eps)
        data = f.to_json()
        assert set(data) == {"c", "n"}
        assert WittAut.from_json(spec1, data) == f


class TestUnipotent:
    """Tests for NegAut and PosAut."""

    def test_trailing_zeros_trimmed(self, spec1, eps):
        """Test trailing zero coefficients are dropped."""
        d = NegAut(spec1, [eps, RingElem.zero(spec1)])
        assert d.coeffs == (eps,)
        assert NegAut(spec1, [RingElem.zero(spec1)]).is_identity()

    def test_rejects_unit_coefficient(self, spec1):
        """Test coefficients must be nilpotent."""
        with pytest.raises(NotNilpotent):
            PosAut(spec1, [RingElem.one(spec1)])

    def test_laurent_support(self, spec1, eps):
        """Test neg has negative support and pos positive."""
        assert NegAut(spec1, [eps]).laurent() == LaurentPoly(spec1, {1: 1, 0: eps})
        assert PosAut(spec1, [eps]).laurent() == LaurentPoly(spec1, {1: 1, 2: eps})

    def test_out_of_subgroup(self, spec1, eps):
        """Test reading a positive-support map as negative fails."""
        with pytest.raises(OutOfSubgroup):
            NegAut.from_laurent(PosAut(spec1, [eps]).laurent())

    def test_compose_adds_first_order(self):
        """Test (neg e1) o (neg e1) = (neg 2e1) to second order."""
        spec = ArtinSpec(1, 2)
        e = RingElem.var(spec, 1)
        d = NegAut(spec, [e])
        assert d.compose(d) == NegAut(spec, [2 * e])

    def test_inverse(self, spec2, rng):
        """Test d o d^-1 is the identity in both subgroups."""
        for _ in range(10):
            for d in (gen.random_neg(rng, spec2), gen.random_pos(rng, spec2)):
                assert d.compose(d.inverse()).is_identity()

    def test_inverse_is_cached(self, spec2, rng):
        """Test the inverse is computed once and points back."""
        d = NegAut(spec2, gen.random_nilpotents(rng, spec2, 2, density=1.0))
        assert d.inverse() is d.inverse()
        assert d.inverse().inverse() is d

    def test_compose_with_identity(self, spec2, rng):
        """Test composing with the identity returns the other factor."""
        d = gen.random_pos(rng, spec2)
        one = PosAut.identity(spec2)
        assert one.compose(d) is d
        assert d.compose(one) is d

    def test_scale_conjugate_neg(self, spec1, rng):
        """Test scale_conjugate_neg is conjugation by m_c for a unit c."""
        for _ in range(10):
            d = gen.random_neg(rng, spec1)
            c = gen.random_ring_elem(rng, spec1, "unit")
            m_c = WittAut.scaling(c)
            expected = compose_aut(compose_aut(m_c, d.as_aut()), invert_aut(m_c))
            assert scale_conjugate_neg(d, c).as_aut() == expected

    def test_scale_conjugate_pos(self, spec1, rng):
        """Test scale_conjugate_pos is conjugation by m_c^-1 for a unit c."""
        for _ in range(10):
            d = gen.random_pos(rng, spec1)
            c = gen.random_ring_elem(rng, spec1, "unit")
            m_c = WittAut.scaling(c)
            expected = compose_aut(compose_aut(invert_aut(m_c), d.as_aut()), m_c)
            assert scale_conjugate_pos(d, c).as_aut() == expected


class TestBirkhoff:
    """Tests for birkhoff_factor and as_automorphism."""

    def test_u_plus_eps(self, spec, e):
        """Test u + e factors as (neg e1, 1, id)."""
        value = birkhoff_factor(WittAut.from_laurent(LaurentPoly.identity(spec) + e))
        assert value == NormalForm(NegAut(spec, [e]), RingElem.one(spec), PosAut.identity(spec))

    def test_scaling(self, spec1, eps):
        """Test a pure scaling has trivial unipotent parts."""
        value = birkhoff_factor(WittAut.scaling(1 + eps))
        assert value == NormalForm.scalar(1 + eps)

    def test_round_trip(self, spec2, rng):
        """Test factoring then recombining gives the automorphism back."""
        for _ in range(15):
            f = gen.random_witt(rng, spec2)
            assert as_automorphism(birkhoff_factor(f)) == f

    def test_round_trip_higher_order(self, rng):
        """Test factorization over Q[e1, e2]/m^4 recovers wide automorphisms."""
        spec = ArtinSpec(2, 3)
        for _ in range(10):
            f = gen.random_witt(rng, spec, span=3)
            value = birkhoff_factor(f)
            assert as_automorphism(value) == f
            assert value.mid.reduce() == f.c.reduce()

    @pytest.mark.slow
    def test_thousand_factorizations(self, rng):
        """Test 1000 round trips over Q[e1, e2]/m^4 finish within a minute."""
        spec = ArtinSpec(2, 3)
        started = time.perf_counter()
        for _ in range(1000):
            f = gen.random_witt(rng, spec)
            assert as_automorphism(birkhoff_factor(f)) == f
        assert time.perf_counter() - started < 60

    def test_mid_not_a_unit(self, spec1, eps):
        """Test a nilpotent mid has no automorphism."""
        with pytest.raises(MidNotAUnit):
            as_automorphism(NormalForm.scalar(eps))


class TestNormalProduct:
    """Tests for the normal-form monoid."""

    def test_pos_times_neg(self, spec, e):
        """Test (id, 2, pos e)(neg e, 3, id) = (neg 2e, 6, pos 3e)."""
        a = NormalForm(NegAut.identity(spec), RingElem.scalar(spec, 2), PosAut(spec, [e]))
        b = NormalForm(NegAut(spec, [e]), RingElem.scalar(spec, 3), PosAut.identity(spec))
        assert normal_product(a, b) == NormalForm(
            NegAut(spec, [2 * e]), RingElem.scalar(spec, 6), PosAut(spec, [3 * e]))

    def test_generic_mids_multiply(self):
        """Test mids multiply in a parameter ring."""
        spec = ArtinSpec(1, 1, ("s", "t"))
        s, t = RingElem.param(spec, "s"), RingElem.param(spec, "t")
        assert normal_product(NormalForm.scalar(s), NormalForm.scalar(t)) == NormalForm.scalar(s * t)

    def test_unital(self, spec2, rng):
        """Test the identity is a two-sided unit."""
        one = NormalForm.identity(spec2)
        for _ in range(10):
            a = gen.random_normal_form(rng, spec2)
            assert normal_product(one, a) == a
            assert normal_product(a, one) == a

    def test_associative(self, spec2, rng):
        """Test (ab)c = a(bc), including non-unit mids."""
        for _ in range(10):
            a, b, c = (gen.random_normal_form(rng, spec2) for _ in range(3))
            assert normal_product(normal_product(a, b), c) == normal_product(a, normal_product(b, c))

    def test_matches_composition(self, spec2, rng):
        """Test the product of unit normal forms is composition."""
        for _ in range(10):
            f, g = gen.random_witt(rng, spec2), gen.random_witt(rng, spec2)
            product = normal_product(birkhoff_factor(f), birkhoff_factor(g))
            assert product == birkhoff_factor(compose_aut(f, g))

    def test_reduction_multiplicative(self, spec2, rng):
        """Test reduce(ab) = reduce(a) reduce(b)."""
        for _ in range(10):
            a, b = gen.random_normal_form(rng, spec2), gen.random_normal_form(rng, spec2)
            assert normal_product(a, b).reduce() == a.reduce() * b.reduce()

    def test_trivial_middle(self, spec2, rng):
        """Test an identity pos on the left or neg on the right needs no refactoring."""
        for _ in range(10):
            a = gen.random_normal_form(rng, spec2)
            b = gen.random_normal_form(rng, spec2)
            left = NormalForm(a.neg, a.mid, PosAut.identity(spec2))
            right = NormalForm(NegAut.identity(spec2), b.mid, b.pos)
            assert normal_product(left, b) == NormalForm(
                a.neg.compose(scale_conjugate_neg(b.neg, a.mid)), a.mid * b.mid, b.pos)
            assert normal_product(a, right) == NormalForm(
                a.neg, a.mid * b.mid, scale_conjugate_pos(a.pos, b.mid).compose(b.pos))

    def test_power(self, spec1):
        """Test (id, 2, id)^3 = (id, 8, id)."""
        two = NormalForm.scalar(RingElem.scalar(spec1, 2))
        assert normal_power(two, 3) == NormalForm.scalar(RingElem.scalar(spec1, 8))
        assert normal_power(two, 0) == NormalForm.identity(spec1)

    def test_negative_power(self, spec1):
        """Test negative powers are refused."""
        with pytest.raises(NotInvertible):
            normal_power(NormalForm.identity(spec1), -1)

    def test_substitution_agrees(self, spec1, eps):
        """Test as_automorphism of the product is the composite map."""
        a = NormalForm(NegAut(spec1, [eps]), 1 + eps, PosAut(spec1, [eps ** 2]))
        b = NormalForm(NegAut.identity(spec1), RingElem.scalar(spec1, 2), PosAut(spec1, [eps]))
        composite = laurent_substitute(as_automorphism(a).laurent(), as_automorphism(b).laurent())
        assert as_automorphism(normal_product(a, b)).laurent() == composite
