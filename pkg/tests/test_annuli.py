"""Tests for formalcurves.annuli module."""

import pytest

from formalcurves import generators as gen
from formalcurves.annuli import (
    FramedAnnulus,
    antipode_neg,
    antipode_pos,
    compose_transitions,
    from_monoid_chart,
    glue_annuli,
    lift_generic,
    specialize_annulus,
    to_monoid_chart,
    transition,
    transition_generic,
)
from formalcurves.artin import ArtinSpec, LaurentPoly, RingElem
from formalcurves.errors import NotAUnit, NotNilpotent
from formalcurves.witt import NegAut, NormalForm, PosAut


class TestFramedAnnulus:
    """Tests for FramedAnnulus."""

    def test_untwisted(self, spec1, eps):
        """Test untwisted annuli have identity framings."""
        a = FramedAnnulus.untwisted(eps)
        assert a.alpha_in.is_identity()
        assert a.alpha_out.is_identity()
        assert a.reduce() == 0

    def test_rejects_unit_smoothing(self, spec1):
        """Test a scalar unit t is neither nilpotent nor generic."""
        with pytest.raises(NotNilpotent):
            FramedAnnulus.untwisted(RingElem.one(spec1))

    def test_json(self, spec1, eps):
        """Test the JSON keys."""
        a = FramedAnnulus(NegAut(spec1, [eps]), eps ** 2, NegAut.identity(spec1))
        data = a.to_json()
        assert set(data) == {"alpha_in", "t", "alpha_out"}
        assert FramedAnnulus.from_json(spec1, data) == a


class TestChart:
    """Tests for the monoid chart."""

    def test_antipode_round_trip(self, spec2, rng):
        """Test J o d o J is an involution between the subgroups."""
        for _ in range(10):
            d = gen.random_neg(rng, spec2)
            assert isinstance(antipode_neg(d), PosAut)
            assert antipode_pos(antipode_neg(d)) == d

    def test_antipode_first_order(self, spec):
        """Test J o (x + e) o J = x - e x^2 to first order."""
        e = RingElem.var(spec, 1)
        assert antipode_neg(NegAut(spec, [e])) == PosAut(spec, [-e])

    def test_round_trip(self, spec2, rng):
        """Test from_monoid_chart inverts to_monoid_chart."""
        for _ in range(10):
            a = gen.random_annulus(rng, spec2)
            assert from_monoid_chart(to_monoid_chart(a)) == a

    def test_glue_multiplies_smoothing(self):
        """Test untwisted annuli glue to the product of their parameters."""
        spec = ArtinSpec(2, 2)
        e1, e2 = RingElem.var(spec, 1), RingElem.var(spec, 2)
        glued = glue_annuli(FramedAnnulus.untwisted(e1), FramedAnnulus.untwisted(e2))
        assert glued == FramedAnnulus.untwisted(e1 * e2)

    def test_glue_associative(self, spec2, rng):
        """Test gluing is associative."""
        for _ in range(5):
            a, b, c = (gen.random_annulus(rng, spec2) for _ in range(3))
            assert glue_annuli(glue_annuli(a, b), c) == glue_annuli(a, glue_annuli(b, c))


@pytest.fixture
def spec():
    return ArtinSpec(1, 1)


class TestTransition:
    """Tests for transition functions."""

    def test_generic_untwisted(self, spec):
        """Test the untwisted transition is t/u."""
        lifted = lift_generic(FramedAnnulus.untwisted(RingElem.zero(spec)))
        t = RingElem.param(lifted.spec, "t")
        assert transition(lifted) == LaurentPoly.monomial(lifted.spec, -1, t)

    def test_nilpotent_has_no_transition(self, spec):
        """Test a nilpotent t is rejected."""
        with pytest.raises(NotAUnit):
            transition(FramedAnnulus.untwisted(RingElem.var(spec, 1)))

    def test_transition_generic_adjoins_t(self, spec):
        """Test the generic transition lives over R[t, 1/t]."""
        f = transition_generic(FramedAnnulus.untwisted(RingElem.zero(spec)))
        assert f.spec.params == ("t",)

    def test_gluing_law(self, spec2, rng):
        """Test the glued transition is the composite of the two transitions."""
        for _ in range(5):
            a, b = gen.random_annulus(rng, spec2), gen.random_annulus(rng, spec2)
            target = spec2.with_params("s", "t")
            la = lift_generic(a, "s", target)
            lb = lift_generic(b, "t", target)
            assert transition(glue_annuli(la, lb)) == compose_transitions(transition(la), transition(lb))

    def test_specialization_commutes(self, spec2, rng):
        """Test specializing the generic parameter commutes with gluing."""
        for _ in range(5):
            a, b = gen.random_annulus(rng, spec2), gen.random_annulus(rng, spec2)
            target = spec2.with_params("s", "t")
            glued = glue_annuli(lift_generic(a, "s", target), lift_generic(b, "t", target))
            back = specialize_annulus(glued, {"s": a.t, "t": b.t}, spec2)
            assert back == glue_annuli(a, b)

    def test_chart_of_untwisted(self, spec):
        """Test the chart of an untwisted annulus is (id, t, id)."""
        e = RingElem.var(spec, 1)
        assert to_monoid_chart(FramedAnnulus.untwisted(e)) == NormalForm.scalar(e)
