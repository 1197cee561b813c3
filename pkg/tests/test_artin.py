"""Tests for formalcurves.artin module.

sympy serves as an independent oracle for polynomial arithmetic.
"""

import logging
from fractions import Fraction

import pytest
import sympy

from formalcurves import generators as gen
from formalcurves.artin import (
    ArtinSpec,
    LaurentPoly,
    RingElem,
    compositional_inverse,
    laurent_substitute,
    ring_invert,
    ring_mul,
)
from formalcurves.errors import NotAUnit, NotInvertible, NotSubstitutable, SpecMismatch


def to_sympy(a: RingElem, symbols) -> sympy.Expr:
    expr = sympy.Integer(0)
    for mono, coeff in a.items():
        term = sympy.Rational(coeff.numerator, coeff.denominator)
        for s, k in zip(symbols, mono):
            term *= s ** k
        expr += term
    return expr


def from_sympy(expr: sympy.Expr, symbols, spec: ArtinSpec) -> RingElem:
    poly = sympy.Poly(sympy.expand(expr), *symbols)
    return RingElem(spec, {mono: Fraction(int(c.p), int(c.q)) for mono, c in poly.terms()})


class TestArtinSpec:
    """Tests for ArtinSpec."""

    def test_width_counts_params(self):
        """Test exponent vectors hold variables then parameters."""
        spec = ArtinSpec(2, 3, ("t",))
        assert spec.width == 3
        assert spec.var_monomial(2) == (0, 1, 0)
        assert spec.param_monomial("t", -1) == (0, 0, -1)

    def test_var_out_of_range(self):
        """Test asking for e3 in a two-variable ring fails."""
        with pytest.raises(SpecMismatch):
            ArtinSpec(2, 3).var_monomial(3)

    def test_with_params_keeps_existing(self):
        """Test adjoining a parameter twice is harmless."""
        spec = ArtinSpec(1, 2).with_params("s", "t").with_params("t", "u")
        assert spec.params == ("s", "t", "u")
        assert spec.without_params("t").params == ("s", "u")
        assert spec.without_params() == ArtinSpec(1, 2)

    def test_json(self):
        """Test the JSON form names vars and order, and params only when present."""
        assert ArtinSpec(1, 3).to_json() == {"vars": 1, "order": 3}
        spec = ArtinSpec(2, 1, ("s",))
        assert spec.to_json() == {"vars": 2, "order": 1, "params": ["s"]}
        assert ArtinSpec.from_json(spec.to_json()) == spec

    def test_mismatch(self):
        """Test mixing rings raises SpecMismatch."""
        a = RingElem.one(ArtinSpec(1, 2))
        b = RingElem.one(ArtinSpec(1, 3))
        with pytest.raises(SpecMismatch):
            ring_mul(a, b)


class TestRingElem:
    """Tests for RingElem arithmetic."""

    def test_inverse_of_one_plus_eps(self, spec1, eps):
        """Test (1 + e)^-1 = 1 - e + e^2 - e^3 when e^4 = 0."""
        inv = ring_invert(1 + eps)
        assert inv == 1 - eps + eps ** 2 - eps ** 3
        assert str(inv) == "1 - e1 + e1^2 - e1^3"

    def test_truncation(self, eps):
        """Test monomials past the truncation order vanish."""
        assert (eps ** 2) * (eps ** 2) == 0
        assert (eps ** 4).is_zero()

    def test_non_unit(self, eps):
        """Test nilpotents are not invertible."""
        with pytest.raises(NotAUnit):
            eps.invert()
        with pytest.raises(NotAUnit):
            RingElem.zero(eps.spec).invert()

    def test_unit_and_nilpotent(self, spec2):
        """Test the unit / nilpotent split."""
        e1, e2 = RingElem.var(spec2, 1), RingElem.var(spec2, 2)
        assert (3 + e1 * e2).is_unit()
        assert (e1 + e2).is_nilpotent()
        assert not (e1 + e2).is_unit()
        assert (e1 * e2).order() == 2

    def test_rational_str(self, spec1, eps):
        """Test fractional coefficients render as p/q."""
        value = RingElem.scalar(spec1, Fraction(1, 2)) - Fraction(1, 4) * eps
        assert str(value) == "1/2 - 1/4*e1"

    def test_division(self, spec1, eps):
        """Test division by a unit."""
        assert (eps / (1 + eps)) * (1 + eps) == eps

    def test_negative_power(self, eps):
        """Test negative powers invert first."""
        assert (1 + eps) ** -2 * (1 + eps) ** 2 == 1

    def test_generic_param(self):
        """Test generic parameters are units with Laurent exponents."""
        spec = ArtinSpec(1, 2, ("t",))
        t = RingElem.param(spec, "t")
        assert t.is_generic_unit()
        assert t.invert() == RingElem.param(spec, "t", -1)
        assert (t * RingElem.var(spec, 1)).is_nilpotent()

    def test_reduce(self, spec1, eps):
        """Test reduction sets e to zero."""
        assert (5 + 2 * eps + eps ** 3).reduce() == 5

    def test_specialize_and_lift(self):
        """Test lifting into a parameter ring and specializing back."""
        base = ArtinSpec(1, 2)
        lifted = base.with_params("t")
        e = RingElem.var(base, 1)
        t = RingElem.param(lifted, "t")
        value = e.lift(lifted) * t + 1
        assert value.specialize({"t": e}, base) == 1 + e ** 2

    def test_json(self, spec1, eps):
        """Test JSON lists monomials in order with string fractions."""
        value = 1 - Fraction(1, 3) * eps
        assert value.to_json() == [
            {"monomial": [0], "num": "1", "den": "1"},
            {"monomial": [1], "num": "-1", "den": "3"},
        ]
        assert RingElem.from_json(spec1, value.to_json()) == value

    def test_multiplication_matches_sympy(self, spec2, rng):
        """Test products agree with sympy after truncation."""
        x, y = sympy.symbols("x y")
        for _ in range(25):
            a = gen.random_ring_elem(rng, spec2)
            b = gen.random_ring_elem(rng, spec2)
            expected = from_sympy(to_sympy(a, (x, y)) * to_sympy(b, (x, y)), (x, y), spec2)
            assert a * b == expected

    def test_inverse_matches_sympy_series(self, spec1, rng):
        """Test inverses agree with sympy's series of 1/a."""
        x = sympy.symbols("x")
        for _ in range(10):
            a = gen.random_ring_elem(rng, spec1, "unit")
            series = sympy.series(1 / to_sympy(a, (x,)), x, 0, spec1.trunc_order + 1).removeO()
            assert a.invert() == from_sympy(series, (x,), spec1)


class TestLaurentPoly:
    """Tests for LaurentPoly."""

    def test_inverse(self, spec1, eps):
        """Test inverting u + e."""
        u = LaurentPoly.identity(spec1)
        g = u + eps
        assert g * g.inverse() == 1

    def test_inverse_needs_monomial_unit(self, spec1):
        """Test 1 + u has no inverse."""
        with pytest.raises(NotInvertible):
            (LaurentPoly.identity(spec1) + 1).inverse()

    def test_inverse_is_cached(self, spec2, rng):
        """Test the inverse is computed once and points back."""
        g = gen.random_unit_form(rng, spec2)
        assert g.inverse() is g.inverse()
        assert g.inverse().inverse() is g

    def test_powers(self, spec1, eps):
        """Test powers lists 1, g, g^2, ... and reuses the cached entries."""
        g = LaurentPoly.identity(spec1) + eps
        powers = g.powers(3)
        assert powers == [LaurentPoly.constant(spec1, 1), g, g * g, g ** 3]
        assert all(a is b for a, b in zip(g.powers(2), powers))

    def test_product_matches_coefficientwise(self, spec2, rng):
        """Test the product is the convolution of ring products."""
        for _ in range(10):
            f, g = gen.random_unit_form(rng, spec2), gen.random_unit_form(rng, spec2)
            expected = LaurentPoly.zero(spec2)
            for k1, c1 in f.items():
                for k2, c2 in g.items():
                    expected = expected + LaurentPoly.monomial(spec2, k1 + k2, c1 * c2)
            assert f * g == expected

    def test_product_truncates(self, spec1, eps):
        """Test products above the truncation order vanish."""
        f = LaurentPoly(spec1, {1: eps ** 2, -1: eps ** 3})
        assert (f * f).is_zero()

    def test_reflect(self, spec1, eps):
        """Test reflecting swaps u and 1/u."""
        f = LaurentPoly(spec1, {2: eps, -1: 3})
        assert f.reflect() == LaurentPoly(spec1, {-2: eps, 1: 3})
        assert f.reflect().reflect() == f

    def test_str(self, spec1, eps):
        """Test the u^k rendering."""
        f = LaurentPoly(spec1, {-2: -eps, -1: 1, 0: 2})
        assert str(f) == "(-e1)*u^-2 + u^-1 + (2)"

    def test_json(self, spec1, eps):
        """Test JSON lists exponents in order."""
        f = LaurentPoly(spec1, {1: 1, -1: eps})
        assert [item["exp"] for item in f.to_json()] == [-1, 1]
        assert LaurentPoly.from_json(spec1, f.to_json()) == f


class TestSubstitution:
    """Tests for laurent_substitute and compositional_inverse."""

    def test_negative_power(self):
        """Test 1/(u + e) = u^-1 - e u^-2 + e^2 u^-3 when e^3 = 0."""
        spec = ArtinSpec(1, 2)
        e = RingElem.var(spec, 1)
        u = LaurentPoly.identity(spec)
        f = LaurentPoly.monomial(spec, -1)
        expected = LaurentPoly(spec, {-1: 1, -2: -e, -3: e ** 2})
        assert laurent_substitute(f, u + e) == expected

    def test_identity(self, spec1, eps):
        """Test substituting u changes nothing."""
        u = LaurentPoly.identity(spec1)
        f = LaurentPoly(spec1, {3: eps, -2: 1, 0: 5})
        assert laurent_substitute(f, u) == f

    def test_matches_sympy(self):
        """Test a positive substitution against sympy expansion."""
        spec = ArtinSpec(1, 2)
        e = RingElem.var(spec, 1)
        u = LaurentPoly.identity(spec)
        f = LaurentPoly(spec, {2: 1, 1: e, 0: 3})
        g = u * 2 + e + LaurentPoly.monomial(spec, 2, e)
        x, z = sympy.symbols("x z")
        gz = 2 * z + x + x * z ** 2
        expanded = sympy.Poly(sympy.expand(gz ** 2 + x * gz + 3), z)
        terms = {
            k: from_sympy(c, (x,), spec)
            for (k,), c in zip(expanded.monoms(), expanded.coeffs())
        }
        assert laurent_substitute(f, g) == LaurentPoly(spec, terms)

    def test_not_substitutable(self, spec1, eps):
        """Test only unit-form series can be substituted."""
        f = LaurentPoly.identity(spec1)
        with pytest.raises(NotSubstitutable):
            laurent_substitute(f, LaurentPoly.identity(spec1) * eps)
        with pytest.raises(NotSubstitutable):
            laurent_substitute(f, LaurentPoly(spec1, {1: 1, 0: 1}))

    def test_compositional_inverse(self):
        """Test the inverse of u + e is u - e."""
        spec = ArtinSpec(1, 2)
        e = RingElem.var(spec, 1)
        u = LaurentPoly.identity(spec)
        assert compositional_inverse(u + e) == u - e

    def test_compositional_inverse_two_sided(self, spec2, rng):
        """Test g(h) = h(g) = u."""
        u = LaurentPoly.identity(spec2)
        for _ in range(10):
            g = gen.random_unit_form(rng, spec2)
            h = compositional_inverse(g)
            assert laurent_substitute(g, h) == u
            assert laurent_substitute(h, g) == u

    def test_compositional_inverse_near_identity(self, spec1, eps, caplog):
        """Test a map agreeing with u to high order is inverted in one round."""
        u = LaurentPoly.identity(spec1)
        g = u + LaurentPoly(spec1, {-1: eps ** 3, 3: eps ** 3})
        with caplog.at_level(logging.DEBUG, logger="formalcurves.artin"):
            h = compositional_inverse(g)
        assert h == u - LaurentPoly(spec1, {-1: eps ** 3, 3: eps ** 3})
        assert "converged after 1 rounds" in caplog.text

    def test_compositional_inverse_rejects(self, spec1):
        """Test a non unit-form series has no inverse."""
        with pytest.raises(NotInvertible):
            compositional_inverse(LaurentPoly.monomial(spec1, 2))

    def test_associative(self, spec2, rng):
        """Test (f o g) o h = f o (g o h)."""
        for _ in range(10):
            f, g, h = (gen.random_unit_form(rng, spec2) for _ in range(3))
            assert laurent_substitute(laurent_substitute(f, g), h) == \
                laurent_substitute(f, laurent_substitute(g, h))
