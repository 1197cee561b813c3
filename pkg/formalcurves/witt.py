"""The automorphism group of G_m over an Artin ring and its normal-ordered monoid.

A_m acts on x by x -> c*x*(1 + n(x)) with c a unit and n nilpotent. It contains
the unipotent subgroups

    A_m^-  x -> x*(1 + sum a_n x^-n)
    A_m^+  x -> x*(1 + sum b_n x^n)

and every element factors uniquely as neg o m_e o pos. Relaxing e to an
arbitrary ring element gives the monoid of normal forms, whose product is
computed by refactoring the middle pos o neg and rescaling the pieces.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from formalcurves.artin import (
    ArtinSpec,
    LaurentPoly,
    RingElem,
    compositional_inverse,
    laurent_substitute,
)
from formalcurves.errors import MidNotAUnit, NotAUnit, NotInvertible, NotNilpotent, OutOfSubgroup


logger = logging.getLogger(__name__)


def _trim(coeffs: Sequence[RingElem]) -> tuple[RingElem, ...]:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return tuple(coeffs)


# =============================================================================
# A_m
# =============================================================================

class WittAut:
    """The automorphism x -> c*x*(1 + n(x)), normalized so n has no constant term."""

    __slots__ = ("spec", "c", "n")

    def __init__(self, c: RingElem, n: LaurentPoly):
        c.spec.check(n.spec)
        if not c.is_unit():
            raise NotAUnit(f"scaling part {c} is not a unit")
        if not all(coeff.is_nilpotent() for _, coeff in n.items()):
            raise NotNilpotent(f"correction {n} has non-nilpotent coefficients")
        n0 = n.coeff(0)
        if not n0.is_zero():
            # absorb the constant correction into the scaling
            scale = 1 + n0
            c = c * scale
            n = (n - n0) * scale.invert()
        self.spec = c.spec
        self.c = c
        self.n = n

    @classmethod
    def identity(cls, spec: ArtinSpec) -> "WittAut":
        return cls(RingElem.one(spec), LaurentPoly.zero(spec))

    @classmethod
    def scaling(cls, c: RingElem) -> "WittAut":
        return cls(c, LaurentPoly.zero(c.spec))

    @classmethod
    def from_laurent(cls, p: LaurentPoly) -> "WittAut":
        """Read a unit-form Laurent map as an automorphism."""
        if not p.unit_form():
            raise NotAUnit(f"{p} is not of the form u*(unit + nilpotent)")
        c = p.coeff(1)
        n = p * LaurentPoly.monomial(p.spec, -1, c.invert()) - 1
        return cls(c, n)

    def laurent(self) -> LaurentPoly:
        u = LaurentPoly.identity(self.spec)
        return u * self.c * (self.n + 1)

    def reduce(self) -> RingElem:
        return self.c.reduce()

    def __eq__(self, other) -> bool:
        if not isinstance(other, WittAut):
            return NotImplemented
        return self.c == other.c and self.n == other.n

    def __hash__(self) -> int:
        return hash((self.c, self.n))

    def __repr__(self) -> str:
        return f"WittAut(c={self.c}, n={self.n})"

    def to_json(self) -> dict:
        return {"c": self.c.to_json(), "n": self.n.to_json()}

    @classmethod
    def from_json(cls, spec: ArtinSpec, data: Mapping) -> "WittAut":
        return cls(RingElem.from_json(spec, data["c"]), LaurentPoly.from_json(spec, data["n"]))


def compose_aut(f: WittAut, g: WittAut) -> WittAut:
    """The automorphism x -> f(g(x))."""
    return WittAut.from_laurent(laurent_substitute(f.laurent(), g.laurent()))


def invert_aut(f: WittAut) -> WittAut:
    return WittAut.from_laurent(compositional_inverse(f.laurent()))


# =============================================================================
# Unipotent subgroups
# =============================================================================

class _UnipotentAut:
    """Shared storage for A_m^- and A_m^+: nilpotent coefficients c_1..c_K.

    Instances are immutable, so the Laurent form and the inverse are computed
    once and cached.
    """

    __slots__ = ("spec", "coeffs", "_laurent", "_inverse")
    sign = 0

    def __init__(self, spec: ArtinSpec, coeffs: Iterable[RingElem] = ()):
        coeffs = tuple(coeffs)
        for c in coeffs:
            spec.check(c.spec)
            if not c.is_nilpotent():
                raise NotNilpotent(f"coefficient {c} is not nilpotent")
        self.spec = spec
        self.coeffs = _trim(coeffs)
        self._laurent = None
        self._inverse = None

    @classmethod
    def identity(cls, spec: ArtinSpec):
        return cls(spec)

    def coeff(self, n: int) -> RingElem:
        if 1 <= n <= len(self.coeffs):
            return self.coeffs[n - 1]
        return RingElem.zero(self.spec)

    def is_identity(self) -> bool:
        return not self.coeffs

    def laurent(self) -> LaurentPoly:
        if self._laurent is None:
            terms = {1: RingElem.one(self.spec)}
            for n, c in enumerate(self.coeffs, start=1):
                terms[1 + self.sign * n] = c
            self._laurent = LaurentPoly(self.spec, terms)
        return self._laurent

    @classmethod
    def from_laurent(cls, p: LaurentPoly):
        """Read x*(1 + sum c_n x^(sign*n)) back from its Laurent form.

        Raises:
            OutOfSubgroup: If p has a different linear term or support.
        """
        if p.coeff(1) != 1:
            raise OutOfSubgroup(f"{p} does not have linear coefficient 1")
        coeffs = []
        for k, c in p.items():
            if k == 1:
                continue
            n = (k - 1) * cls.sign
            if n < 1:
                raise OutOfSubgroup(f"{p} has a u^{k} term outside {cls.__name__}")
            while len(coeffs) < n:
                coeffs.append(RingElem.zero(p.spec))
            coeffs[n - 1] = c
        return cls(p.spec, coeffs)

    def compose(self, other):
        """self o other, which stays in the subgroup."""
        self.spec.check(other.spec)
        if self.is_identity():
            return other
        if other.is_identity():
            return self
        return type(self).from_laurent(laurent_substitute(self.laurent(), other.laurent()))

    def inverse(self):
        if self._inverse is None:
            self._inverse = type(self).from_laurent(compositional_inverse(self.laurent()))
            self._inverse._inverse = self
        return self._inverse

    def as_aut(self) -> WittAut:
        return WittAut.from_laurent(self.laurent())

    def map_coeffs(self, fn, spec: ArtinSpec = None):
        spec = spec or self.spec
        return type(self)(spec, [fn(c) for c in self.coeffs])

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.spec == other.spec and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.spec, self.coeffs))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({', '.join(str(c) for c in self.coeffs)})"

    def to_json(self) -> list:
        return [c.to_json() for c in self.coeffs]

    @classmethod
    def from_json(cls, spec: ArtinSpec, data: Iterable):
        return cls(spec, [RingElem.from_json(spec, item) for item in data])


class NegAut(_UnipotentAut):
    """x -> x*(1 + sum a_n x^-n), a_n nilpotent."""

    __slots__ = ()
    sign = -1


class PosAut(_UnipotentAut):
    """x -> x*(1 + sum b_n x^n), b_n nilpotent."""

    __slots__ = ()
    sign = 1


def scale_conjugate_neg(d: NegAut, c: RingElem) -> NegAut:
    """a_n -> c^n * a_n, which is m_c o d o m_c^-1 when c is a unit."""
    d.spec.check(c.spec)
    return NegAut(d.spec, [c ** n * a for n, a in enumerate(d.coeffs, start=1)])


def scale_conjugate_pos(d: PosAut, c: RingElem) -> PosAut:
    """b_n -> c^n * b_n, which is m_c^-1 o d o m_c when c is a unit."""
    d.spec.check(c.spec)
    return PosAut(d.spec, [c ** n * b for n, b in enumerate(d.coeffs, start=1)])


# =============================================================================
# Normal forms
# =============================================================================

@dataclass(frozen=True)
class NormalForm:
    """A point (neg, mid, pos) of the monoid A_m^- x A^1 x A_m^+."""
    neg: NegAut
    mid: RingElem
    pos: PosAut

    def __post_init__(self):
        self.neg.spec.check(self.mid.spec)
        self.mid.spec.check(self.pos.spec)

    @property
    def spec(self) -> ArtinSpec:
        return self.mid.spec

    @classmethod
    def identity(cls, spec: ArtinSpec) -> "NormalForm":
        return cls(NegAut.identity(spec), RingElem.one(spec), PosAut.identity(spec))

    @classmethod
    def scalar(cls, mid: RingElem) -> "NormalForm":
        return cls(NegAut.identity(mid.spec), mid, PosAut.identity(mid.spec))

    def reduce(self) -> RingElem:
        """The reduced point of A^1."""
        return self.mid.reduce()

    def map_coeffs(self, fn, spec: ArtinSpec) -> "NormalForm":
        return NormalForm(self.neg.map_coeffs(fn, spec), fn(self.mid), self.pos.map_coeffs(fn, spec))

    def __repr__(self) -> str:
        return f"NormalForm({self.neg!r}, {self.mid}, {self.pos!r})"

    def to_json(self) -> dict:
        return {"neg": self.neg.to_json(), "mid": self.mid.to_json(), "pos": self.pos.to_json()}

    @classmethod
    def from_json(cls, spec: ArtinSpec, data: Mapping) -> "NormalForm":
        return cls(
            NegAut.from_json(spec, data["neg"]),
            RingElem.from_json(spec, data["mid"]),
            PosAut.from_json(spec, data["pos"]),
        )


# Points of the completion at 0: normal forms whose mid is nilpotent.
AnnulusMonoidElem = NormalForm


def check_annulus_elem(value: NormalForm) -> NormalForm:
    if not value.mid.is_nilpotent():
        raise NotNilpotent(f"mid {value.mid} is not nilpotent")
    return value


def birkhoff_factor(f: WittAut) -> NormalForm:
    """Factor f uniquely as neg o m_e o pos.

    The loop keeps f = neg o m_e o R o pos with R the residual. Each round
    splits R into its negative powers, the linear coefficient c and its
    positive powers, peels them off into neg, e and pos, and updates
    R <- m_c^-1 o step_neg^-1 o R o step_pos^-1. The steps are close to the
    identity, so their inverses are cheap, and the order of R - u strictly
    increases, so the loop ends within trunc_order rounds.
    """
    spec = f.spec
    u = LaurentPoly.identity(spec)
    neg = NegAut.identity(spec)
    pos = PosAut.identity(spec)
    e = f.c
    residual = f.laurent() * e.invert()
    for rounds in range(spec.trunc_order + 2):
        if residual == u:
            logger.debug(f"birkhoff_factor finished after {rounds} rounds")
            return NormalForm(neg, e, pos)
        top = max([1] + residual.exponents())
        bottom = min([1] + residual.exponents())
        step_neg = NegAut(spec, [residual.coeff(1 - n) for n in range(1, 2 - bottom)])
        step_pos = PosAut(spec, [residual.coeff(1 + n) for n in range(1, top)])
        scale = residual.coeff(1)
        neg = neg.compose(scale_conjugate_neg(step_neg, e))
        e = e * scale
        pos = step_pos.compose(pos)
        if not step_pos.is_identity():
            residual = laurent_substitute(residual, step_pos.inverse().laurent())
        if not step_neg.is_identity():
            residual = laurent_substitute(step_neg.inverse().laurent(), residual)
        residual = residual * scale.invert()
    raise RuntimeError(f"birkhoff_factor did not converge on {f}")


def as_automorphism(value: NormalForm) -> WittAut:
    """neg o m_mid o pos as an automorphism.

    Raises:
        MidNotAUnit: If mid is not a unit.
    """
    if not value.mid.is_unit():
        raise MidNotAUnit(f"mid {value.mid} is not a unit")
    scaled = laurent_substitute(LaurentPoly.identity(value.spec) * value.mid, value.pos.laurent())
    return WittAut.from_laurent(laurent_substitute(value.neg.laurent(), scaled))


def normal_product(a: NormalForm, b: NormalForm) -> NormalForm:
    """The monoid product extending composition of automorphisms.

    pos_a o neg_b is refactored as d_neg o m_e o d_pos, and the pieces are moved
    outwards by scale conjugation, so every coordinate is polynomial in the mids.
    """
    a.spec.check(b.spec)
    if a.pos.is_identity() or b.neg.is_identity():
        middle = NormalForm(b.neg, RingElem.one(a.spec), a.pos)
    else:
        middle = birkhoff_factor(compose_aut(a.pos.as_aut(), b.neg.as_aut()))
    return NormalForm(
        a.neg.compose(scale_conjugate_neg(middle.neg, a.mid)),
        a.mid * middle.mid * b.mid,
        scale_conjugate_pos(middle.pos, b.mid).compose(b.pos),
    )


def normal_power(value: NormalForm, k: int) -> NormalForm:
    """value^k for k >= 0.

    Raises:
        NotInvertible: For negative k; the monoid has no inverses in general.
    """
    if k < 0:
        raise NotInvertible(f"negative power {k} of a normal form")
    result = NormalForm.identity(value.spec)
    for _ in range(k):
        result = normal_product(result, value)
    return result
