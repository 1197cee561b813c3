"""Framed nodal annuli, their monoid chart, gluing, and transition functions.

An annulus xy = t carries an incoming framing x = alpha_in(u) and an outgoing
framing y = alpha_out(v), both reparametrizations u(1 + sum e_n u^-n) with
nilpotent e_n. The chart into the normal-form monoid is

    (alpha_in, t, alpha_out) -> (alpha_in^-1, t, J o alpha_out o J),  J(u) = 1/u

which is the normalization under which gluing matches composition of the
transition functions v = alpha_out^-1(t / alpha_in(u)).
"""

import logging
from dataclasses import dataclass
from typing import Mapping, Optional

from formalcurves.artin import ArtinSpec, LaurentPoly, RingElem, compositional_inverse, laurent_substitute
from formalcurves.errors import NotAUnit, NotNilpotent
from formalcurves.witt import NegAut, NormalForm, PosAut, normal_product


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FramedAnnulus:
    """Universal coordinates of a framed nodal annulus.

    Attributes:
        alpha_in: Reparametrization of the incoming framing.
        t: Smoothing parameter; nilpotent, or a generic unit over a parameter ring.
        alpha_out: Reparametrization of the outgoing framing.
    """
    alpha_in: NegAut
    t: RingElem
    alpha_out: NegAut

    def __post_init__(self):
        self.alpha_in.spec.check(self.t.spec)
        self.t.spec.check(self.alpha_out.spec)
        if not (self.t.is_nilpotent() or self.t.is_generic_unit()):
            raise NotNilpotent(f"smoothing parameter {self.t} is neither nilpotent nor generic")

    @property
    def spec(self) -> ArtinSpec:
        return self.t.spec

    @classmethod
    def untwisted(cls, t: RingElem) -> "FramedAnnulus":
        return cls(NegAut.identity(t.spec), t, NegAut.identity(t.spec))

    def reduce(self) -> RingElem:
        return self.t.reduce()

    def to_json(self) -> dict:
        return {"alpha_in": self.alpha_in.to_json(), "t": self.t.to_json(), "alpha_out": self.alpha_out.to_json()}

    @classmethod
    def from_json(cls, spec: ArtinSpec, data: Mapping) -> "FramedAnnulus":
        return cls(
            NegAut.from_json(spec, data["alpha_in"]),
            RingElem.from_json(spec, data["t"]),
            NegAut.from_json(spec, data["alpha_out"]),
        )


# =============================================================================
# Antipodal transport
# =============================================================================

def antipode_neg(d: NegAut) -> PosAut:
    """J o d o J, which carries x(1 + sum a_n x^-n) to x / (1 + sum a_n x^n)."""
    return PosAut.from_laurent(d.laurent().reflect().inverse())


def antipode_pos(d: PosAut) -> NegAut:
    return NegAut.from_laurent(d.laurent().reflect().inverse())


# =============================================================================
# Chart and gluing
# =============================================================================

def to_monoid_chart(annulus: FramedAnnulus) -> NormalForm:
    return NormalForm(annulus.alpha_in.inverse(), annulus.t, antipode_neg(annulus.alpha_out))


def from_monoid_chart(value: NormalForm) -> FramedAnnulus:
    """Inverse of to_monoid_chart; the mid must be nilpotent or generic."""
    return FramedAnnulus(value.neg.inverse(), value.mid, antipode_pos(value.pos))


def glue_annuli(a: FramedAnnulus, b: FramedAnnulus) -> FramedAnnulus:
    """Glue the outgoing boundary of a to the incoming boundary of b."""
    a.spec.check(b.spec)
    return from_monoid_chart(normal_product(to_monoid_chart(a), to_monoid_chart(b)))


# =============================================================================
# Generic parameters and transition functions
# =============================================================================

def lift_generic(annulus: FramedAnnulus, param: str = "t", target: Optional[ArtinSpec] = None) -> FramedAnnulus:
    """Replace the smoothing parameter by an invertible indeterminate ``param``.

    ``target`` may adjoin further parameters so that several lifted annuli
    share one ring; it must contain ``param``.
    """
    target = target or annulus.spec.with_params(param)

    def lift(c: RingElem) -> RingElem:
        return c.lift(target)

    return FramedAnnulus(
        annulus.alpha_in.map_coeffs(lift, target),
        RingElem.param(target, param),
        annulus.alpha_out.map_coeffs(lift, target),
    )


def specialize_annulus(annulus: FramedAnnulus, values: Mapping[str, RingElem], target: ArtinSpec) -> FramedAnnulus:
    def spec_fn(c: RingElem) -> RingElem:
        return c.specialize(values, target)

    return FramedAnnulus(
        annulus.alpha_in.map_coeffs(spec_fn, target),
        spec_fn(annulus.t),
        annulus.alpha_out.map_coeffs(spec_fn, target),
    )


def transition(annulus: FramedAnnulus) -> LaurentPoly:
    """The chart change u -> alpha_out^-1(t / alpha_in(u)).

    Raises:
        NotAUnit: If t is not a unit (a nilpotent t has no transition).
    """
    if not annulus.t.is_unit():
        raise NotAUnit(f"transition needs an invertible smoothing parameter, got {annulus.t}")
    spec = annulus.spec
    out_inv = compositional_inverse(annulus.alpha_out.laurent())
    scaled = laurent_substitute(out_inv, LaurentPoly.identity(spec) * annulus.t)
    return laurent_substitute(scaled.reflect(), annulus.alpha_in.laurent())


def transition_generic(annulus: FramedAnnulus, param: str = "t") -> LaurentPoly:
    """Transition function over the ring with the smoothing parameter made generic."""
    return transition(lift_generic(annulus, param))


def compose_transitions(first: LaurentPoly, second: LaurentPoly) -> LaurentPoly:
    """second o J o first: the transition of the glued annulus."""
    return laurent_substitute(second, first.inverse())
