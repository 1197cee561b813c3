"""Seeded random data for the property suites.

Every generator takes a ``random.Random`` so suites are reproducible from a
single seed.
"""

import itertools
import random
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from formalcurves.annuli import FramedAnnulus
from formalcurves.artin import ArtinSpec, LaurentPoly, Monomial, RingElem
from formalcurves.corolla import BASE, ModularGraph
from formalcurves.fld import (
    Framing,
    Mark,
    Mobius,
    ProjPoint,
    StableTreeCurve,
    canonicalize,
    corolla_curve,
    stable_glue,
)
from formalcurves.witt import NegAut, NormalForm, PosAut, WittAut


@lru_cache(maxsize=None)
def monomials(num_vars: int, max_degree: int, min_degree: int = 0) -> tuple[Monomial, ...]:
    """Exponent vectors in the nilpotent variables with degree in a range."""
    out = []
    for exps in itertools.product(range(max_degree + 1), repeat=num_vars):
        if min_degree <= sum(exps) <= max_degree:
            out.append(exps)
    return tuple(sorted(out, key=lambda m: (sum(m), m)))


def random_fraction(rng: random.Random, nonzero: bool = False) -> Fraction:
    while True:
        value = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        if value or not nonzero:
            return value


def random_ring_elem(
    rng: random.Random,
    spec: ArtinSpec,
    kind: str = "any",
    density: float = 0.5,
) -> RingElem:
    """A sparse element; kind is "any", "unit", "nilpotent" or "zero"."""
    if kind == "zero":
        return RingElem.zero(spec)
    pad = (0,) * len(spec.params)
    terms = {}
    for mono in monomials(spec.num_vars, spec.trunc_order, 1):
        if rng.random() < density:
            terms[mono + pad] = random_fraction(rng)
    if kind == "unit":
        terms[spec.unit_monomial()] = random_fraction(rng, nonzero=True)
    elif kind == "any" and rng.random() < 0.7:
        terms[spec.unit_monomial()] = random_fraction(rng)
    return RingElem(spec, terms)


def random_nilpotents(rng: random.Random, spec: ArtinSpec, length: int, density: float = 0.4) -> list[RingElem]:
    return [random_ring_elem(rng, spec, "nilpotent", density) for _ in range(length)]


def random_neg(rng: random.Random, spec: ArtinSpec, max_length: int = 3) -> NegAut:
    return NegAut(spec, random_nilpotents(rng, spec, rng.randint(0, max_length)))


def random_pos(rng: random.Random, spec: ArtinSpec, max_length: int = 3) -> PosAut:
    return PosAut(spec, random_nilpotents(rng, spec, rng.randint(0, max_length)))


def random_unit_form(rng: random.Random, spec: ArtinSpec, span: int = 2) -> LaurentPoly:
    """u*(unit + nilpotent corrections) with corrections in u^(1-span)..u^(1+span)."""
    terms = {1: random_ring_elem(rng, spec, "unit")}
    for k in range(1 - span, 2 + span):
        if k != 1 and rng.random() < 0.6:
            terms[k] = random_ring_elem(rng, spec, "nilpotent", 0.4)
    return LaurentPoly(spec, terms)


def random_witt(rng: random.Random, spec: ArtinSpec, span: int = 2) -> WittAut:
    return WittAut.from_laurent(random_unit_form(rng, spec, span))


def random_normal_form(rng: random.Random, spec: ArtinSpec, mid: Optional[str] = None) -> NormalForm:
    """mid is "unit", "nilpotent", "zero", "trivial" (1 + nilpotent) or chosen at random."""
    kind = mid or rng.choice(["unit", "nilpotent", "zero", "any"])
    if kind == "trivial":
        middle = 1 + random_ring_elem(rng, spec, "nilpotent")
    else:
        middle = random_ring_elem(rng, spec, kind)
    return NormalForm(random_neg(rng, spec), middle, random_pos(rng, spec))


def random_annulus(rng: random.Random, spec: ArtinSpec) -> FramedAnnulus:
    return FramedAnnulus(
        random_neg(rng, spec),
        random_ring_elem(rng, spec, rng.choice(["nilpotent", "zero"])),
        random_neg(rng, spec),
    )


def random_mobius(rng: random.Random, spec: ArtinSpec) -> Mobius:
    while True:
        entries = [random_ring_elem(rng, spec, "any", 0.3) for _ in range(4)]
        a, b, c, d = entries
        if (a * d - b * c).is_unit():
            return Mobius(a, b, c, d)


def random_corolla_curve(
    rng: random.Random,
    spec: ArtinSpec,
    labels: "itertools.count",
    max_inputs: int = 3,
    max_marks: int = 1,
    num_inputs: Optional[int] = None,
) -> StableTreeCurve:
    """One component with random germs, marks and perturbed extra points."""
    if num_inputs is None:
        num_inputs = rng.randint(1, max_inputs)
    num_marks = rng.randint(0, max_marks)
    num_marks = max(num_marks, 3 - (num_inputs + 1))
    marks = [f"m{next(labels)}" for _ in range(num_marks)]
    germs = [random_normal_form(rng, spec, rng.choice(["nilpotent", "zero"])) for _ in range(num_inputs + 1)]
    curve = corolla_curve(spec, num_inputs, marks, germs)
    if curve.special_points(0) <= 3:
        return curve
    shift = random_ring_elem(rng, spec, "nilpotent", 0.3)

    # points past 0, 1, infinity move by a nilpotent amount
    def perturb(p: ProjPoint) -> ProjPoint:
        if p.y.is_unit() and p.x.constant_term() >= 2:
            return ProjPoint(p.x + shift, p.y)
        return p

    return canonicalize(StableTreeCurve(
        spec,
        curve.num_components,
        curve.nodes,
        tuple(Framing(f.vertex, perturb(f.point), f.germ) for f in curve.framings),
        tuple(Mark(m.label, m.vertex, perturb(m.point)) for m in curve.marks),
    ))


def random_curve(
    rng: random.Random,
    spec: ArtinSpec,
    labels: Optional["itertools.count"] = None,
    max_components: int = 3,
    max_inputs: int = 3,
) -> StableTreeCurve:
    """A random canonical curve built by gluing random single components."""
    labels = labels if labels is not None else itertools.count(1)
    curve = random_corolla_curve(rng, spec, labels, max_inputs)
    for _ in range(rng.randint(0, max_components - 1)):
        piece = random_corolla_curve(rng, spec, labels, max_inputs)
        curve = stable_glue(curve, rng.randint(1, curve.num_inputs), piece)
    return curve


def random_modular_graph(
    rng: random.Random,
    max_vertices: int = 3,
    max_edges: int = 4,
    max_genus: int = 2,
) -> ModularGraph:
    """Vertices v1..vk and edges e1..em with ends drawn from the vertices and the base point."""
    vertices = [(f"v{k}", rng.randint(0, max_genus)) for k in range(1, rng.randint(1, max_vertices) + 1)]
    ends = [v for v, _ in vertices] + [BASE]
    edges = [
        (f"e{k}", rng.choice(ends), rng.choice(ends))
        for k in range(1, rng.randint(0, max_edges) + 1)
    ]
    return ModularGraph.build(vertices, edges)
