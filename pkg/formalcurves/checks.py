"""Named property suites and the runner that drives them.

Each suite is a list of properties. A randomized property is called once per
trial with a seeded generator and raises PropertyFailure (or a domain error)
when a law fails; an exhaustive property is called once.
"""

import itertools
import logging
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from pydantic import BaseModel, Field

from formalcurves import generators as gen
from formalcurves.annuli import (
    FramedAnnulus,
    compose_transitions,
    from_monoid_chart,
    glue_annuli,
    lift_generic,
    specialize_annulus,
    to_monoid_chart,
    transition,
)
from formalcurves.artin import ArtinSpec, LaurentPoly, compositional_inverse, laurent_substitute
from formalcurves.config import CheckConfig, CorollaBounds
from formalcurves.corolla import (
    TerminalAlgebra,
    check_operadic_axioms,
    collapse,
    compose_morphisms,
    contraction_orders,
    evaluate_contraction,
    from_graph,
    hom,
    identity,
    is_bush_corolla,
    mutation_harness,
    object_universe,
)
from formalcurves.errors import FormalCurvesError
from formalcurves.fld import (
    TRIVIAL_COMM,
    CurveAlgebra,
    StableTreeCurve,
    angle,
    annulus_act,
    annulus_comm_operad,
    annulus_curve,
    canonicalize,
    comm_g_map,
    hour_reduced,
    reduce_curve,
    relabel_inputs,
    stable_glue,
    twist,
    unit_curve,
)
from formalcurves.witt import (
    NegAut,
    NormalForm,
    PosAut,
    as_automorphism,
    birkhoff_factor,
    compose_aut,
    normal_product,
)


logger = logging.getLogger(__name__)


class Suite(str, Enum):
    """Property suites runnable from the command line."""
    ARTIN = "artin"
    WITT = "witt"
    ANNULI = "annuli"
    COROLLA = "corolla"
    FLD = "fld"
    COMM = "comm"
    ALL = "all"


class CheckState(str, Enum):
    IDLE = "idle"
    RUNNING = "running"
    DONE = "done"


class PropertyFailure(Exception):
    """A checked law does not hold."""


def expect(condition: bool, detail: str) -> None:
    if not condition:
        raise PropertyFailure(detail)


@dataclass
class CheckContext:
    """Per-property state handed to every trial."""
    rng: random.Random
    spec: ArtinSpec
    config: CheckConfig
    labels: "itertools.count" = field(default_factory=lambda: itertools.count(1))


@dataclass(frozen=True)
class Property:
    name: str
    check: Callable[[CheckContext], None]
    exhaustive: bool = False


# =============================================================================
# Results
# =============================================================================

class PropertyResult(BaseModel):
    suite: str
    name: str
    trials: int = 0
    failures: int = 0
    detail: Optional[str] = None
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.failures == 0


class SuiteReport(BaseModel):
    suite: str
    seed: int
    ring: dict = Field(default_factory=dict)
    results: list[PropertyResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)


# =============================================================================
# artin
# =============================================================================

def _ring_inverse(ctx: CheckContext) -> None:
    a = gen.random_ring_elem(ctx.rng, ctx.spec, "unit")
    expect(a * a.invert() == 1, f"{a} * {a.invert()} != 1")


def _ring_distributive(ctx: CheckContext) -> None:
    a, b, c = (gen.random_ring_elem(ctx.rng, ctx.spec) for _ in range(3))
    expect((a + b) * c == a * c + b * c, f"({a} + {b}) * {c}")


def _compositional_inverse(ctx: CheckContext) -> None:
    g = gen.random_unit_form(ctx.rng, ctx.spec)
    h = compositional_inverse(g)
    u = LaurentPoly.identity(ctx.spec)
    expect(laurent_substitute(g, h) == u, f"g(g^-1(u)) != u for {g}")
    expect(laurent_substitute(h, g) == u, f"g^-1(g(u)) != u for {g}")


def _substitution_associative(ctx: CheckContext) -> None:
    f, g, h = (gen.random_unit_form(ctx.rng, ctx.spec) for _ in range(3))
    left = laurent_substitute(laurent_substitute(f, g), h)
    right = laurent_substitute(f, laurent_substitute(g, h))
    expect(left == right, f"(f o g) o h != f o (g o h) for {f}, {g}, {h}")


# =============================================================================
# witt
# =============================================================================

def _factor_round_trip(ctx: CheckContext) -> None:
    for spec in (ArtinSpec(1, ctx.spec.trunc_order), ctx.spec):
        f = gen.random_witt(ctx.rng, spec)
        expect(as_automorphism(birkhoff_factor(f)) == f, f"factorization of {f} does not recompose")


def _factor_unique(ctx: CheckContext) -> None:
    value = gen.random_normal_form(ctx.rng, ctx.spec, "unit")
    expect(birkhoff_factor(as_automorphism(value)) == value, f"{value} is not recovered")


def _normal_associative(ctx: CheckContext) -> None:
    a, b, c = (gen.random_normal_form(ctx.rng, ctx.spec) for _ in range(3))
    left = normal_product(normal_product(a, b), c)
    right = normal_product(a, normal_product(b, c))
    expect(left == right, f"associativity fails on {a}, {b}, {c}")


def _normal_unital(ctx: CheckContext) -> None:
    a = gen.random_normal_form(ctx.rng, ctx.spec)
    one = NormalForm.identity(ctx.spec)
    expect(normal_product(one, a) == a and normal_product(a, one) == a, f"identity does not fix {a}")


def _normal_matches_composition(ctx: CheckContext) -> None:
    a, b = (gen.random_normal_form(ctx.rng, ctx.spec, "unit") for _ in range(2))
    composed = compose_aut(as_automorphism(a), as_automorphism(b))
    expect(as_automorphism(normal_product(a, b)) == composed, f"product of {a}, {b} differs from composition")


def _reduced_multiplicative(ctx: CheckContext) -> None:
    a, b = (gen.random_normal_form(ctx.rng, ctx.spec) for _ in range(2))
    expect(normal_product(a, b).reduce() == a.reduce() * b.reduce(), f"reduction of {a} * {b}")


def _subgroups_closed(ctx: CheckContext) -> None:
    # from_laurent raises OutOfSubgroup when the support leaves the subgroup
    n1, n2 = gen.random_neg(ctx.rng, ctx.spec), gen.random_neg(ctx.rng, ctx.spec)
    p1, p2 = gen.random_pos(ctx.rng, ctx.spec), gen.random_pos(ctx.rng, ctx.spec)
    expect(isinstance(n1.compose(n2), NegAut), "negative subgroup")
    expect(isinstance(p1.compose(p2), PosAut), "positive subgroup")
    expect(n1.compose(n1.inverse()).is_identity(), f"{n1} o {n1}^-1")


# =============================================================================
# annuli
# =============================================================================

def _chart_round_trip(ctx: CheckContext) -> None:
    annulus = gen.random_annulus(ctx.rng, ctx.spec)
    expect(from_monoid_chart(to_monoid_chart(annulus)) == annulus, f"chart round trip of {annulus}")


def _lift_pair(a: FramedAnnulus, b: FramedAnnulus) -> tuple[FramedAnnulus, FramedAnnulus]:
    target = a.spec.with_params("s", "t")
    return lift_generic(a, "s", target), lift_generic(b, "t", target)


def _transition_law(ctx: CheckContext) -> None:
    a, b = _lift_pair(gen.random_annulus(ctx.rng, ctx.spec), gen.random_annulus(ctx.rng, ctx.spec))
    glued = transition(glue_annuli(a, b))
    expect(glued == compose_transitions(transition(a), transition(b)), "transition of a glued annulus")


def _specialization(ctx: CheckContext) -> None:
    a = gen.random_annulus(ctx.rng, ctx.spec)
    b = gen.random_annulus(ctx.rng, ctx.spec)
    la, lb = _lift_pair(a, b)
    special = specialize_annulus(glue_annuli(la, lb), {"s": a.t, "t": b.t}, ctx.spec)
    expect(special == glue_annuli(a, b), "specializing the generic gluing")


def _untwisted_multiply(ctx: CheckContext) -> None:
    s = gen.random_ring_elem(ctx.rng, ctx.spec, "nilpotent")
    t = gen.random_ring_elem(ctx.rng, ctx.spec, "nilpotent")
    glued = glue_annuli(FramedAnnulus.untwisted(s), FramedAnnulus.untwisted(t))
    expect(glued == FramedAnnulus.untwisted(s * t), "untwisted annuli multiply their parameters")


# =============================================================================
# corolla
# =============================================================================

def _axioms(directed: bool) -> Callable[[CheckContext], None]:
    def check(ctx: CheckContext) -> None:
        report = check_operadic_axioms(ctx.config.corolla, directed)
        expect(report.passed, "; ".join(report.counterexamples[:3]))

    return check


def _mutations(ctx: CheckContext) -> None:
    report = mutation_harness(ctx.config.corolla, True, ctx.config.seed)
    expect(
        report.rate >= ctx.config.mutation_threshold,
        f"detected {report.detected}/{report.total}, missed {report.undetected}",
    )


def _collapse_genus(ctx: CheckContext) -> None:
    graph = gen.random_modular_graph(ctx.rng)
    result = collapse(graph)
    expect(
        sum(c.genus for c in result.target) == graph.total_genus(),
        f"collapse genus of {graph.to_json()}",
    )
    morphism = from_graph(graph)
    expect(compose_morphisms(identity(morphism.source), morphism) == morphism, "left unit on a graph")


def _orders_agree(morphism, algebra, decorations=None) -> bool:
    pairs = contraction_orders(morphism)
    values = {evaluate_contraction(morphism, algebra, order, decorations)
              for order in itertools.permutations(pairs)}
    return len(values) == 1


def _terminal_orders(ctx: CheckContext) -> None:
    bounds = ctx.config.corolla
    for m in object_universe(bounds):
        for n in object_universe(bounds):
            for morphism in hom(m, n):
                expect(_orders_agree(morphism, TerminalAlgebra()), f"{morphism.to_json()}")


def _curve_orders(ctx: CheckContext) -> None:
    bounds = CorollaBounds(max_vertices=3, max_valence=3, max_genus=0, max_edges=4)
    bushes = [m for m in object_universe(bounds) if all(is_bush_corolla(c) for c in m)]
    algebra = CurveAlgebra(ctx.spec)
    for m in bushes:
        for n in bushes:
            for morphism in hom(m, n):
                decorations = [
                    gen.random_corolla_curve(ctx.rng, ctx.spec, ctx.labels, num_inputs=c.valence - 1)
                    for c in morphism.source
                ]
                expect(_orders_agree(morphism, algebra, decorations), f"{morphism.to_json()}")


# =============================================================================
# fld
# =============================================================================

def _curves(ctx: CheckContext, count: int) -> list[StableTreeCurve]:
    return [gen.random_curve(ctx.rng, ctx.spec, ctx.labels, max_components=2) for _ in range(count)]


def _nested_associative(ctx: CheckContext) -> None:
    x, y, z = _curves(ctx, 3)
    i = ctx.rng.randint(1, x.num_inputs)
    j = ctx.rng.randint(1, y.num_inputs)
    left = stable_glue(stable_glue(x, i, y), i + j - 1, z)
    right = stable_glue(x, i, stable_glue(y, j, z))
    expect(left == right, f"nested associativity at slots {i}, {j}")


def _parallel_associative(ctx: CheckContext) -> None:
    x, y, z = _curves(ctx, 3)
    if x.num_inputs < 2:
        x = stable_glue(x, 1, gen.random_corolla_curve(ctx.rng, ctx.spec, ctx.labels, num_inputs=2))
    i, k = sorted(ctx.rng.sample(range(1, x.num_inputs + 1), 2))
    left = stable_glue(stable_glue(x, i, y), k + y.num_inputs - 1, z)
    right = stable_glue(stable_glue(x, k, z), i, y)
    expect(left == right, f"parallel associativity at slots {i}, {k}")


def _equivariant(ctx: CheckContext) -> None:
    x, y = _curves(ctx, 2)
    n, m = x.num_inputs, y.num_inputs
    perm = list(range(1, n + 1))
    ctx.rng.shuffle(perm)
    k = ctx.rng.randint(1, n)
    p = perm[k - 1]

    def position(s: int) -> int:
        return s if s < p else s + m - 1

    block = [position(perm[q - 1]) for q in range(1, k)]
    block += [p + j - 1 for j in range(1, m + 1)]
    block += [position(perm[q - 1]) for q in range(k + 1, n + 1)]
    left = stable_glue(relabel_inputs(x, perm), k, y)
    right = relabel_inputs(stable_glue(x, p, y), block)
    expect(left == right, f"equivariance along {perm} at slot {k}")


def _angle_multiplicative(ctx: CheckContext) -> None:
    x, y = _curves(ctx, 2)
    i = ctx.rng.randint(1, x.num_inputs)
    j = ctx.rng.randint(1, y.num_inputs)
    glued = stable_glue(x, i, y)
    expect(angle(glued, i + j - 1) == normal_product(angle(x, i), angle(y, j)), f"angle at {i}, {j}")
    for s in range(1, x.num_inputs + 1):
        if s != i:
            t = s if s < i else s + y.num_inputs - 1
            expect(angle(glued, t) == angle(x, s), f"angle of untouched slot {s}")


def _unit_action(ctx: CheckContext) -> None:
    (x,) = _curves(ctx, 1)
    one = unit_curve(ctx.spec)
    slot = ctx.rng.randint(1, x.num_slots)
    expect(annulus_act(NormalForm.identity(ctx.spec), x, slot) == x, f"unit annulus on slot {slot}")
    expect(stable_glue(one, 1, x) == x, "unit curve on the outgoing side")
    i = ctx.rng.randint(1, x.num_inputs)
    expect(stable_glue(x, i, one) == x, f"unit curve in slot {i}")
    a = gen.random_normal_form(ctx.rng, ctx.spec, "nilpotent")
    expect(annulus_act(a, x, i) == stable_glue(x, i, annulus_curve(a)), "action is gluing an annulus curve")


def _reduced_union(ctx: CheckContext) -> None:
    x, y = _curves(ctx, 2)
    i = ctx.rng.randint(1, x.num_inputs)
    glued = stable_glue(x, i, y)
    expect(
        reduce_curve(glued) == reduce_curve(stable_glue(reduce_curve(x), i, reduce_curve(y))),
        "reduction commutes with gluing",
    )
    shadow = hour_reduced(glued)
    expect(shadow.is_stable(), "hourglass shadow is stable")
    expect(len(shadow.marks) == len(glued.marks) + 2 * glued.num_slots, "hourglass mark count")


def _hourglass_orbit(ctx: CheckContext) -> None:
    (x,) = _curves(ctx, 1)
    shadow = hour_reduced(x)
    for kind in ("trivial", "nilpotent"):
        slot = ctx.rng.randint(1, x.num_slots)
        a = gen.random_normal_form(ctx.rng, ctx.spec, kind)
        expect(hour_reduced(annulus_act(a, x, slot)) == shadow, f"{kind} annulus on slot {slot} moves the shadow")


def _gauge_invariant(ctx: CheckContext) -> None:
    (x,) = _curves(ctx, 1)
    maps = {v: gen.random_mobius(ctx.rng, ctx.spec) for v in range(x.num_components) if ctx.rng.random() < 0.7}
    expect(canonicalize(twist(x, maps)) == x, "canonical form depends on coordinates")


def _annulus_agreement(ctx: CheckContext) -> None:
    a, b = gen.random_annulus(ctx.rng, ctx.spec), gen.random_annulus(ctx.rng, ctx.spec)
    glued = stable_glue(annulus_curve(to_monoid_chart(a)), 1, annulus_curve(to_monoid_chart(b)))
    expect(glued == annulus_curve(to_monoid_chart(glue_annuli(a, b))), "curve gluing of annuli")


# =============================================================================
# comm
# =============================================================================

def _trivial_comm(ctx: CheckContext) -> None:
    for arity in range(6):
        expect(len(TRIVIAL_COMM.operations(arity)) == 1, f"arity {arity}")


def _comm_map(ctx: CheckContext) -> None:
    x, y = _curves(ctx, 2)
    i = ctx.rng.randint(1, x.num_inputs)
    comm = annulus_comm_operad(ctx.spec)
    left = comm_g_map(stable_glue(x, i, y))
    right = comm.compose(comm_g_map(x), i, comm_g_map(y))
    expect(left == right, f"angle map does not respect gluing at slot {i}")


def _comm_associative(ctx: CheckContext) -> None:
    comm = annulus_comm_operad(ctx.spec)
    g, h, k = (
        tuple(gen.random_normal_form(ctx.rng, ctx.spec) for _ in range(ctx.rng.randint(1, 3)))
        for _ in range(3)
    )
    i = ctx.rng.randint(1, len(g))
    j = ctx.rng.randint(1, len(h))
    left = comm.compose(comm.compose(g, i, h), i + j - 1, k)
    right = comm.compose(g, i, comm.compose(h, j, k))
    expect(left == right, "Comm composition is not associative")


SUITES: dict[Suite, list[Property]] = {
    Suite.ARTIN: [
        Property("ring_inverse", _ring_inverse),
        Property("ring_distributive", _ring_distributive),
        Property("compositional_inverse", _compositional_inverse),
        Property("substitution_associative", _substitution_associative),
    ],
    Suite.WITT: [
        Property("factor_round_trip", _factor_round_trip),
        Property("factor_unique", _factor_unique),
        Property("normal_associative", _normal_associative),
        Property("normal_unital", _normal_unital),
        Property("normal_matches_composition", _normal_matches_composition),
        Property("reduced_multiplicative", _reduced_multiplicative),
        Property("subgroups_closed", _subgroups_closed),
    ],
    Suite.ANNULI: [
        Property("chart_round_trip", _chart_round_trip),
        Property("transition_law", _transition_law),
        Property("specialization", _specialization),
        Property("untwisted_multiply", _untwisted_multiply),
    ],
    Suite.COROLLA: [
        Property("axioms_directed", _axioms(True), exhaustive=True),
        Property("axioms_undirected", _axioms(False), exhaustive=True),
        Property("mutation_detection", _mutations, exhaustive=True),
        Property("collapse_genus", _collapse_genus),
        Property("terminal_contraction_orders", _terminal_orders, exhaustive=True),
        Property("curve_contraction_orders", _curve_orders, exhaustive=True),
    ],
    Suite.FLD: [
        Property("nested_associative", _nested_associative),
        Property("parallel_associative", _parallel_associative),
        Property("equivariant", _equivariant),
        Property("angle_multiplicative", _angle_multiplicative),
        Property("unit_action", _unit_action),
        Property("reduced_union", _reduced_union),
        Property("hourglass_orbit", _hourglass_orbit),
        Property("gauge_invariant", _gauge_invariant),
        Property("annulus_agreement", _annulus_agreement),
    ],
    Suite.COMM: [
        Property("trivial_comm", _trivial_comm, exhaustive=True),
        Property("comm_map", _comm_map),
        Property("comm_associative", _comm_associative),
    ],
}


# =============================================================================
# Runner
# =============================================================================

class CheckRunner:
    """Runs property suites and reports progress through callbacks.

    Flow: pick suites -> run each property for its trials -> collect results.
    """

    def __init__(
        self,
        config: CheckConfig,
        on_state: Optional[Callable[[CheckState], None]] = None,
        on_result: Optional[Callable[[PropertyResult], None]] = None,
        on_error: Optional[Callable[[str], None]] = None,
    ):
        """Initialize runner.

        Args:
            config: Seeds, trial counts and bounds.
            on_state: Called when state changes.
            on_result: Called after every property.
            on_error: Called with the first failure of a property.
        """
        self.config = config
        self.on_state = on_state
        self.on_result = on_result
        self.on_error = on_error
        self._state = CheckState.IDLE

    @property
    def state(self) -> CheckState:
        return self._state

    def _set_state(self, state: CheckState) -> None:
        if self._state != state:
            self._state = state
            logger.debug(f"State: {state.value}")
            if self.on_state:
                try:
                    self.on_state(state)
                except Exception as e:
                    logger.error(f"State callback error: {e}")

    def _handle_error(self, message: str) -> None:
        logger.warning(message)
        if self.on_error:
            try:
                self.on_error(message)
            except Exception:
                pass

    def run(self, suite: Suite = Suite.ALL) -> list[SuiteReport]:
        """Run one suite, or every suite for ``Suite.ALL``."""
        suites = [s for s in SUITES if suite in (Suite.ALL, s)]
        self._set_state(CheckState.RUNNING)
        try:
            return [self.run_suite(s) for s in suites]
        finally:
            self._set_state(CheckState.DONE)

    def run_suite(self, suite: Suite) -> SuiteReport:
        spec = self.config.spec()
        report = SuiteReport(suite=suite.value, seed=self.config.seed, ring=spec.to_json())
        logger.info(f"Running suite {suite.value} (seed={self.config.seed}, trials={self.config.trials_for(suite.value)})")
        for prop in SUITES[suite]:
            result = self._run_property(suite, prop, spec)
            report.results.append(result)
            if self.on_result:
                try:
                    self.on_result(result)
                except Exception as e:
                    logger.error(f"Result callback error: {e}")
        logger.info(f"Suite {suite.value}: {'passed' if report.passed else 'FAILED'}")
        return report

    def _run_property(self, suite: Suite, prop: Property, spec: ArtinSpec) -> PropertyResult:
        ctx = CheckContext(
            rng=random.Random(f"{self.config.seed}:{suite.value}:{prop.name}"),
            spec=spec,
            config=self.config,
        )
        result = PropertyResult(suite=suite.value, name=prop.name)
        trials = 1 if prop.exhaustive else self.config.trials_for(suite.value)
        start = time.monotonic()
        for trial in range(trials):
            result.trials += 1
            try:
                prop.check(ctx)
            except (PropertyFailure, FormalCurvesError) as e:
                result.failures += 1
                if result.detail is None:
                    code = getattr(e, "code", "PropertyFailure")
                    result.detail = f"trial {trial}: {code}: {e}"
                    self._handle_error(f"{suite.value}.{prop.name} failed: {result.detail}")
        result.seconds = round(time.monotonic() - start, 3)
        logger.info(f"{suite.value}.{prop.name}: {result.trials - result.failures}/{result.trials} passed")
        return result
