"""A prefix expression language over the formalcurves library.

Programs are s-expressions such as

    (nprod (nf (neg eps) 0 (pos)) (nf (neg) t (pos eps)))

Atoms are integers, rationals ``p/q``, the nilpotent variables ``e1..em``
(``eps`` is ``e1``), ``u`` for the Laurent variable, names bound with
``(def name expr)``, and otherwise generic invertible parameters that are
adjoined to the ring. ``()`` is the identity of A^- or A^+ wherever one is
expected.

A program is parsed, type checked in one pass, then evaluated; the value of
its last expression is rendered as JSON.
"""

import functools
import json
import logging
import operator
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional, Union

from formalcurves import annuli, corolla, fld, witt
from formalcurves.artin import ArtinSpec, LaurentPoly, RingElem, compositional_inverse, laurent_substitute
from formalcurves.errors import DslSyntaxError, DslTypeError, FormalCurvesError


logger = logging.getLogger(__name__)


# =============================================================================
# Syntax
# =============================================================================

@dataclass(frozen=True)
class Atom:
    text: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Form:
    items: tuple["Expr", ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


Expr = Union[Atom, Form]

_INT_RE = re.compile(r"^-?\d+$")
_RATIONAL_RE = re.compile(r"^(-?\d+)/(\d+)$")
_SYMBOL_RE = re.compile(r"^[A-Za-z_*][A-Za-z0-9_?*\-]*$")
_PARAM_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_VAR_RE = re.compile(r"^e(\d+)$")

_DELIMITERS = " \t\r\n;()"
MAX_NESTING = 200


def tokenize(source: str) -> list[tuple[str, int, int]]:
    """Split source into "(", ")" and atom tokens with 1-based positions.

    The list ends with an empty token marking the end of input.

    Raises:
        DslSyntaxError: On a malformed atom.
    """
    tokens = []
    line, column, i = 1, 1, 0
    while i < len(source):
        ch = source[i]
        if ch == "\n":
            line, column, i = line + 1, 1, i + 1
        elif ch in " \t\r":
            column, i = column + 1, i + 1
        elif ch == ";":
            while i < len(source) and source[i] != "\n":
                i += 1
        elif ch in "()":
            tokens.append((ch, line, column))
            column, i = column + 1, i + 1
        else:
            start = i
            while i < len(source) and source[i] not in _DELIMITERS:
                i += 1
            text = source[start:i]
            _validate_atom(text, line, column)
            tokens.append((text, line, column))
            column += i - start
    tokens.append(("", line, column))
    return tokens


def _validate_atom(text: str, line: int, column: int) -> None:
    match = _RATIONAL_RE.match(text)
    if match:
        if int(match.group(2)) == 0:
            raise DslSyntaxError(f"zero denominator in {text}", line, column)
        return
    if not (_INT_RE.match(text) or _SYMBOL_RE.match(text)):
        raise DslSyntaxError(f"invalid atom {text!r}", line, column)


def parse(source: str) -> tuple[Expr, ...]:
    """Parse a program: one or more expressions.

    Forms are assembled on an explicit stack and may nest at most MAX_NESTING
    deep, which also bounds the recursion of the checker and the evaluator.

    Raises:
        DslSyntaxError: With the line and column of the offending token.
    """
    program: list[Expr] = []
    open_forms: list[tuple[list[Expr], int, int]] = []
    for text, line, column in tokenize(source):
        if text == "":
            if open_forms:
                raise DslSyntaxError("unexpected end of input, expected ')'", line, column)
            if not program:
                raise DslSyntaxError("empty program", line, column)
            break
        if text == "(":
            if len(open_forms) >= MAX_NESTING:
                raise DslSyntaxError(f"forms nest deeper than {MAX_NESTING} levels", line, column)
            open_forms.append(([], line, column))
            continue
        if text == ")":
            if not open_forms:
                raise DslSyntaxError("unexpected ')'", line, column)
            items, start_line, start_column = open_forms.pop()
            expr: Expr = Form(tuple(items), start_line, start_column)
        else:
            expr = Atom(text, line, column)
        (open_forms[-1][0] if open_forms else program).append(expr)
    return tuple(program)


def serialize(expr: Expr) -> str:
    if isinstance(expr, Atom):
        return expr.text
    return "(" + " ".join(serialize(item) for item in expr.items) + ")"


def serialize_program(program: tuple[Expr, ...]) -> str:
    return "\n".join(serialize(expr) for expr in program)


# =============================================================================
# Operations
# =============================================================================

_COERCIONS = {
    ("int", "ring"),
    ("int", "laurent"),
    ("ring", "laurent"),
    ("laurent", "aut"),
    ("empty", "neg"),
    ("empty", "pos"),
}


def _accepts(expected: str, actual: str) -> bool:
    return any(actual == option or (actual, option) in _COERCIONS for option in expected.split("|"))


@dataclass(frozen=True)
class Op:
    params: tuple[str, ...]
    result: Union[str, Callable[[list[str]], str]]
    fn: Callable[..., Any]
    rest: Optional[str] = None
    min_rest: int = 0

    def signature(self) -> str:
        parts = list(self.params) + ([f"{self.rest}..."] if self.rest else [])
        return " ".join(parts)


def _same_subgroup(kinds: list[str]) -> str:
    if kinds[0] == "empty" or any(k != kinds[0] for k in kinds):
        raise DslTypeError(
            "expected automorphisms of one unipotent subgroup",
            "neg neg | pos pos",
            " ".join(kinds),
        )
    return kinds[0]


def _directed(objects) -> bool:
    return not any(d == corolla.Direction.NONE for c in objects for d in c.directions)


def _stable(spec: ArtinSpec, value) -> bool:
    if isinstance(value, corolla.CorollaMorphism):
        return corolla.is_stable(value)
    if isinstance(value, corolla.Corolla):
        return corolla.is_stable(value, _directed([value]))
    return corolla.is_stable(value, _directed(value))


OPS: dict[str, Op] = {
    # ring
    "radd": Op((), "ring", lambda s, *a: functools.reduce(operator.add, a), rest="ring", min_rest=1),
    "rsub": Op(("ring", "ring"), "ring", lambda s, a, b: a - b),
    "rmul": Op((), "ring", lambda s, *a: functools.reduce(operator.mul, a), rest="ring", min_rest=1),
    "rneg": Op(("ring",), "ring", lambda s, a: -a),
    "rpow": Op(("ring", "int"), "ring", lambda s, a, k: a ** k),
    "rinv": Op(("ring",), "ring", lambda s, a: a.invert()),
    "rdiv": Op(("ring", "ring"), "ring", lambda s, a, b: a / b),
    "rred": Op(("ring",), "ring", lambda s, a: a.reduce()),
    # Laurent polynomials
    "ladd": Op(("laurent", "laurent"), "laurent", lambda s, f, g: f + g),
    "lmul": Op((), "laurent", lambda s, *f: functools.reduce(operator.mul, f), rest="laurent", min_rest=1),
    "linv": Op(("laurent",), "laurent", lambda s, f: f.inverse()),
    "reflect": Op(("laurent",), "laurent", lambda s, f: f.reflect()),
    "subst": Op(("laurent", "laurent"), "laurent", lambda s, f, g: laurent_substitute(f, g)),
    "cinv": Op(("laurent",), "laurent", lambda s, g: compositional_inverse(g)),
    # automorphisms and normal forms
    "aut": Op(("aut",), "aut", lambda s, f: f),
    "acomp": Op(("aut", "aut"), "aut", lambda s, f, g: witt.compose_aut(f, g)),
    "ainv": Op(("aut",), "aut", lambda s, f: witt.invert_aut(f)),
    "neg": Op((), "neg", lambda s, *c: witt.NegAut(s, c), rest="ring"),
    "pos": Op((), "pos", lambda s, *c: witt.PosAut(s, c), rest="ring"),
    "dcomp": Op(("neg|pos", "neg|pos"), _same_subgroup, lambda s, a, b: a.compose(b)),
    "dinv": Op(("neg|pos",), _same_subgroup, lambda s, a: a.inverse()),
    "nf": Op(("neg", "ring", "pos"), "nf", lambda s, n, m, p: witt.NormalForm(n, m, p)),
    "nprod": Op((), "nf", lambda s, *a: functools.reduce(witt.normal_product, a), rest="nf", min_rest=1),
    "npow": Op(("nf", "int"), "nf", lambda s, a, k: witt.normal_power(a, k)),
    "factor": Op(("aut",), "nf", lambda s, f: witt.birkhoff_factor(f)),
    "as-aut": Op(("nf",), "aut", lambda s, a: witt.as_automorphism(a)),
    "scale-neg": Op(("neg", "ring"), "neg", lambda s, d, c: witt.scale_conjugate_neg(d, c)),
    "scale-pos": Op(("pos", "ring"), "pos", lambda s, d, c: witt.scale_conjugate_pos(d, c)),
    # annuli
    "ann": Op(("neg", "ring", "neg"), "annulus", lambda s, a, t, b: annuli.FramedAnnulus(a, t, b)),
    "glue": Op((), "annulus", lambda s, *a: functools.reduce(annuli.glue_annuli, a), rest="annulus", min_rest=1),
    "chart": Op(("annulus",), "nf", lambda s, a: annuli.to_monoid_chart(a)),
    "unchart": Op(("nf",), "annulus", lambda s, a: annuli.from_monoid_chart(a)),
    "transition": Op(("annulus",), "laurent", lambda s, a: annuli.transition(a)),
    "transition-generic": Op(("annulus",), "laurent", lambda s, a: annuli.transition_generic(a)),
    "compose-transitions": Op(("laurent", "laurent"), "laurent", lambda s, f, g: annuli.compose_transitions(f, g)),
    # graphs and multicorollas
    "full-split": Op(("graph",), "graph", lambda s, g: corolla.full_split(g)),
    "collapse": Op(("graph",), "collapse", lambda s, g: corolla.collapse(g)),
    "ucollapse": Op(("graph",), "collapse", lambda s, g: corolla.collapse(g, directed=False)),
    "betti": Op(("graph",), "int", lambda s, g: g.graph.betti_number()),
    "genus": Op(("graph",), "int", lambda s, g: g.total_genus()),
    "mc": Op((), "multicorolla", lambda s, *c: tuple(c), rest="corolla"),
    "id": Op(("multicorolla",), "morphism", lambda s, m: corolla.identity(m, _directed(m))),
    "morph": Op(("graph",), "morphism", lambda s, g: corolla.from_graph(g)),
    "umorph": Op(("graph",), "morphism", lambda s, g: corolla.from_graph(g, directed=False)),
    "forget": Op(("morphism",), "morphism", lambda s, p: corolla.forget_orientation(p)),
    "compose": Op(("morphism", "morphism"), "morphism", lambda s, p, q: corolla.compose_morphisms(p, q)),
    "union": Op(("morphism", "morphism"), "morphism", lambda s, p, q: corolla.union_morphisms(p, q)),
    "relabel": Op(("multicorolla",), "morphism", lambda s, m, *k: corolla.relabel(m, k, _directed(m)), rest="int"),
    "pi": Op(("morphism",), "map", lambda s, p: corolla.project_to_fin(p)),
    "stable?": Op(("corolla|multicorolla|morphism",), "bool", _stable),
    "bush?": Op(("morphism",), "bool", lambda s, p: corolla.is_bush_morphism(p)),
    "hom": Op(("multicorolla", "multicorolla"), "morphisms",
              lambda s, m, n: corolla.hom(m, n, _directed(m + n))),
    "contract": Op(("morphism",), "multicorolla",
                   lambda s, p: corolla.evaluate_contraction(p, corolla.TerminalAlgebra())),
    # genus-0 curves
    "annulus-curve": Op(("nf",), "curve", lambda s, a: fld.annulus_curve(a)),
    "unit-curve": Op((), "curve", lambda s: fld.unit_curve(s)),
    "sglue": Op(("curve", "int", "curve"), "curve", lambda s, x, i, y: fld.stable_glue(x, i, y)),
    "act": Op(("nf", "curve", "int"), "curve", lambda s, a, x, i: fld.annulus_act(a, x, i)),
    "angle": Op(("curve", "int"), "nf", lambda s, x, i: fld.angle(x, i)),
    "angles": Op(("curve",), "nfs", lambda s, x: fld.comm_g_map(x)),
    "hour": Op(("curve",), "tree", lambda s, x: fld.hour_reduced(x)),
    "canon": Op(("curve",), "curve", lambda s, x: fld.canonicalize(x)),
    "reduce-curve": Op(("curve",), "curve", lambda s, x: fld.reduce_curve(x)),
    "relabel-inputs": Op(("curve",), "curve", lambda s, x, *p: fld.relabel_inputs(x, p), rest="int"),
}

SPECIAL_FORMS = ("def", "laurent", "graph", "split", "c", "corolla")

_RESERVED = set(OPS) | set(SPECIAL_FORMS) | {"u", "eps"}


# =============================================================================
# Checker and evaluator
# =============================================================================

def _where(expr: Expr) -> str:
    return f"{expr.line}:{expr.column}"


def _kind_of_static(expr: Expr) -> str:
    return "list" if isinstance(expr, Form) else "atom"


class Interpreter:
    """Type checks then evaluates programs over a base ring.

    Generic parameters met while checking are adjoined to the base ring in
    order of first appearance; ``spec`` is the resulting ring.
    """

    def __init__(self, base: ArtinSpec):
        self.base = base
        self.spec = base
        self.params: list[str] = []

    # -- static helpers -------------------------------------------------------

    def _add_param(self, name: str) -> None:
        if name not in self.params and name not in self.base.params:
            self.params.append(name)

    def _symbol(self, expr: Expr, what: str) -> str:
        if not isinstance(expr, Atom) or not _SYMBOL_RE.match(expr.text):
            raise DslTypeError(f"{_where(expr)}: expected {what}", what, _kind_of_static(expr))
        return expr.text

    def _int_literal(self, expr: Expr, what: str) -> int:
        if not isinstance(expr, Atom) or not _INT_RE.match(expr.text):
            raise DslTypeError(f"{_where(expr)}: expected {what}", "int", _kind_of_static(expr))
        return int(expr.text)

    def _pair(self, expr: Expr, what: str) -> tuple[Expr, ...]:
        if not isinstance(expr, Form) or len(expr.items) != 2:
            raise DslTypeError(f"{_where(expr)}: expected {what}", what, _kind_of_static(expr))
        return expr.items

    def _graph_parts(self, expr: Form) -> tuple[list[tuple[str, int]], list[tuple[str, str, str]]]:
        sections = {"vertices": [], "edges": []}
        for item in expr.items[1:]:
            if not isinstance(item, Form) or not item.items or not isinstance(item.items[0], Atom) \
                    or item.items[0].text not in sections:
                raise DslTypeError(f"{_where(item)}: expected (vertices ...) or (edges ...)", "graph section",
                                   _kind_of_static(item))
            sections[item.items[0].text].extend(item.items[1:])
        vertices = []
        for v in sections["vertices"]:
            if isinstance(v, Atom):
                vertices.append((self._symbol(v, "vertex name"), 0))
            else:
                name, genus = self._pair(v, "(vertex genus)")
                vertices.append((self._symbol(name, "vertex name"), self._int_literal(genus, "genus")))
        edges = []
        for e in sections["edges"]:
            if not isinstance(e, Form) or len(e.items) != 3:
                raise DslTypeError(f"{_where(e)}: expected (edge source target)", "edge", _kind_of_static(e))
            edges.append(tuple(self._symbol(x, "edge end") for x in e.items))
        return vertices, edges

    def _corolla_parts(self, expr: Form) -> tuple[int, tuple[corolla.Direction, ...]]:
        if len(expr.items) < 2:
            raise DslTypeError(f"{_where(expr)}: c expects a genus", "int direction...", "")
        genus = self._int_literal(expr.items[1], "genus")
        dirs = []
        for item in expr.items[2:]:
            text = self._symbol(item, "in, out or none")
            if text not in ("in", "out", "none"):
                raise DslTypeError(f"{_where(item)}: expected in, out or none", "direction", text)
            dirs.append(corolla.Direction(text))
        return genus, tuple(dirs)

    def _split_parts(self, expr: Form) -> dict[str, int]:
        counts = {}
        for item in expr.items[2:]:
            edge, k = self._pair(item, "(edge multiplicity)")
            counts[self._symbol(edge, "edge name")] = self._int_literal(k, "multiplicity")
        return counts

    def _expect_count(self, expr: Form, name: str, low: int, high: Optional[int] = None) -> None:
        n = len(expr.items) - 1
        if n < low or (high is not None and n > high):
            raise DslTypeError(f"{_where(expr)}: wrong number of arguments to {name}",
                               str(low) if high == low else f"at least {low}", str(n))

    def _match(self, name: str, op: Op, kinds: list[str], expr: Form) -> str:
        fixed = len(op.params)
        ok = len(kinds) >= fixed + op.min_rest and (op.rest is not None or len(kinds) == fixed)
        if ok:
            expected = list(op.params) + [op.rest] * (len(kinds) - fixed)
            ok = all(_accepts(e, k) for e, k in zip(expected, kinds))
        if not ok:
            raise DslTypeError(
                f"{_where(expr)}: {name} expects ({op.signature()}), got ({' '.join(kinds)})",
                op.signature(),
                " ".join(kinds),
            )
        return op.result(kinds) if callable(op.result) else op.result

    def _head(self, expr: Form) -> str:
        head = expr.items[0]
        if not isinstance(head, Atom) or head.text not in _RESERVED or head.text in ("u", "eps"):
            text = head.text if isinstance(head, Atom) else "list"
            raise DslTypeError(f"{_where(head)}: unknown operation {text}", "operation", text)
        return head.text

    # -- checking -------------------------------------------------------------

    def check(self, program: tuple[Expr, ...]) -> str:
        """Kind of the program's value; fixes ``spec``.

        Raises:
            DslTypeError: On the first ill-typed expression.
        """
        env: dict[str, str] = {}
        kind = "empty"
        for expr in program:
            kind = self._check(expr, env)
        self.spec = self.base.with_params(*self.params)
        return kind

    def _check_atom(self, atom: Atom, env: dict) -> str:
        text = atom.text
        if _INT_RE.match(text):
            return "int"
        if _RATIONAL_RE.match(text):
            return "ring"
        if text in env:
            return env[text]
        if text == "u":
            return "laurent"
        var = _VAR_RE.match(text)
        if text == "eps" or var:
            index = int(var.group(1)) if var else 1
            if not 1 <= index <= self.base.num_vars:
                raise DslTypeError(f"{_where(atom)}: {text} is not a variable of {self.base.describe()}",
                                   f"e1..e{self.base.num_vars}", text)
            return "ring"
        if text in _RESERVED:
            raise DslTypeError(f"{_where(atom)}: operation {text} used as a value", "value", "operation")
        if not _PARAM_RE.match(text):
            raise DslTypeError(f"{_where(atom)}: {text} is not a parameter name", "parameter", text)
        self._add_param(text)
        return "ring"

    def _check(self, expr: Expr, env: dict) -> str:
        if isinstance(expr, Atom):
            return self._check_atom(expr, env)
        if not expr.items:
            return "empty"
        name = self._head(expr)
        if name == "def":
            self._expect_count(expr, name, 2, 2)
            target = self._symbol(expr.items[1], "a name")
            if target in _RESERVED or _VAR_RE.match(target):
                raise DslTypeError(f"{_where(expr.items[1])}: cannot bind {target}", "name", target)
            env[target] = self._check(expr.items[2], env)
            return env[target]
        if name == "laurent":
            for item in expr.items[1:]:
                exp, coeff = self._pair(item, "(exponent coefficient)")
                self._int_literal(exp, "exponent")
                kind = self._check(coeff, env)
                if not _accepts("ring", kind):
                    raise DslTypeError(f"{_where(coeff)}: coefficient must be a ring element", "ring", kind)
            return "laurent"
        if name == "graph":
            self._graph_parts(expr)
            return "graph"
        if name == "split":
            self._expect_count(expr, name, 1)
            kind = self._check(expr.items[1], env)
            if kind != "graph":
                raise DslTypeError(f"{_where(expr.items[1])}: split expects a graph", "graph", kind)
            self._split_parts(expr)
            return "graph"
        if name == "c":
            self._corolla_parts(expr)
            return "corolla"
        if name == "corolla":
            self._expect_count(expr, name, 1)
            kind = self._check(expr.items[1], env)
            if kind != "int":
                raise DslTypeError(f"{_where(expr.items[1])}: corolla expects an input count", "int", kind)
            for item in expr.items[2:]:
                self._symbol(item, "mark label")
            return "curve"
        if name == "transition-generic":
            self._add_param("t")
        op = OPS[name]
        kinds = [self._check(arg, env) for arg in expr.items[1:]]
        return self._match(name, op, kinds, expr)

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, program: tuple[Expr, ...]) -> tuple[str, Any]:
        """(kind, value) of the last expression; call check first."""
        env: dict[str, tuple[str, Any]] = {}
        result: tuple[str, Any] = ("empty", None)
        for expr in program:
            result = self._eval(expr, env)
        return result

    def _convert(self, value: Any, actual: str, expected: str) -> Any:
        options = expected.split("|")
        if actual in options:
            return value
        target = next(o for o in options if (actual, o) in _COERCIONS)
        if target == "ring":
            return RingElem.scalar(self.spec, value)
        if target == "laurent":
            return LaurentPoly.constant(self.spec, value)
        if target == "aut":
            return witt.WittAut.from_laurent(value)
        if target == "neg":
            return witt.NegAut.identity(self.spec)
        return witt.PosAut.identity(self.spec)

    def _eval_atom(self, atom: Atom, env: dict) -> tuple[str, Any]:
        text = atom.text
        if _INT_RE.match(text):
            return "int", int(text)
        match = _RATIONAL_RE.match(text)
        if match:
            return "ring", RingElem.scalar(self.spec, Fraction(int(match.group(1)), int(match.group(2))))
        if text in env:
            return env[text]
        if text == "u":
            return "laurent", LaurentPoly.identity(self.spec)
        var = _VAR_RE.match(text)
        if text == "eps" or var:
            return "ring", RingElem.var(self.spec, int(var.group(1)) if var else 1)
        return "ring", RingElem.param(self.spec, text)

    def _eval(self, expr: Expr, env: dict) -> tuple[str, Any]:
        if isinstance(expr, Atom):
            return self._eval_atom(expr, env)
        if not expr.items:
            return "empty", None
        name = expr.items[0].text
        if name == "def":
            env[expr.items[1].text] = self._eval(expr.items[2], env)
            return env[expr.items[1].text]
        if name == "laurent":
            terms: dict[int, RingElem] = {}
            for item in expr.items[1:]:
                exp = int(item.items[0].text)
                kind, coeff = self._eval(item.items[1], env)
                coeff = self._convert(coeff, kind, "ring")
                terms[exp] = terms[exp] + coeff if exp in terms else coeff
            return "laurent", LaurentPoly(self.spec, terms)
        if name == "graph":
            vertices, edges = self._graph_parts(expr)
            return "graph", corolla.ModularGraph.build(vertices, edges)
        if name == "split":
            _, graph = self._eval(expr.items[1], env)
            return "graph", corolla.split(graph, self._split_parts(expr))
        if name == "c":
            return "corolla", corolla.Corolla(*self._corolla_parts(expr))
        if name == "corolla":
            _, n = self._eval(expr.items[1], env)
            return "curve", fld.corolla_curve(self.spec, n, [item.text for item in expr.items[2:]])

        op = OPS[name]
        args = [self._eval(arg, env) for arg in expr.items[1:]]
        kinds = [kind for kind, _ in args]
        expected = list(op.params) + [op.rest] * (len(args) - len(op.params))
        values = [self._convert(value, kind, e) for (kind, value), e in zip(args, expected)]
        logger.debug(f"{_where(expr)}: {name} on ({' '.join(kinds)})")
        result_kind = op.result(kinds) if callable(op.result) else op.result
        return result_kind, op.fn(self.spec, *values)


# =============================================================================
# Rendering
# =============================================================================

def _collapse_json(result: corolla.CollapseResult) -> dict:
    return {
        "target": corolla.multicorolla_to_json(result.target),
        "labeling": [
            {"edge": edge, "end": end, "corolla": c, "label": label}
            for (edge, end), (c, label) in sorted(result.labeling.items())
        ],
        "component_of": dict(sorted(result.component_of.items())),
    }


def encode(kind: str, value: Any) -> Any:
    """JSON value of an evaluated expression."""
    if kind in ("int", "bool"):
        return value
    if kind == "empty":
        return []
    if kind == "map":
        return list(value)
    if kind == "multicorolla":
        return corolla.multicorolla_to_json(value)
    if kind in ("morphisms", "nfs"):
        return [item.to_json() for item in value]
    if kind == "collapse":
        return _collapse_json(value)
    return value.to_json()


def render(kind: str, value: Any, spec: ArtinSpec) -> dict:
    doc = {"ring": spec.to_json(), "kind": kind, "value": encode(kind, value)}
    if kind in ("ring", "laurent"):
        doc["text"] = str(value)
    return doc


def error_doc(exc: FormalCurvesError) -> dict:
    return {"error": exc.to_dict()}


def dumps(doc: dict, pretty: bool = False, indent: int = 2) -> str:
    """Deterministic JSON text."""
    if pretty:
        return json.dumps(doc, sort_keys=True, indent=indent)
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def run_program(program: tuple[Expr, ...], spec: ArtinSpec) -> dict:
    interpreter = Interpreter(spec)
    interpreter.check(program)
    kind, value = interpreter.evaluate(program)
    return render(kind, value, interpreter.spec)


def run(source: str, spec: ArtinSpec) -> dict:
    """Parse, check and evaluate ``source`` over ``spec``.

    Raises:
        DslSyntaxError: On malformed input.
        DslTypeError: On an ill-typed program.
        FormalCurvesError: On a domain error during evaluation.
    """
    return run_program(parse(source), spec)
