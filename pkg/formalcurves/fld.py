"""Genus-0 framed formal curves over an Artin ring, as decorated dual trees.

A StableTreeCurve has projective-line components joined by nodes, framing
slots 1..f (slot f outgoing) and labeled marks. Every framing slot and every
node carries a germ: a point of the normal-form monoid recording the framing
reparametrization and smoothing data. Germs live in the coset gauge and are not
touched by Moebius changes of coordinates on the components.

Canonical form: vertices are numbered by a depth-first walk from the host of
the outgoing slot, children in order of their smallest leaf; on each component
the three special points with smallest keys are moved to 0, 1 and infinity.
A special point's key is (0, j) for slot j, (1, label) for a mark, and for a
node end the smallest key on the far side of the node.

A curve without components is an annulus: two slots whose germs multiply to
the annulus element, stored as (germ, unit).
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Optional, Sequence

from formalcurves.artin import ArtinSpec, RingElem
from formalcurves.corolla import Corolla, Direction
from formalcurves.errors import (
    ColorMismatch,
    InvalidCurve,
    SlotOutOfRange,
    UnstableCurve,
)
from formalcurves.witt import NormalForm, normal_product


logger = logging.getLogger(__name__)


# =============================================================================
# Projective line over the ring
# =============================================================================

@dataclass(frozen=True)
class ProjPoint:
    """A point [x:y] of P^1, normalized to [x/y:1] or [1:y/x]."""
    x: RingElem
    y: RingElem

    def __post_init__(self):
        self.x.spec.check(self.y.spec)
        if self.y.is_unit():
            x, y = self.x * self.y.invert(), RingElem.one(self.y.spec)
        elif self.x.is_unit():
            x, y = RingElem.one(self.x.spec), self.y * self.x.invert()
        else:
            raise InvalidCurve(f"[{self.x}:{self.y}] is not a point of the projective line")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def spec(self) -> ArtinSpec:
        return self.x.spec

    @classmethod
    def affine(cls, value: RingElem) -> "ProjPoint":
        return cls(value, RingElem.one(value.spec))

    @classmethod
    def infinity(cls, spec: ArtinSpec) -> "ProjPoint":
        return cls(RingElem.one(spec), RingElem.zero(spec))

    @classmethod
    def standard(cls, spec: ArtinSpec, index: int) -> "ProjPoint":
        """0, 1, infinity, 2, 3, ... for index 0, 1, 2, 3, 4, ..."""
        if index == 2:
            return cls.infinity(spec)
        value = index if index < 2 else index - 1
        return cls.affine(RingElem.scalar(spec, value))

    def reduce(self) -> "ProjPoint":
        return ProjPoint(self.x.reduce(), self.y.reduce())

    def __repr__(self) -> str:
        return f"[{self.x}:{self.y}]"

    def to_json(self) -> dict:
        return {"x": self.x.to_json(), "y": self.y.to_json()}

    @classmethod
    def from_json(cls, spec: ArtinSpec, data: Mapping) -> "ProjPoint":
        return cls(RingElem.from_json(spec, data["x"]), RingElem.from_json(spec, data["y"]))


def cross(p: ProjPoint, q: ProjPoint) -> RingElem:
    """x_p*y_q - x_q*y_p; a unit exactly when p and q differ modulo m."""
    return p.x * q.y - q.x * p.y


@dataclass(frozen=True)
class Mobius:
    """The projective transformation [x:y] -> [a*x + b*y : c*x + d*y]."""
    a: RingElem
    b: RingElem
    c: RingElem
    d: RingElem

    def __post_init__(self):
        if not (self.a * self.d - self.b * self.c).is_unit():
            raise InvalidCurve("Moebius transformation with non-unit determinant")

    def __call__(self, p: ProjPoint) -> ProjPoint:
        return ProjPoint(self.a * p.x + self.b * p.y, self.c * p.x + self.d * p.y)

    @classmethod
    def normalizing(cls, z1: ProjPoint, z2: ProjPoint, z3: ProjPoint) -> "Mobius":
        """The transformation sending z1, z2, z3 to 0, 1, infinity."""
        lam = cross(z2, z3)
        mu = cross(z2, z1)
        return cls(lam * z1.y, -(lam * z1.x), mu * z3.y, -(mu * z3.x))


# =============================================================================
# Curves
# =============================================================================

@dataclass(frozen=True)
class Node:
    child: int
    parent: int
    child_point: ProjPoint
    parent_point: ProjPoint
    germ: NormalForm

    @property
    def q(self) -> RingElem:
        """Smoothing parameter of the node."""
        return self.germ.mid


@dataclass(frozen=True)
class Framing:
    vertex: Optional[int]
    point: Optional[ProjPoint]
    germ: NormalForm


@dataclass(frozen=True)
class Mark:
    label: str
    vertex: int
    point: ProjPoint


@dataclass(frozen=True)
class StableTreeCurve:
    """A genus-0 framed formal curve; compare only canonicalized values."""
    spec: ArtinSpec
    num_components: int
    nodes: tuple[Node, ...] = ()
    framings: tuple[Framing, ...] = ()
    marks: tuple[Mark, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "framings", tuple(self.framings))
        object.__setattr__(self, "marks", tuple(self.marks))

    @property
    def is_annulus(self) -> bool:
        return self.num_components == 0

    @property
    def num_slots(self) -> int:
        return len(self.framings)

    @property
    def num_inputs(self) -> int:
        return len(self.framings) - 1

    @property
    def out(self) -> Framing:
        return self.framings[-1]

    def germ(self, slot: int) -> NormalForm:
        self._check_slot(slot, allow_out=True)
        return self.framings[slot - 1].germ

    def _check_slot(self, slot: int, allow_out: bool = False) -> None:
        limit = self.num_slots if allow_out else self.num_inputs
        if not 1 <= slot <= limit:
            raise SlotOutOfRange(f"slot {slot} is not in 1..{limit}")

    def special_points(self, vertex: int) -> int:
        count = sum(1 for f in self.framings if f.vertex == vertex)
        count += sum(1 for m in self.marks if m.vertex == vertex)
        count += sum((n.child == vertex) + (n.parent == vertex) for n in self.nodes)
        return count

    def to_json(self) -> dict:
        return {
            "components": list(range(self.num_components)),
            "edges": [
                {
                    "ends": [
                        {"vertex": n.child, "point": n.child_point.to_json()},
                        {"vertex": n.parent, "point": n.parent_point.to_json()},
                    ],
                    "q": n.q.to_json(),
                    "germ": n.germ.to_json(),
                }
                for n in self.nodes
            ],
            "framings": [
                {
                    "vertex": f.vertex,
                    "point": f.point.to_json() if f.point is not None else None,
                    "reparam": f.germ.to_json(),
                }
                for f in self.framings
            ],
            "marks": [{"label": m.label, "vertex": m.vertex, "point": m.point.to_json()} for m in self.marks],
        }

    @classmethod
    def from_json(cls, spec: ArtinSpec, data: Mapping) -> "StableTreeCurve":
        nodes = []
        for e in data.get("edges", []):
            child, parent = e["ends"]
            nodes.append(Node(
                int(child["vertex"]),
                int(parent["vertex"]),
                ProjPoint.from_json(spec, child["point"]),
                ProjPoint.from_json(spec, parent["point"]),
                NormalForm.from_json(spec, e["germ"]),
            ))
        framings = [
            Framing(
                f["vertex"],
                ProjPoint.from_json(spec, f["point"]) if f.get("point") is not None else None,
                NormalForm.from_json(spec, f["reparam"]),
            )
            for f in data["framings"]
        ]
        marks = [Mark(m["label"], int(m["vertex"]), ProjPoint.from_json(spec, m["point"])) for m in data.get("marks", [])]
        return cls(spec, len(data.get("components", [])), tuple(nodes), tuple(framings), tuple(marks))


def bare_germ(spec: ArtinSpec) -> NormalForm:
    """Germ of an untwisted framing: the strictly nodal point (id, 0, id)."""
    return NormalForm.scalar(RingElem.zero(spec))


def annulus_curve(germ: NormalForm) -> StableTreeCurve:
    """The vertex-free curve of an annulus element; the unit germ gives the operad unit."""
    return StableTreeCurve(
        germ.spec,
        0,
        framings=(Framing(None, None, germ), Framing(None, None, NormalForm.identity(germ.spec))),
    )


def unit_curve(spec: ArtinSpec) -> StableTreeCurve:
    return annulus_curve(NormalForm.identity(spec))


def corolla_curve(
    spec: ArtinSpec,
    num_inputs: int,
    marks: Sequence[str] = (),
    germs: Optional[Sequence[NormalForm]] = None,
) -> StableTreeCurve:
    """A single component with slots then marks at 0, 1, infinity, 2, 3, ...

    Raises:
        UnstableCurve: If fewer than three special points result.
    """
    slots = num_inputs + 1
    germs = list(germs) if germs is not None else [bare_germ(spec)] * slots
    if len(germs) != slots:
        raise InvalidCurve(f"expected {slots} germs, got {len(germs)}")
    framings = tuple(Framing(0, ProjPoint.standard(spec, k), g) for k, g in enumerate(germs))
    mark_objs = tuple(Mark(label, 0, ProjPoint.standard(spec, slots + k)) for k, label in enumerate(marks))
    return canonicalize(StableTreeCurve(spec, 1, (), framings, mark_objs))


# =============================================================================
# Canonical form
# =============================================================================

@dataclass
class _Layout:
    order: list[int]
    parent: dict[int, Optional[int]]
    maps: dict[int, Mobius] = field(default_factory=dict)


def _layout(
    spec: ArtinSpec,
    num_vertices: int,
    links: Sequence[tuple[int, ProjPoint, int, ProjPoint]],
    leaves: Sequence[tuple[Any, int, ProjPoint]],
    root: int,
) -> _Layout:
    """Vertex order, tree orientation and per-component gauge for a marked tree.

    ``links`` are (a, point on a, b, point on b); ``leaves`` are (key, vertex, point).
    """
    if len(links) != num_vertices - 1:
        raise InvalidCurve(f"{num_vertices} components need {num_vertices - 1} nodes, got {len(links)}")
    adjacent: dict[int, list[tuple[int, int]]] = {v: [] for v in range(num_vertices)}
    for k, (a, _, b, _) in enumerate(links):
        if not (0 <= a < num_vertices and 0 <= b < num_vertices) or a == b:
            raise InvalidCurve(f"node {k} joins invalid components {a}, {b}")
        adjacent[a].append((k, b))
        adjacent[b].append((k, a))
    leaf_keys: dict[int, list[Any]] = {v: [] for v in range(num_vertices)}
    for key, v, _ in leaves:
        if not 0 <= v < num_vertices:
            raise InvalidCurve(f"special point on missing component {v}")
        leaf_keys[v].append(key)

    parent: dict[int, Optional[int]] = {root: None}
    children: dict[int, list[int]] = {v: [] for v in range(num_vertices)}
    stack = [root]
    visit = []
    while stack:
        v = stack.pop()
        visit.append(v)
        for _, w in adjacent[v]:
            if w == parent[v]:
                continue
            if w in parent:
                raise InvalidCurve("nodes do not form a tree")
            parent[w] = v
            children[v].append(w)
            stack.append(w)
    if len(parent) != num_vertices:
        raise InvalidCurve("curve is not connected")

    subtree_min: dict[int, Any] = {}
    for v in reversed(visit):
        keys = leaf_keys[v] + [subtree_min[w] for w in children[v] if subtree_min[w] is not None]
        subtree_min[v] = min(keys) if keys else None
    if any(subtree_min[v] is None for v in range(num_vertices)):
        raise UnstableCurve("a branch of the tree carries no marks or slots")
    all_min_above: dict[int, Any] = {root: None}
    for v in visit:
        for w in children[v]:
            keys = list(leaf_keys[v]) + [subtree_min[x] for x in children[v] if x != w and subtree_min[x] is not None]
            if all_min_above[v] is not None:
                keys.append(all_min_above[v])
            all_min_above[w] = min(keys) if keys else None

    order: list[int] = []

    def walk(v: int) -> None:
        order.append(v)
        for w in sorted(children[v], key=lambda x: subtree_min[x]):
            walk(w)

    walk(root)
    layout = _Layout(order=order, parent=parent)

    special: dict[int, list[tuple[Any, ProjPoint]]] = {v: [] for v in range(num_vertices)}
    for key, v, point in leaves:
        special[v].append((key, point))
    for a, pa, b, pb in links:
        child, child_point, par, par_point = (a, pa, b, pb) if parent.get(a) == b else (b, pb, a, pa)
        special[par].append((subtree_min[child], par_point))
        special[child].append((all_min_above[child], child_point))
    for v in range(num_vertices):
        points = sorted(special[v], key=lambda kp: kp[0])
        if len(points) < 3:
            raise UnstableCurve(f"component {v} has {len(points)} special points, needs 3")
        for (_, p), (_, q) in itertools.combinations(points, 2):
            if not cross(p, q).is_unit():
                raise InvalidCurve(f"special points {p} and {q} of component {v} collide modulo m")
        layout.maps[v] = Mobius.normalizing(points[0][1], points[1][1], points[2][1])
    return layout


def _leaf_key_slot(j: int) -> tuple:
    return (0, j)


def _leaf_key_mark(label: str) -> tuple:
    return (1, label)


def canonicalize(curve: StableTreeCurve) -> StableTreeCurve:
    """The canonical representative of a curve's isomorphism class.

    Raises:
        UnstableCurve: If a component has fewer than three special points.
        InvalidCurve: If the data is not a tree of components with distinct points.
    """
    spec = curve.spec
    for f in curve.framings:
        spec.check(f.germ.spec)
    if curve.num_slots < 1:
        raise InvalidCurve("a curve needs an outgoing framing")
    labels = [m.label for m in curve.marks]
    if len(set(labels)) != len(labels):
        raise InvalidCurve(f"duplicate mark labels {labels}")

    if curve.is_annulus:
        if curve.num_slots != 2 or curve.marks or curve.nodes:
            raise InvalidCurve("a component-free curve must be an annulus with two slots")
        germ = normal_product(curve.framings[1].germ, curve.framings[0].germ)
        return annulus_curve(germ)

    for f in curve.framings:
        if f.vertex is None or f.point is None:
            raise InvalidCurve("framing without attachment point on a curve with components")
        if not f.germ.mid.is_nilpotent():
            raise InvalidCurve(f"framing germ {f.germ} of a proper curve must have nilpotent mid")
    for n in curve.nodes:
        if not n.germ.mid.is_nilpotent():
            raise InvalidCurve(f"node smoothing parameter {n.q} is not nilpotent")

    leaves = [(_leaf_key_slot(j), f.vertex, f.point) for j, f in enumerate(curve.framings, start=1)]
    leaves += [(_leaf_key_mark(m.label), m.vertex, m.point) for m in curve.marks]
    links = [(n.child, n.child_point, n.parent, n.parent_point) for n in curve.nodes]
    layout = _layout(spec, curve.num_components, links, leaves, curve.out.vertex)
    for n in curve.nodes:
        if layout.parent.get(n.child) != n.parent:
            raise InvalidCurve(f"node {n.child}-{n.parent} is not oriented towards the outgoing slot")

    index = {old: new for new, old in enumerate(layout.order)}

    def move(v: int, p: ProjPoint) -> tuple[int, ProjPoint]:
        return index[v], layout.maps[v](p)

    nodes = []
    for n in curve.nodes:
        c, cp = move(n.child, n.child_point)
        p, pp = move(n.parent, n.parent_point)
        nodes.append(Node(c, p, cp, pp, n.germ))
    nodes.sort(key=lambda n: n.child)
    framings = tuple(Framing(*move(f.vertex, f.point), f.germ) for f in curve.framings)
    marks = tuple(sorted((Mark(m.label, *move(m.vertex, m.point)) for m in curve.marks), key=lambda m: m.label))
    return StableTreeCurve(spec, curve.num_components, tuple(nodes), framings, marks)


def twist(curve: StableTreeCurve, maps: Mapping[int, Mobius]) -> StableTreeCurve:
    """Apply a change of coordinates on some components; the class is unchanged."""
    def move(v, p):
        return maps[v](p) if v in maps else p

    return StableTreeCurve(
        curve.spec,
        curve.num_components,
        tuple(Node(n.child, n.parent, move(n.child, n.child_point), move(n.parent, n.parent_point), n.germ)
              for n in curve.nodes),
        tuple(Framing(f.vertex, move(f.vertex, f.point) if f.point is not None else None, f.germ)
              for f in curve.framings),
        tuple(Mark(m.label, m.vertex, move(m.vertex, m.point)) for m in curve.marks),
    )


def reduce_curve(curve: StableTreeCurve) -> StableTreeCurve:
    """Set every nilpotent to zero in points and germs."""
    def germ(g: NormalForm) -> NormalForm:
        return g.map_coeffs(RingElem.reduce, curve.spec)

    return canonicalize(StableTreeCurve(
        curve.spec,
        curve.num_components,
        tuple(Node(n.child, n.parent, n.child_point.reduce(), n.parent_point.reduce(), germ(n.germ))
              for n in curve.nodes),
        tuple(Framing(f.vertex, f.point.reduce() if f.point is not None else None, germ(f.germ))
              for f in curve.framings),
        tuple(Mark(m.label, m.vertex, m.point.reduce()) for m in curve.marks),
    ))


# =============================================================================
# Operad structure
# =============================================================================

def _replace_germ(curve: StableTreeCurve, slot: int, germ: NormalForm) -> StableTreeCurve:
    framings = list(curve.framings)
    f = framings[slot - 1]
    framings[slot - 1] = Framing(f.vertex, f.point, germ)
    return StableTreeCurve(curve.spec, curve.num_components, curve.nodes, tuple(framings), curve.marks)


def stable_glue(x: StableTreeCurve, slot: int, y: StableTreeCurve) -> StableTreeCurve:
    """Glue the outgoing boundary of y into incoming slot ``slot`` of x.

    The new node carries germ(x, slot) * germ(y, out); the slots of the result
    are x's slots before ``slot``, y's inputs, then the rest of x's.

    Raises:
        SlotOutOfRange: If ``slot`` is not an incoming slot of x.
        InvalidCurve: If the mark labels of x and y overlap.
    """
    x.spec.check(y.spec)
    x._check_slot(slot)
    if {m.label for m in x.marks} & {m.label for m in y.marks}:
        raise InvalidCurve("mark labels of glued curves must be disjoint")

    if x.is_annulus:
        return canonicalize(_replace_germ(y, y.num_slots, normal_product(angle(x, 1), y.out.germ)))
    if y.is_annulus:
        return canonicalize(_replace_germ(x, slot, normal_product(x.germ(slot), angle(y, 1))))

    offset = x.num_components
    host = x.framings[slot - 1]

    def shift(v: int) -> int:
        return v + offset

    y_nodes = tuple(Node(shift(n.child), shift(n.parent), n.child_point, n.parent_point, n.germ) for n in y.nodes)
    y_inputs = tuple(Framing(shift(f.vertex), f.point, f.germ) for f in y.framings[:-1])
    y_marks = tuple(Mark(m.label, shift(m.vertex), m.point) for m in y.marks)
    node = Node(shift(y.out.vertex), host.vertex, y.out.point, host.point, normal_product(host.germ, y.out.germ))
    glued = StableTreeCurve(
        x.spec,
        x.num_components + y.num_components,
        x.nodes + y_nodes + (node,),
        x.framings[: slot - 1] + y_inputs + x.framings[slot:],
        x.marks + y_marks,
    )
    logger.debug(f"glued {y.num_components} components into slot {slot}")
    return canonicalize(glued)


def annulus_act(annulus: NormalForm, curve: StableTreeCurve, slot: int) -> StableTreeCurve:
    """Glue an annulus onto a boundary of the curve.

    On an incoming slot the germ becomes germ * annulus (a right action); on
    the outgoing slot it becomes annulus * germ (a left action).
    """
    curve.spec.check(annulus.spec)
    curve._check_slot(slot, allow_out=True)
    germ = curve.germ(slot)
    new = normal_product(germ, annulus) if slot < curve.num_slots else normal_product(annulus, germ)
    return canonicalize(_replace_germ(curve, slot, new))


def angle(curve: StableTreeCurve, slot: int) -> NormalForm:
    """germ(out) * nodes from the root down to the slot's host * germ(slot)."""
    curve._check_slot(slot)
    if curve.is_annulus:
        return normal_product(curve.out.germ, curve.germ(1))
    up = {n.child: n for n in curve.nodes}
    path = []
    v = curve.framings[slot - 1].vertex
    while v in up:
        path.append(up[v].germ)
        v = up[v].parent
    result = curve.out.germ
    for germ in reversed(path):
        result = normal_product(result, germ)
    return normal_product(result, curve.germ(slot))


def comm_g_map(curve: StableTreeCurve) -> tuple[NormalForm, ...]:
    return tuple(angle(curve, i) for i in range(1, curve.num_slots))


def relabel_inputs(curve: StableTreeCurve, perm: Sequence[int]) -> StableTreeCurve:
    """New incoming slot k is old slot perm[k-1]; the outgoing slot stays last."""
    if sorted(perm) != list(range(1, curve.num_slots)):
        raise SlotOutOfRange(f"{list(perm)} is not a permutation of the incoming slots")
    framings = tuple(curve.framings[p - 1] for p in perm) + (curve.out,)
    return canonicalize(StableTreeCurve(curve.spec, curve.num_components, curve.nodes, framings, curve.marks))


def relabel_marks(curve: StableTreeCurve, mapping: Mapping[str, str]) -> StableTreeCurve:
    marks = tuple(Mark(mapping.get(m.label, m.label), m.vertex, m.point) for m in curve.marks)
    return canonicalize(StableTreeCurve(curve.spec, curve.num_components, curve.nodes, curve.framings, marks))


# =============================================================================
# Comm_G
# =============================================================================

@dataclass(frozen=True)
class CommOperad:
    """The operad with n-ary operations G^n and (g o_i h) = (.., g_i*h_1, .., g_i*h_m, ..)."""
    multiply: Callable[[Any, Any], Any]
    unit: Any
    elements: Optional[tuple] = None

    def identity(self) -> tuple:
        return (self.unit,)

    def compose(self, g: Sequence[Any], slot: int, h: Sequence[Any]) -> tuple:
        if not 1 <= slot <= len(g):
            raise SlotOutOfRange(f"slot {slot} is not in 1..{len(g)}")
        gi = g[slot - 1]
        return tuple(g[: slot - 1]) + tuple(self.multiply(gi, hj) for hj in h) + tuple(g[slot:])

    def operations(self, arity: int) -> list[tuple]:
        """All operations of an arity; needs a finite monoid."""
        if self.elements is None:
            raise ValueError("operations() needs the monoid's elements")
        return list(itertools.product(self.elements, repeat=arity))


def annulus_comm_operad(spec: ArtinSpec) -> CommOperad:
    return CommOperad(normal_product, NormalForm.identity(spec))


TRIVIAL_COMM = CommOperad(lambda a, b: (), (), elements=((),))


# =============================================================================
# Reduced hourglass shadow
# =============================================================================

@dataclass(frozen=True)
class MarkedTree:
    """A reduced stable marked tree of projective lines."""
    spec: ArtinSpec
    num_components: int
    links: tuple[tuple[int, ProjPoint, int, ProjPoint], ...]
    marks: tuple[tuple[str, int, ProjPoint], ...]

    def is_stable(self) -> bool:
        counts = [0] * self.num_components
        for _, v, _ in self.marks:
            counts[v] += 1
        for a, _, b, _ in self.links:
            counts[a] += 1
            counts[b] += 1
        return all(c >= 3 for c in counts)

    def mark_labels(self) -> list[str]:
        return [label for label, _, _ in self.marks]

    def to_json(self) -> dict:
        return {
            "components": list(range(self.num_components)),
            "edges": [{"ends": [{"vertex": a, "point": pa.to_json()}, {"vertex": b, "point": pb.to_json()}]}
                      for a, pa, b, pb in self.links],
            "marks": [{"label": label, "vertex": v, "point": p.to_json()} for label, v, p in self.marks],
        }


def _hour_key(label: str) -> tuple:
    kind, _, name = label.partition(":")
    rank = {"mark": 0, "zero": 1, "one": 2}[kind]
    return (rank, int(name)) if kind != "mark" else (rank, name)


def hour_reduced(curve: StableTreeCurve) -> MarkedTree:
    """Reduced marked tree with n + 2f marks.

    Each framing slot j becomes a bubble attached at its point, carrying
    "zero:j" at 0, "one:j" at 1 and the node at infinity. Marks keep their
    labels as "mark:<label>".
    """
    reduced = reduce_curve(curve)
    spec = reduced.spec
    zero, one, inf = (ProjPoint.standard(spec, k) for k in range(3))
    links: list[tuple[int, ProjPoint, int, ProjPoint]] = []
    marks: list[tuple[str, int, ProjPoint]] = []
    count = reduced.num_components
    for n in reduced.nodes:
        links.append((n.child, n.child_point, n.parent, n.parent_point))
    for label, v, p in ((m.label, m.vertex, m.point) for m in reduced.marks):
        marks.append((f"mark:{label}", v, p))
    bubbles = []
    for j, f in enumerate(reduced.framings, start=1):
        bubble = count + len(bubbles)
        bubbles.append(bubble)
        marks.append((f"zero:{j}", bubble, zero))
        marks.append((f"one:{j}", bubble, one))
        if f.vertex is not None:
            links.append((bubble, inf, f.vertex, f.point))
    if reduced.is_annulus:
        links.append((bubbles[0], inf, bubbles[1], inf))
    total = count + len(bubbles)
    leaves = [(_hour_key(label), v, p) for label, v, p in marks]
    root = min(leaves, key=lambda leaf: leaf[0])[1]
    layout = _layout(spec, total, links, leaves, root)
    index = {old: new for new, old in enumerate(layout.order)}
    new_links = []
    for a, pa, b, pb in links:
        if layout.parent.get(a) != b:
            a, pa, b, pb = b, pb, a, pa
        new_links.append((index[a], layout.maps[a](pa), index[b], layout.maps[b](pb)))
    new_links.sort(key=lambda link: link[0])
    new_marks = sorted(
        ((label, index[v], layout.maps[v](p)) for label, v, p in marks),
        key=lambda mark: _hour_key(mark[0]),
    )
    return MarkedTree(spec, total, tuple(new_links), tuple(new_marks))


# =============================================================================
# Contraction algebra
# =============================================================================

class CurveAlgebra:
    """Genus-0 framed curves as an algebra over directed corollas.

    Ports are the slots of a curve with the outgoing slot last.
    """

    def __init__(self, spec: ArtinSpec):
        self.spec = spec
        self._fresh = itertools.count(1)

    def color(self, curve: StableTreeCurve) -> tuple[Direction, ...]:
        return (Direction.IN,) * curve.num_inputs + (Direction.OUT,)

    def _check_corolla(self, corolla: Corolla) -> None:
        if corolla.genus != 0 or corolla.num_out != 1 or corolla.directions[-1] != Direction.OUT:
            raise ColorMismatch(f"{corolla} is not a genus-0 corolla with its output last")

    def default(self, corolla: Corolla) -> StableTreeCurve:
        self._check_corolla(corolla)
        if corolla.valence == 2:
            return unit_curve(self.spec)
        marks = [f"d{next(self._fresh)}" for _ in range(max(0, 3 - corolla.valence))]
        return corolla_curve(self.spec, corolla.valence - 1, marks)

    def glue(self, outer: StableTreeCurve, a: int, inner: StableTreeCurve, b: int) -> StableTreeCurve:
        if b != inner.num_slots - 1 or a >= outer.num_inputs:
            raise ColorMismatch("curves glue an outgoing slot into an incoming one")
        return stable_glue(outer, a + 1, inner)

    def selfglue(self, curve: StableTreeCurve, a: int, b: int) -> StableTreeCurve:
        raise InvalidCurve("self-gluing raises the genus and has no genus-0 coordinates")

    def unit(self, corolla: Corolla) -> StableTreeCurve:
        return unit_curve(self.spec)

    def normalize(self, curve: StableTreeCurve, labels: Sequence[int]) -> StableTreeCurve:
        if labels and labels[-1] != len(labels):
            raise ColorMismatch("the outgoing slot must carry the last label")
        perm = [0] * (len(labels) - 1)
        for k, label in enumerate(labels[:-1], start=1):
            perm[label - 1] = k
        return relabel_inputs(curve, perm) if perm else curve
