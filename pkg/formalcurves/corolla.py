"""Graphs with half-edges, corolla collapse, and the multicorolla colored operad.

A graph has vertices plus an implicit base point ``*``; an edge whose target is
``*`` is an outgoing half-edge, one whose source is ``*`` is incoming, and an
edge with both ends at ``*`` is open.

A morphism of multicorollas M -> N is a graph whose full split is M and whose
collapse is N. It is stored as a perfect matching on the ports of M (role S)
and N (role T) together with the component map to the corollas of N:

    S_out -- S_in    interior edge
    S_out -- T_out   outgoing half-edge
    S_in  -- T_in    incoming half-edge
    T_in  -- T_out   open edge, inside one genus-0 two-port target corolla

Undirected morphisms ignore the directions.
"""

import itertools
import logging
import random
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Iterable, Iterator, Mapping, Optional, Protocol, Sequence, Union

from pydantic import BaseModel, Field

from formalcurves.config import CorollaBounds
from formalcurves.errors import (
    ClosedLoop,
    ColorMismatch,
    EdgeNotInGraph,
    FormalCurvesError,
    InvalidGraph,
    InvalidMorphism,
    LabelMismatch,
)


logger = logging.getLogger(__name__)

BASE = "*"


class Direction(str, Enum):
    IN = "in"
    OUT = "out"
    NONE = "none"


class Role(str, Enum):
    SOURCE = "S"
    TARGET = "T"


# =============================================================================
# Graphs
# =============================================================================

@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str

    @property
    def is_open(self) -> bool:
        return self.src == BASE and self.dst == BASE

    @property
    def is_interior(self) -> bool:
        return self.src != BASE and self.dst != BASE


@dataclass(frozen=True)
class Graph:
    """A finite graph with half-edges; vertex and edge order is significant."""
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if BASE in self.vertices:
            raise InvalidGraph(f"{BASE!r} is reserved for the base point")
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidGraph(f"duplicate vertices in {self.vertices}")
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            raise InvalidGraph(f"duplicate edge ids in {ids}")
        known = set(self.vertices) | {BASE}
        for e in self.edges:
            if e.src not in known or e.dst not in known:
                raise InvalidGraph(f"edge {e.id} has an unknown endpoint")

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise EdgeNotInGraph(f"edge {edge_id} is not in the graph")

    def outgoing_half_edges(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges if e.dst == BASE)

    def incoming_half_edges(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges if e.src == BASE)

    def interior(self) -> "Graph":
        """The closed graph left after dropping open edges and half-edges."""
        return Graph(self.vertices, tuple(e for e in self.edges if e.is_interior))

    def components(self) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
        """Connected components as (vertices, edge ids).

        Components with vertices come first, ordered by their first vertex;
        each open edge is its own component, in edge order.
        """
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for e in self.edges:
            if e.is_interior:
                parent[find(e.src)] = find(e.dst)
        groups: dict[str, list[str]] = {}
        for v in self.vertices:
            groups.setdefault(find(v), []).append(v)
        result = []
        for members in groups.values():
            member_set = set(members)
            edges = tuple(e.id for e in self.edges if e.src in member_set or e.dst in member_set)
            result.append((tuple(members), edges))
        result.sort(key=lambda comp: self.vertices.index(comp[0][0]))
        result.extend(((), (e.id,)) for e in self.edges if e.is_open)
        return result

    def betti_number(self) -> int:
        """First Betti number of the interior: E - V + #components."""
        inner = self.interior()
        return len(inner.edges) - len(inner.vertices) + len(inner.components())

    def vertex_ports(self, vertex: str) -> list[tuple[str, str]]:
        """Edge ends at a vertex in edge order, as (edge id, "src"|"dst")."""
        ports = []
        for e in self.edges:
            if e.src == vertex:
                ports.append((e.id, "src"))
            if e.dst == vertex:
                ports.append((e.id, "dst"))
        return ports


@dataclass(frozen=True)
class ModularGraph:
    """A graph with a genus attached to every vertex (aligned with graph.vertices)."""
    graph: Graph
    genera: tuple[int, ...] = ()

    def __post_init__(self):
        genera = tuple(self.genera) or (0,) * len(self.graph.vertices)
        if len(genera) != len(self.graph.vertices) or any(g < 0 for g in genera):
            raise InvalidGraph("genus must be a nonnegative integer on every vertex")
        object.__setattr__(self, "genera", genera)

    @classmethod
    def build(cls, vertices: Iterable[tuple[str, int]], edges: Iterable[tuple[str, str, str]]) -> "ModularGraph":
        vertices = list(vertices)
        graph = Graph(tuple(v for v, _ in vertices), tuple(Edge(*e) for e in edges))
        return cls(graph, tuple(g for _, g in vertices))

    def genus_of(self, vertex: str) -> int:
        return self.genera[self.graph.vertices.index(vertex)]

    def total_genus(self) -> int:
        """Sum of vertex genera plus the first Betti number."""
        return sum(self.genera) + self.graph.betti_number()

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": v, "genus": g} for v, g in zip(self.graph.vertices, self.genera)],
            "edges": [{"id": e.id, "src": e.src, "dst": e.dst} for e in self.graph.edges],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ModularGraph":
        return cls.build(
            [(v["id"], int(v.get("genus", 0))) for v in data["vertices"]],
            [(e["id"], e["src"], e["dst"]) for e in data["edges"]],
        )


def split(graph: Union[Graph, ModularGraph], multiplicities: Mapping[str, int]):
    """Cut each edge of multiplicity n into the chain e.0 .. e.n.

    e.0 keeps the source, e.n keeps the target, every other end goes to the
    base point.

    Raises:
        EdgeNotInGraph: If a multiplicity is given for an unknown edge.
    """
    base = graph.graph if isinstance(graph, ModularGraph) else graph
    known = {e.id for e in base.edges}
    for edge_id, n in multiplicities.items():
        if edge_id not in known:
            raise EdgeNotInGraph(f"edge {edge_id} is not in the graph")
        if n < 0:
            raise InvalidGraph(f"negative multiplicity for {edge_id}")
    edges: list[Edge] = []
    for e in base.edges:
        n = multiplicities.get(e.id, 0)
        if not n:
            edges.append(e)
            continue
        for k in range(n + 1):
            edges.append(Edge(f"{e.id}.{k}", e.src if k == 0 else BASE, e.dst if k == n else BASE))
    result = Graph(base.vertices, tuple(edges))
    if isinstance(graph, ModularGraph):
        return ModularGraph(result, graph.genera)
    return result


def full_split(graph: Union[Graph, ModularGraph]):
    base = graph.graph if isinstance(graph, ModularGraph) else graph
    return split(graph, Counter(e.id for e in base.edges))


# =============================================================================
# Corollas
# =============================================================================

@dataclass(frozen=True)
class Corolla:
    """A single vertex of the given genus with ports labeled 1..valence."""
    genus: int
    directions: tuple[Direction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(Direction(d) for d in self.directions))
        if self.genus < 0:
            raise InvalidGraph(f"negative genus {self.genus}")

    @property
    def valence(self) -> int:
        return len(self.directions)

    @property
    def num_in(self) -> int:
        return self.directions.count(Direction.IN)

    @property
    def num_out(self) -> int:
        return self.directions.count(Direction.OUT)

    def forget(self) -> "Corolla":
        return Corolla(self.genus, (Direction.NONE,) * self.valence)

    def euler(self) -> int:
        return 2 * self.genus - 2 + self.valence

    def to_json(self) -> dict:
        return {"genus": self.genus, "ports": [d.value for d in self.directions]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Corolla":
        return cls(int(data["genus"]), tuple(Direction(d) for d in data.get("ports", ())))


# A labeled multicorolla: corollas numbered 1..len.
Multicorolla = tuple[Corolla, ...]


def multicorolla_to_json(m: Multicorolla) -> list:
    return [c.to_json() for c in m]


def multicorolla_from_json(data: Iterable) -> Multicorolla:
    return tuple(Corolla.from_json(c) for c in data)


def euler_total(m: Multicorolla) -> int:
    return sum(c.euler() for c in m)


def is_stable(obj: Union[Corolla, Sequence[Corolla], "CorollaMorphism"], directed: bool = True) -> bool:
    """Stability: n >= 1 or g >= 2 undirected; 2(m+n) + 3g >= 3 directed.

    A morphism is stable when its source and target are, which covers every
    vertex corolla of its graph.
    """
    if isinstance(obj, CorollaMorphism):
        return is_stable(obj.source, obj.directed) and is_stable(obj.target, obj.directed)
    if isinstance(obj, Corolla):
        if directed:
            return 2 * obj.valence + 3 * obj.genus >= 3
        return obj.valence >= 1 or obj.genus >= 2
    return all(is_stable(c, directed) for c in obj)


def is_geometrically_stable(c: Corolla) -> bool:
    """2g - 2 + n > 0, the stability of a curve of genus g with n marks."""
    return c.euler() > 0


@dataclass
class CollapseResult:
    """Output of collapse: the multicorolla and where each half-edge landed.

    Attributes:
        target: One corolla per connected component.
        labeling: (edge id, "in"|"out") -> (corolla index, label), both 1-based.
        component_of: vertex -> corolla index.
    """
    target: Multicorolla
    labeling: dict[tuple[str, str], tuple[int, int]] = field(default_factory=dict)
    component_of: dict[str, int] = field(default_factory=dict)


def collapse(graph: ModularGraph, directed: bool = True) -> CollapseResult:
    """Contract every component to a corolla of genus sum(g) + b1."""
    g = graph.graph
    result = CollapseResult(target=())
    corollas = []
    for index, (members, edge_ids) in enumerate(g.components(), start=1):
        member_set = set(members)
        edge_set = set(edge_ids)
        ports: list[tuple[str, str]] = []
        interior = 0
        for e in g.edges:
            if e.id not in edge_set:
                continue
            if e.is_interior:
                interior += 1
            if e.src == BASE:
                ports.append((e.id, "in"))
            if e.dst == BASE:
                ports.append((e.id, "out"))
        betti = interior - len(members) + 1 if members else 0
        genus = sum(graph.genus_of(v) for v in members) + betti
        if directed:
            dirs = tuple(Direction.IN if end == "in" else Direction.OUT for _, end in ports)
        else:
            dirs = (Direction.NONE,) * len(ports)
        corollas.append(Corolla(genus, dirs))
        for label, port in enumerate(ports, start=1):
            result.labeling[port] = (index, label)
        for v in member_set:
            result.component_of[v] = index
    result.target = tuple(corollas)
    return result


def vertex_corollas(graph: ModularGraph, directed: bool = True) -> Multicorolla:
    """The in-part of the full split: one corolla per vertex."""
    out = []
    for v, genus in zip(graph.graph.vertices, graph.genera):
        ports = graph.graph.vertex_ports(v)
        if directed:
            dirs = tuple(Direction.OUT if end == "src" else Direction.IN for _, end in ports)
        else:
            dirs = (Direction.NONE,) * len(ports)
        out.append(Corolla(genus, dirs))
    return tuple(out)


# =============================================================================
# Morphisms
# =============================================================================

Port = tuple[Role, int, int]
Pair = tuple[Port, Port]


def _pair(p: Port, q: Port) -> Pair:
    return (p, q) if p <= q else (q, p)


def _ports(m: Multicorolla, role: Role) -> list[Port]:
    return [(role, c, label) for c, corolla in enumerate(m, start=1) for label in range(1, corolla.valence + 1)]


_DIRECTED_RULES = {
    ((Role.SOURCE, Direction.OUT), (Role.SOURCE, Direction.IN)),
    ((Role.SOURCE, Direction.OUT), (Role.TARGET, Direction.OUT)),
    ((Role.SOURCE, Direction.IN), (Role.TARGET, Direction.IN)),
    ((Role.TARGET, Direction.IN), (Role.TARGET, Direction.OUT)),
}


def _open_edge_corolla(c: Corolla, directed: bool) -> bool:
    if c.genus != 0 or c.valence != 2:
        return False
    return not directed or sorted(c.directions) == [Direction.IN, Direction.OUT]


@dataclass(frozen=True)
class CorollaMorphism:
    """A morphism of labeled multicorollas, given by its port matching.

    Attributes:
        source: The multicorolla of vertices.
        target: The collapse.
        pairs: Perfect matching of all source and target ports.
        vertex_map: For each source corolla, the target corolla of its component.
        directed: Whether port directions are respected.
    """
    source: Multicorolla
    target: Multicorolla
    pairs: frozenset
    vertex_map: tuple[int, ...]
    directed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        object.__setattr__(self, "pairs", frozenset(_pair(*p) for p in self.pairs))
        object.__setattr__(self, "vertex_map", tuple(self.vertex_map))
        self._validate()

    # -- validation -----------------------------------------------------------

    def corolla(self, port: Port) -> Corolla:
        role, c, _ = port
        return (self.source if role == Role.SOURCE else self.target)[c - 1]

    def direction(self, port: Port) -> Direction:
        return self.corolla(port).directions[port[2] - 1]

    def _pair_allowed(self, p: Port, q: Port) -> bool:
        if p == q:
            return False
        if p[0] == Role.TARGET and q[0] == Role.TARGET:
            if p[1] != q[1] or not _open_edge_corolla(self.target[p[1] - 1], self.directed):
                return False
        if not self.directed:
            return True
        key_p = (p[0], self.direction(p))
        key_q = (q[0], self.direction(q))
        return (key_p, key_q) in _DIRECTED_RULES or (key_q, key_p) in _DIRECTED_RULES

    def _validate(self) -> None:
        for corolla in self.source + self.target:
            dirs = set(corolla.directions)
            if (Direction.NONE in dirs) == self.directed and dirs:
                raise InvalidMorphism("port directions do not match the directed flag")
        if len(self.vertex_map) != len(self.source):
            raise InvalidMorphism("vertex_map must cover every source corolla")
        if any(not 1 <= t <= len(self.target) for t in self.vertex_map):
            raise InvalidMorphism(f"vertex_map {self.vertex_map} leaves the target")

        expected = _ports(self.source, Role.SOURCE) + _ports(self.target, Role.TARGET)
        seen = Counter(port for pair in self.pairs for port in pair)
        if sorted(seen) != sorted(expected) or any(n != 1 for n in seen.values()):
            raise InvalidMorphism("pairs are not a perfect matching of the ports")
        for p, q in self.pairs:
            if not self._pair_allowed(p, q):
                raise InvalidMorphism(f"ports {p} and {q} cannot be joined")

        # source components via interior edges
        parent = list(range(len(self.source) + 1))

        def find(c):
            while parent[c] != c:
                parent[c] = parent[parent[c]]
                c = parent[c]
            return c

        for p, q in self.pairs:
            if p[0] == q[0] == Role.SOURCE:
                parent[find(p[1])] = find(q[1])
        for c, t in enumerate(self.vertex_map, start=1):
            if self.vertex_map[find(c) - 1] != t:
                raise InvalidMorphism("vertices of one component map to different targets")
        for p, q in self.pairs:
            if p[0] == Role.SOURCE and q[0] == Role.TARGET and self.vertex_map[p[1] - 1] != q[1]:
                raise InvalidMorphism(f"half-edge {p} lands outside its component's corolla")

        roots = sorted({find(c) for c in range(1, len(self.source) + 1)})
        hit: dict[int, int] = {}
        for root in roots:
            t = self.vertex_map[root - 1]
            if t in hit:
                raise InvalidMorphism(f"two components collapse to target corolla {t}")
            hit[t] = root
        open_targets = {p[1] for p, q in self.pairs if p[0] == q[0] == Role.TARGET}
        for t in range(1, len(self.target) + 1):
            if (t in hit) == (t in open_targets):
                raise InvalidMorphism(f"target corolla {t} is not the collapse of exactly one component")

        interior = Counter(find(p[1]) for p, q in self.pairs if p[0] == q[0] == Role.SOURCE)
        for t, root in hit.items():
            members = [c for c in range(1, len(self.source) + 1) if find(c) == root]
            genus = sum(self.source[c - 1].genus for c in members) + interior[root] - len(members) + 1
            if genus != self.target[t - 1].genus:
                raise InvalidMorphism(f"target corolla {t} has genus {self.target[t - 1].genus}, expected {genus}")

    # -- views ----------------------------------------------------------------

    def partner(self) -> dict[Port, Port]:
        out = {}
        for p, q in self.pairs:
            out[p] = q
            out[q] = p
        return out

    def sorted_pairs(self) -> list[Pair]:
        return sorted(self.pairs)

    def key(self) -> tuple:
        return (self.source, self.target, tuple(self.sorted_pairs()), self.vertex_map, self.directed)

    def graph(self) -> ModularGraph:
        """The underlying modular graph, vertices v1..vs, edges e1..ek."""
        vertices = [(f"v{c}", corolla.genus) for c, corolla in enumerate(self.source, start=1)]
        edges = []
        for k, (p, q) in enumerate(self.sorted_pairs(), start=1):
            ends = []
            for port in (p, q):
                if port[0] == Role.SOURCE:
                    ends.append((f"v{port[1]}", self.direction(port)))
                else:
                    ends.append((BASE, self.direction(port)))
            (a, da), (b, db) = ends
            if p[0] == q[0] == Role.TARGET:
                src, dst = BASE, BASE
            elif p[0] == Role.SOURCE and q[0] == Role.TARGET:
                src, dst = (BASE, a) if da == Direction.IN else (a, BASE)
            elif da == Direction.IN:
                src, dst = b, a
            else:
                src, dst = a, b
            edges.append((f"e{k}", src, dst))
        return ModularGraph.build(vertices, edges)

    def to_json(self) -> dict:
        return {
            "source": multicorolla_to_json(self.source),
            "target": multicorolla_to_json(self.target),
            "pairs": [[[p[0].value, p[1], p[2]], [q[0].value, q[1], q[2]]] for p, q in self.sorted_pairs()],
            "vertex_map": list(self.vertex_map),
            "directed": self.directed,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "CorollaMorphism":
        def port(item) -> Port:
            return (Role(item[0]), int(item[1]), int(item[2]))

        return cls(
            multicorolla_from_json(data["source"]),
            multicorolla_from_json(data["target"]),
            frozenset(_pair(port(p), port(q)) for p, q in data["pairs"]),
            tuple(data["vertex_map"]),
            bool(data.get("directed", True)),
        )


def from_graph(graph: ModularGraph, directed: bool = True) -> CorollaMorphism:
    """The morphism full_split(graph)_in -> collapse(graph) with canonical labelings."""
    source = vertex_corollas(graph, directed)
    collapsed = collapse(graph, directed)
    g = graph.graph
    labels: dict[tuple[str, str], Port] = {}
    for c, v in enumerate(g.vertices, start=1):
        for label, end in enumerate(g.vertex_ports(v), start=1):
            labels[end] = (Role.SOURCE, c, label)
    for half, (c, label) in collapsed.labeling.items():
        labels[half] = (Role.TARGET, c, label)
    pairs = set()
    for e in g.edges:
        src_end = labels[(e.id, "src")] if e.src != BASE else labels[(e.id, "in")]
        dst_end = labels[(e.id, "dst")] if e.dst != BASE else labels[(e.id, "out")]
        pairs.add(_pair(src_end, dst_end))
    vertex_map = tuple(collapsed.component_of[v] for v in g.vertices)
    return CorollaMorphism(source, collapsed.target, frozenset(pairs), vertex_map, directed)


def identity(m: Multicorolla, directed: bool = True) -> CorollaMorphism:
    pairs = frozenset(((Role.SOURCE, c, l), (Role.TARGET, c, l)) for (_, c, l) in _ports(m, Role.SOURCE))
    return CorollaMorphism(m, m, pairs, tuple(range(1, len(m) + 1)), directed)


def relabel(m: Multicorolla, sigma: Sequence[int], directed: bool = True) -> CorollaMorphism:
    """The isomorphism m -> sigma.m moving corolla c to position sigma[c-1]."""
    if sorted(sigma) != list(range(1, len(m) + 1)):
        raise LabelMismatch(f"{sigma} is not a permutation of 1..{len(m)}")
    target: list[Optional[Corolla]] = [None] * len(m)
    for c, corolla in enumerate(m, start=1):
        target[sigma[c - 1] - 1] = corolla
    pairs = frozenset(((Role.SOURCE, c, l), (Role.TARGET, sigma[c - 1], l)) for (_, c, l) in _ports(m, Role.SOURCE))
    return CorollaMorphism(m, tuple(target), pairs, tuple(sigma), directed)


def compose_morphisms(first: CorollaMorphism, second: CorollaMorphism) -> CorollaMorphism:
    """Graft: substitute the components of ``first`` into the vertices of ``second``.

    Ports of the shared middle multicorolla are TARGET ports of ``first`` and
    SOURCE ports of ``second``; every chain through them is contracted.

    Raises:
        LabelMismatch: If first.target != second.source.
        ClosedLoop: If a chain of middle ports closes up without reaching an end.
    """
    if first.target != second.source or first.directed != second.directed:
        raise LabelMismatch("target of the first morphism is not the source of the second")
    lower = first.partner()
    upper = second.partner()
    visited: set[tuple[int, int]] = set()

    def walk(port: Port, on_lower: bool) -> Port:
        while True:
            nxt = lower[port] if on_lower else upper[port]
            in_middle = nxt[0] == (Role.TARGET if on_lower else Role.SOURCE)
            if not in_middle:
                return nxt
            visited.add((nxt[1], nxt[2]))
            if on_lower:
                port, on_lower = (Role.SOURCE, nxt[1], nxt[2]), False
            else:
                port, on_lower = (Role.TARGET, nxt[1], nxt[2]), True

    pairs = set()
    for port in _ports(first.source, Role.SOURCE):
        pairs.add(_pair(port, walk(port, True)))
    for port in _ports(second.target, Role.TARGET):
        pairs.add(_pair(port, walk(port, False)))
    middle = {(c, l) for (_, c, l) in _ports(first.target, Role.TARGET)}
    if visited != middle:
        raise ClosedLoop(f"{len(middle - visited)} middle ports close up into a loop without vertices")
    vertex_map = tuple(second.vertex_map[t - 1] for t in first.vertex_map)
    logger.debug(f"composed morphism with {len(pairs)} edges")
    return CorollaMorphism(first.source, second.target, frozenset(pairs), vertex_map, first.directed)


def union_objects(*objects: Multicorolla) -> Multicorolla:
    return tuple(c for m in objects for c in m)


def union_morphisms(first: CorollaMorphism, second: CorollaMorphism) -> CorollaMorphism:
    """Disjoint union: the corollas of ``second`` are numbered after those of ``first``."""
    if first.directed != second.directed:
        raise LabelMismatch("cannot take the union of directed and undirected morphisms")
    s_off, t_off = len(first.source), len(first.target)

    def shift(port: Port) -> Port:
        return (port[0], port[1] + (s_off if port[0] == Role.SOURCE else t_off), port[2])

    pairs = set(first.pairs) | {_pair(shift(p), shift(q)) for p, q in second.pairs}
    return CorollaMorphism(
        first.source + second.source,
        first.target + second.target,
        frozenset(pairs),
        first.vertex_map + tuple(t + t_off for t in second.vertex_map),
        first.directed,
    )


def forget_orientation(morphism: CorollaMorphism) -> CorollaMorphism:
    if not morphism.directed:
        return morphism
    return CorollaMorphism(
        tuple(c.forget() for c in morphism.source),
        tuple(c.forget() for c in morphism.target),
        morphism.pairs,
        morphism.vertex_map,
        directed=False,
    )


def project_to_fin(morphism: CorollaMorphism) -> tuple[int, ...]:
    """The component map {1..s} -> {1..t} as a tuple of images."""
    return morphism.vertex_map


def compose_maps(f: Sequence[int], g: Sequence[int]) -> tuple[int, ...]:
    """g after f for maps of finite sets given as image tuples."""
    return tuple(g[x - 1] for x in f)


# =============================================================================
# Bushes
# =============================================================================

def is_bush_corolla(c: Corolla) -> bool:
    """A genus-0 corolla with exactly one outgoing port (the root)."""
    return c.genus == 0 and c.num_out == 1


def is_bush_morphism(morphism: CorollaMorphism) -> bool:
    """Every vertex has a unique oriented path to a root half-edge."""
    if not morphism.directed:
        return False
    if not all(is_bush_corolla(c) for c in morphism.source + morphism.target):
        return False
    partner = morphism.partner()
    for start in range(1, len(morphism.source) + 1):
        seen = set()
        c = start
        while True:
            if c in seen:
                return False
            seen.add(c)
            label = morphism.source[c - 1].directions.index(Direction.OUT) + 1
            nxt = partner[(Role.SOURCE, c, label)]
            if nxt[0] == Role.TARGET:
                break
            c = nxt[1]
    return True


# =============================================================================
# Hom enumeration
# =============================================================================

def hom(source: Multicorolla, target: Multicorolla, directed: bool = True) -> list[CorollaMorphism]:
    """All morphisms source -> target, in a deterministic order.

    Perfect matchings are enumerated port by port; pairs are pruned by the
    direction rules and the whole search by conservation of sum(2g - 2 + n).
    """
    if euler_total(source) != euler_total(target):
        return []
    s_ports = _ports(source, Role.SOURCE)
    t_ports = _ports(target, Role.TARGET)
    if (len(s_ports) + len(t_ports)) % 2:
        return []
    if directed:
        s_out = sum(c.num_out for c in source)
        s_in = sum(c.num_in for c in source)
        t_out = sum(c.num_out for c in target)
        t_in = sum(c.num_in for c in target)
        # every S_out and T_in reaches exactly one S_in or T_out
        if s_out + t_in != s_in + t_out:
            return []
    # unvalidated instance, used only for its pairing rules
    rules = CorollaMorphism.__new__(CorollaMorphism)
    object.__setattr__(rules, "source", tuple(source))
    object.__setattr__(rules, "target", tuple(target))
    object.__setattr__(rules, "directed", directed)

    ports = s_ports + t_ports
    results: dict[tuple, CorollaMorphism] = {}

    def matchings(remaining: list[Port], acc: list[Pair]) -> Iterator[list[Pair]]:
        if not remaining:
            yield list(acc)
            return
        first, rest = remaining[0], remaining[1:]
        for i, other in enumerate(rest):
            if rules._pair_allowed(first, other):
                acc.append(_pair(first, other))
                yield from matchings(rest[:i] + rest[i + 1:], acc)
                acc.pop()

    for matching in matchings(ports, []):
        for vertex_map in _vertex_maps(source, target, matching):
            try:
                morphism = CorollaMorphism(source, target, frozenset(matching), vertex_map, directed)
            except InvalidMorphism:
                continue
            results[morphism.key()] = morphism
    return [results[k] for k in sorted(results, key=repr)]


def _vertex_maps(source: Multicorolla, target: Multicorolla, matching: list[Pair]) -> Iterator[tuple[int, ...]]:
    """Component maps compatible with a matching; portless components range freely."""
    parent = list(range(len(source) + 1))

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    for p, q in matching:
        if p[0] == q[0] == Role.SOURCE:
            parent[find(p[1])] = find(q[1])
    forced: dict[int, int] = {}
    for p, q in matching:
        if p[0] == Role.SOURCE and q[0] == Role.TARGET:
            root = find(p[1])
            if forced.setdefault(root, q[1]) != q[1]:
                return
    roots = sorted({find(c) for c in range(1, len(source) + 1)})
    free_roots = [r for r in roots if r not in forced]
    used = set(forced.values()) | {p[1] for p, q in matching if p[0] == q[0] == Role.TARGET}
    free_targets = [t for t in range(1, len(target) + 1) if t not in used]
    if len(free_roots) != len(free_targets):
        return
    for image in itertools.permutations(free_targets):
        assignment = dict(forced)
        assignment.update(zip(free_roots, image))
        yield tuple(assignment[find(c)] for c in range(1, len(source) + 1))


def corolla_universe(bounds: CorollaBounds, directed: bool = True) -> list[Corolla]:
    """Corollas within bounds, with incoming ports listed before outgoing ones."""
    out = []
    for genus in range(bounds.max_genus + 1):
        for valence in range(bounds.max_valence + 1):
            if directed:
                for k in range(valence + 1):
                    out.append(Corolla(genus, (Direction.IN,) * k + (Direction.OUT,) * (valence - k)))
            else:
                out.append(Corolla(genus, (Direction.NONE,) * valence))
    return out


def object_universe(bounds: CorollaBounds, directed: bool = True) -> list[Multicorolla]:
    """Multicorollas of at most max_vertices corollas, up to reordering."""
    universe = corolla_universe(bounds, directed)
    out: list[Multicorolla] = []
    for size in range(bounds.max_vertices + 1):
        for combo in itertools.combinations_with_replacement(range(len(universe)), size):
            m = tuple(universe[i] for i in combo)
            if sum(c.valence for c in m) <= 2 * bounds.max_edges:
                out.append(m)
    return out


# =============================================================================
# Operadic axiom checks
# =============================================================================

ComposeFn = Callable[[CorollaMorphism, CorollaMorphism], CorollaMorphism]


class AxiomReport(BaseModel):
    """Outcome of a bounded axiom check."""
    passed: bool = True
    counts: dict[str, int] = Field(default_factory=dict)
    failures: dict[str, int] = Field(default_factory=dict)
    counterexamples: list[str] = Field(default_factory=list)

    def record(self, check: str) -> None:
        self.counts[check] = self.counts.get(check, 0) + 1

    def fail(self, check: str, detail: str) -> None:
        self.passed = False
        self.failures[check] = self.failures.get(check, 0) + 1
        if len(self.counterexamples) < 20:
            self.counterexamples.append(f"{check}: {detail}")


class _Abort(Exception):
    pass


def _safe(compose: ComposeFn, p: CorollaMorphism, q: CorollaMorphism) -> Union[CorollaMorphism, str]:
    """Compose, returning the error code instead of raising."""
    try:
        return compose(p, q)
    except FormalCurvesError as exc:
        return exc.code
    except Exception as exc:  # mutants may fail arbitrarily
        return type(exc).__name__


def check_operadic_axioms(
    bounds: CorollaBounds,
    directed: bool = True,
    compose: ComposeFn = compose_morphisms,
    fail_fast: bool = False,
) -> AxiomReport:
    """Exhaustively check the colored-operad structure within ``bounds``.

    Checks unitality, associativity, that composites land in the enumerated hom
    sets, functoriality of the projection to finite sets, stability closure,
    compatibility with forgetting orientation, the disjoint-union decomposition
    of hom sets, relabeling lifts, and that the fibre over S + T is the
    product of the fibres over S and T on objects, hom sets and composites.
    """
    report = AxiomReport()

    def fail(check: str, detail: str) -> None:
        report.fail(check, detail)
        if fail_fast:
            raise _Abort

    try:
        _run_axiom_checks(bounds, directed, compose, report, fail)
    except _Abort:
        pass
    logger.info(f"axiom check ({'directed' if directed else 'undirected'}): passed={report.passed} counts={report.counts}")
    return report


def _run_axiom_checks(bounds, directed, compose, report, fail) -> None:
    objects = object_universe(bounds, directed)
    homs: dict[tuple[Multicorolla, Multicorolla], list[CorollaMorphism]] = {}
    for m in objects:
        for n in objects:
            found = hom(m, n, directed)
            if found:
                homs[(m, n)] = found
    morphisms = [p for found in homs.values() for p in found]
    hom_sets = {key: set(found) for key, found in homs.items()}
    outgoing: dict[Multicorolla, list[CorollaMorphism]] = {}
    for p in morphisms:
        outgoing.setdefault(p.source, []).append(p)
    logger.info(f"enumerated {len(objects)} objects and {len(morphisms)} morphisms")

    # unit laws
    for p in morphisms:
        report.record("unit")
        left = _safe(compose, identity(p.source, directed), p)
        right = _safe(compose, p, identity(p.target, directed))
        if left != p or right != p:
            fail("unit", f"{p.to_json()}")

    # composites, associativity, projection, stability, orientation
    composites: dict[tuple, Union[CorollaMorphism, str]] = {}

    def comp(p, q):
        key = (p.key(), q.key())
        if key not in composites:
            composites[key] = _safe(compose, p, q)
        return composites[key]

    for p in morphisms:
        for q in outgoing.get(p.target, []):
            pq = comp(p, q)
            report.record("composite")
            if isinstance(pq, str):
                if pq != ClosedLoop.code:
                    fail("composite", f"composition raised {pq}")
                continue
            if pq not in hom_sets.get((p.source, q.target), set()):
                fail("composite", f"composite {pq.to_json()} is not a morphism {p.source} -> {q.target}")
                continue
            report.record("projection")
            if project_to_fin(pq) != compose_maps(project_to_fin(p), project_to_fin(q)):
                fail("projection", f"{pq.vertex_map} != {p.vertex_map} then {q.vertex_map}")
            if is_stable(p) and is_stable(q):
                report.record("stability")
                if not is_stable(pq):
                    fail("stability", f"{pq.to_json()}")
            if directed:
                report.record("orientation")
                if forget_orientation(pq) != _safe(compose, forget_orientation(p), forget_orientation(q)):
                    fail("orientation", f"{pq.to_json()}")
            for r in outgoing.get(q.target, []):
                report.record("associativity")
                qr = comp(q, r)
                left = comp(pq, r)
                right = qr if isinstance(qr, str) else comp(p, qr)
                if left != right:
                    fail("associativity", f"{p.key()} | {q.key()} | {r.key()}")

    # disjoint union of single corollas
    singles = [m for m in objects if len(m) == 1]
    for m1, n1, m2, n2 in itertools.product(singles, repeat=4):
        h1 = homs.get((m1, n1), [])
        h2 = homs.get((m2, n2), [])
        if not h1 or not h2:
            continue
        report.record("union")
        block = tuple([1] * len(m1) + [2] * len(m2))
        whole = {p for p in hom(m1 + m2, n1 + n2, directed) if project_to_fin(p) == block}
        unions = {union_morphisms(p, q) for p in h1 for q in h2}
        if whole != unions or len(unions) != len(h1) * len(h2):
            fail("union", f"{m1}+{m2} -> {n1}+{n2}: {len(whole)} morphisms, {len(unions)} unions")

    # relabeling lifts
    for m in objects:
        if len(m) < 2:
            continue
        for sigma in itertools.permutations(range(1, len(m) + 1)):
            report.record("relabel")
            lift = relabel(m, sigma, directed)
            back = relabel(lift.target, [sigma.index(k) + 1 for k in range(1, len(m) + 1)], directed)
            if project_to_fin(lift) != tuple(sigma) or _safe(compose, lift, back) != identity(m, directed):
                fail("relabel", f"{m} along {sigma}")
                continue
            for n in objects:
                before = homs.get((n, m), [])
                if not before:
                    continue
                moved = {_safe(compose, p, lift) for p in before}
                if moved != set(hom(n, lift.target, directed)) or len(moved) != len(before):
                    fail("relabel", f"post-composition with {sigma} is not a bijection from {n}")

    # the fibre over S + T is the product of the fibres over S and over T
    fibres: dict[Multicorolla, dict[Multicorolla, list[CorollaMorphism]]] = {}
    for (m, n), found in homs.items():
        over = [p for p in found if p.vertex_map == tuple(range(1, len(m) + 1))]
        if m and over:
            fibres.setdefault(m, {})[n] = over
    for x, y in itertools.product(fibres, repeat=2):
        if len(x) + len(y) > bounds.max_vertices:
            continue
        source = union_objects(x, y)
        report.record("objects")
        if (source[: len(x)], source[len(x):]) != (x, y):
            fail("objects", f"{x} + {y} does not split back")
            continue
        block = tuple(range(1, len(source) + 1))
        for (x2, ps), (y2, qs) in itertools.product(fibres[x].items(), fibres[y].items()):
            report.record("objects")
            whole = {p for p in hom(source, union_objects(x2, y2), directed) if p.vertex_map == block}
            unions = {union_morphisms(p, q) for p in ps for q in qs}
            if whole != unions or len(unions) != len(ps) * len(qs):
                fail("objects", f"{x}+{y} -> {x2}+{y2}: {len(whole)} morphisms over the identity, {len(unions)} unions")
                continue
            for ps2, qs2 in itertools.product(fibres.get(x2, {}).values(), fibres.get(y2, {}).values()):
                for p, q, p2, q2 in itertools.product(ps, qs, ps2, qs2):
                    left, right = comp(p, p2), comp(q, q2)
                    if isinstance(left, str) or isinstance(right, str):
                        continue
                    report.record("objects")
                    if _safe(compose, union_morphisms(p, q), union_morphisms(p2, q2)) != union_morphisms(left, right):
                        fail("objects", f"union of {p.key()} and {q.key()} does not compose blockwise")


# =============================================================================
# Mutation harness
# =============================================================================

class MutationReport(BaseModel):
    total: int = 0
    detected: int = 0
    undetected: list[str] = Field(default_factory=list)

    @property
    def rate(self) -> float:
        return self.detected / self.total if self.total else 1.0


def _swap_labels(morphism: CorollaMorphism, role: Role) -> CorollaMorphism:
    """Exchange the first two same-direction ports of one corolla."""
    objects = morphism.source if role == Role.SOURCE else morphism.target
    for c, corolla in enumerate(objects, start=1):
        for a, b in itertools.combinations(range(1, corolla.valence + 1), 2):
            if corolla.directions[a - 1] != corolla.directions[b - 1]:
                continue
            swap = {(role, c, a): (role, c, b), (role, c, b): (role, c, a)}
            pairs = frozenset(_pair(swap.get(p, p), swap.get(q, q)) for p, q in morphism.pairs)
            return replace(morphism, pairs=pairs)
    return morphism


def _repair(morphism: CorollaMorphism, rng: random.Random) -> CorollaMorphism:
    """Exchange partners between two random pairs."""
    pairs = morphism.sorted_pairs()
    if len(pairs) < 2:
        return morphism
    i, j = rng.sample(range(len(pairs)), 2)
    (a, b), (c, d) = pairs[i], pairs[j]
    rest = [p for k, p in enumerate(pairs) if k not in (i, j)]
    return replace(morphism, pairs=frozenset(rest + [_pair(a, d), _pair(c, b)]))


def composition_mutants(seed: int = 0, random_mutants: int = 6) -> dict[str, ComposeFn]:
    """Deliberately broken composition laws."""
    mutants: dict[str, ComposeFn] = {
        "first": lambda p, q: p,
        "second": lambda p, q: q,
        "swap_target_labels": lambda p, q: _swap_labels(compose_morphisms(p, q), Role.TARGET),
        "swap_source_labels": lambda p, q: _swap_labels(compose_morphisms(p, q), Role.SOURCE),
        "reversed_order": lambda p, q: compose_morphisms(q, p),
        "constant_vertex_map": lambda p, q: replace(
            compose_morphisms(p, q), vertex_map=(1,) * len(p.source)),
        "drop_pairs": lambda p, q: replace(compose_morphisms(p, q), pairs=frozenset()),
        "multi_vertex_second": lambda p, q: q if len(p.source) > 1 else compose_morphisms(p, q),
    }
    for k in range(random_mutants):
        rng = random.Random(seed * 1000 + k)
        mutants[f"repair_{k}"] = lambda p, q, rng=rng: _repair(compose_morphisms(p, q), rng)
    return mutants


def mutation_harness(bounds: CorollaBounds, directed: bool = True, seed: int = 0) -> MutationReport:
    """Run the axiom check against every mutant and count detections."""
    report = MutationReport()
    for name, mutant in composition_mutants(seed).items():
        report.total += 1
        result = check_operadic_axioms(bounds, directed, compose=mutant, fail_fast=True)
        if result.passed:
            report.undetected.append(name)
        else:
            report.detected += 1
    logger.info(f"mutation harness detected {report.detected}/{report.total}")
    return report


# =============================================================================
# Contraction algebras
# =============================================================================

class ContractionAlgebra(Protocol):
    """What evaluate_contraction needs from an algebra over the corolla operad.

    Ports of an element are numbered from 0; ``glue`` joins port ``a`` of
    ``outer`` to port ``b`` of ``inner`` and lists the remaining ports as
    outer[:a] + inner without b + outer[a+1:].
    """

    def color(self, element: Any) -> tuple[Direction, ...]: ...

    def default(self, corolla: Corolla) -> Any: ...

    def glue(self, outer: Any, a: int, inner: Any, b: int) -> Any: ...

    def selfglue(self, element: Any, a: int, b: int) -> Any: ...

    def unit(self, corolla: Corolla) -> Any: ...

    def normalize(self, element: Any, labels: Sequence[int]) -> Any: ...


class TerminalAlgebra:
    """One element per color: the element is the corolla itself."""

    def color(self, element: Corolla) -> tuple[Direction, ...]:
        return element.directions

    def default(self, corolla: Corolla) -> Corolla:
        return corolla

    def glue(self, outer: Corolla, a: int, inner: Corolla, b: int) -> Corolla:
        rest = inner.directions[:b] + inner.directions[b + 1:]
        return Corolla(outer.genus + inner.genus, outer.directions[:a] + rest + outer.directions[a + 1:])

    def selfglue(self, element: Corolla, a: int, b: int) -> Corolla:
        dirs = [d for k, d in enumerate(element.directions) if k not in (a, b)]
        return Corolla(element.genus + 1, tuple(dirs))

    def unit(self, corolla: Corolla) -> Corolla:
        return corolla

    def normalize(self, element: Corolla, labels: Sequence[int]) -> Corolla:
        dirs: list[Direction] = [Direction.NONE] * len(labels)
        for k, label in enumerate(labels):
            dirs[label - 1] = element.directions[k]
        return Corolla(element.genus, tuple(dirs))


def contraction_orders(morphism: CorollaMorphism) -> list[Pair]:
    """The contractible (interior) pairs of a morphism in canonical order."""
    return [pair for pair in morphism.sorted_pairs() if pair[0][0] == pair[1][0] == Role.SOURCE]


def evaluate_contraction(
    morphism: CorollaMorphism,
    algebra: ContractionAlgebra,
    order: Optional[Sequence[Pair]] = None,
    decorations: Optional[Sequence[Any]] = None,
) -> tuple:
    """Evaluate a morphism in an algebra by contracting edges one at a time.

    Args:
        morphism: The morphism to evaluate.
        algebra: Supplies single-edge contractions.
        order: Interior pairs in contraction order (canonical when omitted).
        decorations: One element per source corolla (algebra.default when omitted).

    Returns:
        One element per target corolla.

    Raises:
        ColorMismatch: If a decoration does not have its corolla's color.
        LabelMismatch: If ``order`` is not an ordering of the interior pairs.
    """
    interior = contraction_orders(morphism)
    order = list(order) if order is not None else interior
    if sorted(_pair(*p) for p in order) != interior:
        raise LabelMismatch("order must list every interior edge exactly once")
    if decorations is None:
        decorations = [algebra.default(c) for c in morphism.source]
    if len(decorations) != len(morphism.source):
        raise ColorMismatch("one decoration per source corolla is required")

    blobs: dict[int, tuple[Any, list[Port]]] = {}
    owner: dict[Port, int] = {}
    for c, (corolla, element) in enumerate(zip(morphism.source, decorations), start=1):
        expected = corolla.directions if morphism.directed else None
        if expected is not None and tuple(algebra.color(element)) != expected:
            raise ColorMismatch(f"decoration {c} does not have color {expected}")
        ports = [(Role.SOURCE, c, label) for label in range(1, corolla.valence + 1)]
        blobs[c] = (element, ports)
        for port in ports:
            owner[port] = c

    for p, q in order:
        p, q = _pair(p, q)
        bp, bq = owner[p], owner[q]
        if bp == bq:
            element, ports = blobs[bp]
            merged = algebra.selfglue(element, ports.index(p), ports.index(q))
            blobs[bp] = (merged, [x for x in ports if x not in (p, q)])
            continue
        if morphism.directed and morphism.direction(p) == Direction.OUT:
            p, q, bp, bq = q, p, bq, bp
        outer, outer_ports = blobs.pop(bp)
        inner, inner_ports = blobs.pop(bq)
        a, b = outer_ports.index(p), inner_ports.index(q)
        merged = algebra.glue(outer, a, inner, b)
        ports = outer_ports[:a] + inner_ports[:b] + inner_ports[b + 1:] + outer_ports[a + 1:]
        blobs[bp] = (merged, ports)
        for port in ports:
            owner[port] = bp

    partner = morphism.partner()
    values: dict[int, Any] = {}
    for key, (element, ports) in blobs.items():
        t = morphism.vertex_map[key - 1]
        values[t] = algebra.normalize(element, [partner[port][2] for port in ports])
    for p, q in morphism.pairs:
        if p[0] == q[0] == Role.TARGET:
            values[p[1]] = algebra.unit(morphism.target[p[1] - 1])
    return tuple(values[t] for t in range(1, len(morphism.target) + 1))
