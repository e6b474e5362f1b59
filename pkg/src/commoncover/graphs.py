"""Half-edge (dart) multigraphs, morphisms, stars and covering checks.

A graph is a finite set of vertices together with a finite set of darts
(half-edges).  Every dart knows its origin vertex and its reversal partner;
the reversal map is required to be a fixed-point-free involution, so a
geometric edge is an unordered pair ``{e, reverse(e)}`` and loops and
parallel edges are unambiguous.  Vertices and darts may carry optional
colour labels.

Conventions used throughout the package:

* identifiers are strings, and every iteration runs in sorted identifier
  order, so all derived constructions are deterministic;
* the head of a dart is ``origin(reverse(e))`` and is never stored;
* a morphism maps vertices to vertices and darts to darts, preserving
  origins and reversal; a covering is a surjective morphism restricting to
  a bijection on every star.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional


class GraphError(ValueError):
    """Raised for structurally invalid graphs, morphisms or arguments."""


def _sorted_unique(items: Iterable[str], what: str) -> tuple:
    out = tuple(sorted(items))
    if len(set(out)) != len(out):
        raise GraphError("duplicate %s identifiers" % what)
    return out


class Graph:
    """A finite multigraph in the dart model.

    The constructor is permissive: it accepts structurally broken data
    (non-involutive reversal, missing origins) so that ``validate_graph``
    can report violations instead of crashing.  All operations other than
    validation assume a valid graph.
    """

    __slots__ = ("vertices", "darts", "origin", "reverse",
                 "vertex_colour", "dart_colour", "_star")

    def __init__(self, vertices, darts, origin, reverse,
                 vertex_colour=None, dart_colour=None):
        self.vertices = _sorted_unique(vertices, "vertex")
        self.darts = _sorted_unique(darts, "dart")
        self.origin = dict(origin)
        self.reverse = dict(reverse)
        self.vertex_colour = dict(vertex_colour or {})
        self.dart_colour = dict(dart_colour or {})
        star = {v: [] for v in self.vertices}
        for d in self.darts:
            v = self.origin.get(d)
            if v in star:
                star[v].append(d)
        self._star = {v: tuple(sorted(ds)) for v, ds in star.items()}

    # -- basic queries ----------------------------------------------------

    def star(self, v: str) -> tuple:
        """Sorted darts with origin ``v``."""
        if v not in self._star:
            raise GraphError("vertex not in graph: %r" % (v,))
        return self._star[v]

    def degree(self, v: str) -> int:
        return len(self.star(v))

    def head(self, d: str) -> str:
        """Terminal vertex of a dart: origin of its reversal."""
        return self.origin[self.reverse[d]]

    def edge_reps(self) -> tuple:
        """One canonical dart (the smaller identifier) per geometric edge."""
        return tuple(d for d in self.darts if d <= self.reverse[d])

    def n_edges(self) -> int:
        return len(self.darts) // 2

    def canonical(self) -> tuple:
        """Canonical nested-tuple form, used for equality and serialization."""
        return (
            self.vertices,
            tuple((d, self.reverse.get(d), self.origin.get(d),
                   self.dart_colour.get(d)) for d in self.darts),
            tuple((v, self.vertex_colour.get(v)) for v in self.vertices),
        )

    def __eq__(self, other):
        return isinstance(other, Graph) and self.canonical() == other.canonical()

    def __repr__(self):
        return "Graph(%d vertices, %d darts)" % (len(self.vertices), len(self.darts))

    # -- connectivity ------------------------------------------------------

    def neighbours(self, v: str) -> tuple:
        return tuple(sorted({self.head(d) for d in self.star(v)}))

    def components(self) -> list:
        """Vertex sets of connected components, each sorted, smallest first."""
        seen = set()
        comps = []
        for v0 in self.vertices:
            if v0 in seen:
                continue
            comp = {v0}
            queue = deque([v0])
            while queue:
                v = queue.popleft()
                for w in self.neighbours(v):
                    if w not in comp:
                        comp.add(w)
                        queue.append(w)
            seen |= comp
            comps.append(tuple(sorted(comp)))
        return sorted(comps)

    def is_connected(self) -> bool:
        return len(self.vertices) <= 1 or len(self.components()) == 1

    def restrict(self, vertices) -> "Graph":
        """Induced subgraph on a union of components.

        Darts with exactly one endpoint inside would break the reversal
        involution, so the vertex set must be component-closed.
        """
        vs = set(vertices)
        ds = [d for d in self.darts
              if self.origin[d] in vs and self.head(d) in vs]
        for d in self.darts:
            if self.origin[d] in vs and self.head(d) not in vs:
                raise GraphError("restriction is not component-closed at %r" % d)
        return Graph(
            sorted(vs), ds,
            {d: self.origin[d] for d in ds},
            {d: self.reverse[d] for d in ds},
            {v: c for v, c in self.vertex_colour.items() if v in vs},
            {d: c for d, c in self.dart_colour.items() if d in ds},
        )

    def distances_from(self, v0: str) -> dict:
        dist = {v0: 0}
        queue = deque([v0])
        while queue:
            v = queue.popleft()
            for w in self.neighbours(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        return dist

    def diameter(self) -> int:
        if not self.is_connected():
            raise GraphError("connected graph required")
        best = 0
        for v in self.vertices:
            best = max(best, max(self.distances_from(v).values(), default=0))
        return best


@dataclass
class ValidationReport:
    ok: bool
    violations: list = field(default_factory=list)


def validate_graph(g: Graph) -> ValidationReport:
    """Check the dart-model invariants; violations are data, not failures."""
    bad = []
    vs, ds = set(g.vertices), set(g.darts)
    for d in g.darts:
        v = g.origin.get(d)
        if v is None:
            bad.append("missing origin for dart %r" % d)
        elif v not in vs:
            bad.append("origin of dart %r is not a vertex: %r" % (d, v))
        r = g.reverse.get(d)
        if r is None:
            bad.append("missing reversal for dart %r" % d)
            continue
        if r not in ds:
            bad.append("reversal of dart %r is not a dart: %r" % (d, r))
            continue
        if r == d:
            bad.append("fixed point of reversal: %r" % d)
        elif g.reverse.get(r) != d:
            bad.append("reversal not involutive on pair (%r, %r)" % (d, r))
    return ValidationReport(not bad, bad)


# -- morphisms --------------------------------------------------------------


class GraphMorphism:
    """A map of graphs given by vertex and dart tables."""

    __slots__ = ("source", "target", "vmap", "dmap")

    def __init__(self, source: Graph, target: Graph, vmap: dict, dmap: dict):
        self.source = source
        self.target = target
        self.vmap = dict(vmap)
        self.dmap = dict(dmap)

    def violations(self) -> list:
        bad = []
        for v in self.source.vertices:
            if self.vmap.get(v) not in set(self.target.vertices):
                bad.append("vertex %r has no valid image" % (v,))
        for d in self.source.darts:
            e = self.dmap.get(d)
            if e not in set(self.target.darts):
                bad.append("dart %r has no valid image" % (d,))
                continue
            if self.vmap.get(self.source.origin[d]) != self.target.origin[e]:
                bad.append("origin not preserved at dart %r" % (d,))
            if self.dmap.get(self.source.reverse[d]) != self.target.reverse[e]:
                bad.append("reversal not preserved at dart %r" % (d,))
            sc = self.source.dart_colour.get(d)
            tc = self.target.dart_colour.get(e)
            if sc is not None and tc is not None and sc != tc:
                bad.append("dart colour not preserved at %r" % (d,))
        for v in self.source.vertices:
            sc = self.source.vertex_colour.get(v)
            tc = self.target.vertex_colour.get(self.vmap.get(v))
            if sc is not None and tc is not None and sc != tc:
                bad.append("vertex colour not preserved at %r" % (v,))
        return bad

    def is_valid(self) -> bool:
        return not self.violations()

    def __repr__(self):
        return "GraphMorphism(%r -> %r)" % (self.source, self.target)


def identity_morphism(g: Graph) -> GraphMorphism:
    return GraphMorphism(g, g, {v: v for v in g.vertices}, {d: d for d in g.darts})


def compose_morphisms(outer: GraphMorphism, inner: GraphMorphism) -> GraphMorphism:
    """outer after inner."""
    return GraphMorphism(
        inner.source, outer.target,
        {v: outer.vmap[w] for v, w in inner.vmap.items()},
        {d: outer.dmap[e] for d, e in inner.dmap.items()},
    )


@dataclass
class CoveringReport:
    ok: bool
    reason: Optional[str] = None
    witness: Optional[str] = None


def is_covering(m: GraphMorphism) -> CoveringReport:
    """Decide whether ``m`` is a covering; on failure return a witness.

    Raises ``GraphError`` if ``m`` is not even a graph morphism.
    """
    bad = m.violations()
    if bad:
        raise GraphError("not a graph morphism: " + "; ".join(bad[:3]))
    covered_v = set(m.vmap.values())
    for v in m.target.vertices:
        if v not in covered_v:
            return CoveringReport(False, "vertex not covered", v)
    covered_d = set(m.dmap.values())
    for d in m.target.darts:
        if d not in covered_d:
            return CoveringReport(False, "dart not covered", d)
    for v in m.source.vertices:
        image = [m.dmap[d] for d in m.source.star(v)]
        target_star = m.target.star(m.vmap[v])
        if len(set(image)) != len(image) or sorted(image) != list(target_star):
            return CoveringReport(False, "star map not bijective", v)
    return CoveringReport(True)


# -- constructions -----------------------------------------------------------


def pair_id(a: str, b: str) -> str:
    return "(%s|%s)" % (a, b)


@dataclass
class FiberProduct:
    graph: Graph
    proj1: GraphMorphism
    proj2: GraphMorphism
    vertex_pairs: dict
    dart_pairs: dict


def fiber_product(m1: GraphMorphism, m2: GraphMorphism) -> FiberProduct:
    """Pullback of two coverings onto the same finite graph.

    Vertices are pairs with equal images, darts likewise; both projections
    are again coverings.
    """
    if m1.target != m2.target:
        raise GraphError("fiber product requires coverings onto the same graph")
    for m in (m1, m2):
        if not is_covering(m).ok:
            raise GraphError("fiber product requires coverings")
    g1, g2 = m1.source, m2.source
    vpairs = [(u, v) for u in g1.vertices for v in g2.vertices
              if m1.vmap[u] == m2.vmap[v]]
    dpairs = [(d, e) for d in g1.darts for e in g2.darts
              if m1.dmap[d] == m2.dmap[e]]
    vid = {p: pair_id(*p) for p in vpairs}
    did = {p: pair_id(*p) for p in dpairs}
    origin = {did[(d, e)]: vid[(g1.origin[d], g2.origin[e])] for d, e in dpairs}
    reverse = {did[(d, e)]: did[(g1.reverse[d], g2.reverse[e])] for d, e in dpairs}
    vcol = {vid[(u, v)]: g1.vertex_colour[u] for u, v in vpairs
            if u in g1.vertex_colour}
    dcol = {did[(d, e)]: g1.dart_colour[d] for d, e in dpairs
            if d in g1.dart_colour}
    graph = Graph(vid.values(), did.values(), origin, reverse, vcol, dcol)
    proj1 = GraphMorphism(graph, g1,
                          {vid[p]: p[0] for p in vpairs},
                          {did[p]: p[0] for p in dpairs})
    proj2 = GraphMorphism(graph, g2,
                          {vid[p]: p[1] for p in vpairs},
                          {did[p]: p[1] for p in dpairs})
    return FiberProduct(graph, proj1, proj2,
                        {vid[p]: p for p in vpairs},
                        {did[p]: p for p in dpairs})


def disjoint_union(g1: Graph, g2: Graph, prefix1: str = "1:", prefix2: str = "2:") -> Graph:
    """Disjoint union with prefixed identifiers (used for joint refinement)."""

    def tag(prefix, g):
        return (
            [prefix + v for v in g.vertices],
            [prefix + d for d in g.darts],
            {prefix + d: prefix + v for d, v in g.origin.items()},
            {prefix + d: prefix + e for d, e in g.reverse.items()},
            {prefix + v: c for v, c in g.vertex_colour.items()},
            {prefix + d: c for d, c in g.dart_colour.items()},
        )

    a = tag(prefix1, g1)
    b = tag(prefix2, g2)
    return Graph(a[0] + b[0], a[1] + b[1],
                 {**a[2], **b[2]}, {**a[3], **b[3]},
                 {**a[4], **b[4]}, {**a[5], **b[5]})


def side_of(prefixed: str) -> int:
    """Which input graph a prefixed identifier belongs to (1 or 2)."""
    if prefixed.startswith("1:"):
        return 1
    if prefixed.startswith("2:"):
        return 2
    raise GraphError("identifier %r carries no side prefix" % (prefixed,))


def strip_side(prefixed: str) -> str:
    return prefixed[2:]
