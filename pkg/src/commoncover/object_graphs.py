"""Graphs of finite objects: star maps, their closure, and object covers.

The concrete category here is finite directed multigraphs with optional
vertex and edge labels.  Structure-preserving maps (label and incidence
preserving, possibly non-bijective) decorate graph edges; bijective ones
play the role of isomorphisms in star maps and coverings.  Composites of
bijective and plain maps stay plain, so the two classes interact the way
the constructions require.

A star map from u to v consists of a bijection of stars plus a bijective
object map per dart, such that some single vertex object map makes every
decoration square commute; that vertex map is carried along but is not
part of a star map's identity.  Star maps compose dart-wise, the closure
of a seed set is a finite groupoid, and the induced local system feeds the
generic cover assembly, after which the cover is decorated with objects
pulled back from the first graph.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import lcm
from typing import Optional

from .cover_builder import AxiomError, BuiltCover, LocalSystem, build_cover
from .graphs import (Graph, GraphError, GraphMorphism, disjoint_union,
                     is_covering, side_of, strip_side, validate_graph)
from .groupoids import saturate


# -- finite labelled multigraph objects and their maps -----------------------


@dataclass(frozen=True)
class FiniteObject:
    vertices: tuple
    edges: tuple                       # (edge id, src, dst, label)
    vertex_labels: tuple = ()          # (vertex, label)

    @cached_property
    def vlabel(self) -> dict:
        return dict(self.vertex_labels)

    @cached_property
    def edge_by_id(self) -> dict:
        return {e[0]: e for e in self.edges}


def make_object(vertices, edges=(), vertex_labels=()) -> FiniteObject:
    return FiniteObject(tuple(sorted(vertices)),
                        tuple(sorted(edges)),
                        tuple(sorted(vertex_labels)))


@dataclass(frozen=True)
class ObjMorphism:
    vmap: tuple
    emap: tuple

    @cached_property
    def vdict(self) -> dict:
        return dict(self.vmap)

    @cached_property
    def edict(self) -> dict:
        return dict(self.emap)

    @property
    def serial(self):
        return (self.vmap, self.emap)


def obj_morphism(vmap: dict, emap: dict) -> ObjMorphism:
    return ObjMorphism(tuple(sorted(vmap.items())), tuple(sorted(emap.items())))


def obj_identity(x: FiniteObject) -> ObjMorphism:
    return obj_morphism({v: v for v in x.vertices}, {e[0]: e[0] for e in x.edges})


def obj_compose(outer: ObjMorphism, inner: ObjMorphism) -> ObjMorphism:
    return obj_morphism({v: outer.vdict[w] for v, w in inner.vmap},
                        {e: outer.edict[f] for e, f in inner.emap})


def obj_invert(m: ObjMorphism) -> ObjMorphism:
    return obj_morphism({w: v for v, w in m.vmap}, {f: e for e, f in m.emap})


def object_map_violations(x: FiniteObject, y: FiniteObject, m: ObjMorphism) -> list:
    bad = []
    yv = set(y.vertices)
    for v in x.vertices:
        w = m.vdict.get(v)
        if w not in yv:
            bad.append("vertex %r has no valid image" % (v,))
        elif x.vlabel.get(v) != y.vlabel.get(w):
            bad.append("vertex label not preserved at %r" % (v,))
    for eid, src, dst, lab in x.edges:
        fid = m.edict.get(eid)
        if fid not in y.edge_by_id:
            bad.append("edge %r has no valid image" % (eid,))
            continue
        _, fsrc, fdst, flab = y.edge_by_id[fid]
        if (m.vdict.get(src), m.vdict.get(dst)) != (fsrc, fdst):
            bad.append("incidence not preserved at edge %r" % (eid,))
        if lab != flab:
            bad.append("edge label not preserved at %r" % (eid,))
    return bad


def is_object_iso(x: FiniteObject, y: FiniteObject, m: ObjMorphism) -> bool:
    if object_map_violations(x, y, m):
        return False
    return (sorted(m.vdict.values()) == sorted(y.vertices)
            and len(set(m.vdict.values())) == len(x.vertices)
            and sorted(m.edict.values()) == sorted(e[0] for e in y.edges)
            and len(set(m.edict.values())) == len(x.edges))


def all_object_isos(x: FiniteObject, y: FiniteObject) -> list:
    """All bijective structure-preserving maps (tiny objects only)."""
    if len(x.vertices) != len(y.vertices) or len(x.edges) != len(y.edges):
        return []
    out = []
    for perm in itertools.permutations(y.vertices):
        vmap = dict(zip(x.vertices, perm))
        if any(x.vlabel.get(v) != y.vlabel.get(w) for v, w in vmap.items()):
            continue
        groups_x = {}
        for eid, s, d, lab in x.edges:
            groups_x.setdefault((vmap[s], vmap[d], lab), []).append(eid)
        groups_y = {}
        for fid, s, d, lab in y.edges:
            groups_y.setdefault((s, d, lab), []).append(fid)
        if sorted(groups_x) != sorted(groups_y):
            continue
        if any(len(groups_x[k]) != len(groups_y[k]) for k in groups_x):
            continue
        keys = sorted(groups_x)
        pools = [itertools.permutations(groups_y[k]) for k in keys]
        for combo in itertools.product(*pools):
            emap = {}
            for k, perm_e in zip(keys, combo):
                emap.update(zip(groups_x[k], perm_e))
            out.append(obj_morphism(vmap, emap))
    return out


# -- graphs of objects ---------------------------------------------------------


@dataclass
class ObjectGraph:
    graph: Graph
    vertex_objects: dict
    edge_objects: dict                 # per dart; shared between a dart and its reverse
    edge_morphisms: dict               # dart -> map from its edge object into the origin's object


def validate_object_graph(x: ObjectGraph):
    report = validate_graph(x.graph)
    bad = list(report.violations)
    for v in x.graph.vertices:
        if v not in x.vertex_objects:
            bad.append("missing vertex object at %r" % (v,))
    for d in x.graph.darts:
        if d not in x.edge_objects:
            bad.append("missing edge object at %r" % (d,))
            continue
        if x.edge_objects[d] != x.edge_objects.get(x.graph.reverse[d]):
            bad.append("edge objects differ across the reversal at %r" % (d,))
        m = x.edge_morphisms.get(d)
        if m is None:
            bad.append("missing edge morphism at %r" % (d,))
            continue
        target = x.vertex_objects.get(x.graph.origin[d])
        if target is not None:
            errs = object_map_violations(x.edge_objects[d], target, m)
            if errs:
                bad.append("edge morphism not structure-preserving at %r: %s"
                           % (d, errs[0]))
    report.violations = bad
    report.ok = not bad
    return report


# -- star maps -----------------------------------------------------------------


class SeedError(ValueError):
    """A seed star map admits no compatible vertex object map."""

    def __init__(self, message, square=None):
        super().__init__(message)
        self.square = square


@dataclass(frozen=True)
class StarMapArrow:
    """Star bijection decorated with invertible edge-object maps.

    The vertex map is a stored witness of compatibility and is excluded
    from identity: two star maps with the same dart data are equal even if
    their stored vertex maps differ.
    """

    src: str
    dst: str
    bij: tuple                                     # prefixed dart pairs
    edge_maps: tuple                               # (prefixed dart, ObjMorphism)
    vertex_map: ObjMorphism = field(compare=False, default=None)

    @cached_property
    def serial(self):
        flat = tuple((d, m.serial) for d, m in self.edge_maps)
        return ("smap", self.src, self.dst, self.bij, flat)

    @cached_property
    def _emap_dict(self) -> dict:
        return dict(self.edge_maps)

    def edge_map(self, dart) -> ObjMorphism:
        return self._emap_dict[dart]

    def compose(self, other: "StarMapArrow"):
        # dart pairs stay sorted by source dart under composition
        if other.dst != self.src:
            return None
        bij = dict(self.bij)
        pairs = tuple((e, bij[f]) for e, f in other.bij)
        emaps = tuple(sorted(
            ((e, obj_compose(self.edge_map(dict(other.bij)[e]), m))
             for e, m in other.edge_maps), key=lambda t: t[0]))
        vm = None
        if self.vertex_map is not None and other.vertex_map is not None:
            vm = obj_compose(self.vertex_map, other.vertex_map)
        return StarMapArrow(other.src, self.dst, pairs, emaps, vm)

    def inverse(self) -> "StarMapArrow":
        bij = tuple(sorted((f, e) for e, f in self.bij))
        fwd = dict(self.bij)
        emaps = tuple(sorted(((fwd[e], obj_invert(m)) for e, m in self.edge_maps),
                             key=lambda t: t[0]))
        vm = obj_invert(self.vertex_map) if self.vertex_map is not None else None
        return StarMapArrow(self.dst, self.src, bij, emaps, vm)


@dataclass(frozen=True)
class ObjectAtom:
    anchor: str
    image: str
    morph: ObjMorphism

    @cached_property
    def serial(self):
        return ("oatom", self.anchor, self.image, self.morph.serial)


class ObjectLocalSystem(LocalSystem):
    kind = "object"

    def __init__(self, x1: ObjectGraph, x2: ObjectGraph, union, groupoid):
        super().__init__(x1.graph, x2.graph, union, groupoid)
        self.x1 = x1
        self.x2 = x2
        self.atoms_by_anchor = {}
        self._fill_atoms()

    def _object_graph_of(self, prefixed):
        return self.x1 if side_of(prefixed) == 1 else self.x2

    def _edge_object(self, dart):
        return self._object_graph_of(dart).edge_objects[strip_side(dart)]

    def _fill_atoms(self):
        atoms = {d: {} for d in self.union.darts}
        for arrow in self.groupoid.arrows:
            for e, f in arrow.bij:
                atom = ObjectAtom(e, f, arrow.edge_map(e))
                atoms[e].setdefault(atom.serial, atom)
        self.atoms_by_anchor = atoms

    def identity_atom(self, dart):
        return ObjectAtom(dart, dart, obj_identity(self._edge_object(dart)))

    def act(self, arrow, atom):
        bij = dict(arrow.bij)
        return ObjectAtom(atom.anchor, bij[atom.image],
                          obj_compose(arrow.edge_map(atom.image), atom.morph))

    def bar(self, atom):
        rev = self.union.reverse
        return ObjectAtom(rev[atom.anchor], rev[atom.image], atom.morph)

    def atom_anchor(self, atom):
        return atom.anchor

    def atom_image(self, atom):
        return atom.image

    def atom_serial(self, atom):
        return atom.serial

    def orbit_size(self, dart):
        return len(self.atoms_by_anchor[dart])

    def orbit_darts(self, dart):
        return tuple(sorted({a.image for a in self.atoms_by_anchor[dart].values()}))

    def atom_known(self, atom) -> bool:
        return atom.serial in self.atoms_by_anchor[atom.anchor]

    def sample_atoms(self):
        out = []
        for dart in self.union.darts:
            for s in sorted(self.atoms_by_anchor[dart]):
                out.append(self.atoms_by_anchor[dart][s])
        return out

    def isotropy(self, dart) -> list:
        """Invertible self-maps of the dart's edge object induced by star
        maps fixing the dart."""
        return sorted((a.morph for a in self.atoms_by_anchor[dart].values()
                       if a.image == dart), key=lambda m: m.serial)

    def isotropy_lcm(self) -> int:
        out = 1
        for dart in self.union.darts:
            out = lcm(out, len(self.isotropy(dart)))
        return out


@dataclass
class SeedSpec:
    """A seed star map between a vertex of the first object graph and one of
    the second, in raw (unprefixed) identifiers."""

    src: str
    dst: str
    dart_map: dict
    edge_maps: dict
    vertex_map: Optional[ObjMorphism] = None


def _check_star_map(x1: ObjectGraph, x2: ObjectGraph, seed: SeedSpec) -> StarMapArrow:
    g1, g2 = x1.graph, x2.graph
    star_u = g1.star(seed.src)
    if sorted(seed.dart_map) != list(star_u):
        raise SeedError("seed dart map must cover the source star exactly")
    if sorted(seed.dart_map.values()) != list(g2.star(seed.dst)):
        raise SeedError("seed dart map must hit the target star exactly")
    for e, f in seed.dart_map.items():
        m = seed.edge_maps.get(e)
        if m is None or not is_object_iso(x1.edge_objects[e], x2.edge_objects[f], m):
            raise SeedError("edge map at %r is not an object isomorphism" % (e,))
    xu = x1.vertex_objects[seed.src]
    yv = x2.vertex_objects[seed.dst]

    def squares_ok(su):
        for e, f in seed.dart_map.items():
            left = obj_compose(su, x1.edge_morphisms[e])
            right = obj_compose(x2.edge_morphisms[f], seed.edge_maps[e])
            if left != right:
                return (e, f)
        return None

    if seed.vertex_map is not None:
        if not is_object_iso(xu, yv, seed.vertex_map):
            raise SeedError("seed vertex map is not an object isomorphism")
        square = squares_ok(seed.vertex_map)
        if square is not None:
            raise SeedError("decoration square fails at darts %r -> %r" % square,
                            square=square)
        vm = seed.vertex_map
    else:
        vm = None
        last = None
        for cand in all_object_isos(xu, yv):
            square = squares_ok(cand)
            if square is None:
                vm = cand
                break
            last = square
        if vm is None:
            raise SeedError("no compatible vertex map for the seed at %r (square %r)"
                            % (seed.src, last), square=last)
    return StarMapArrow(
        "1:" + seed.src, "2:" + seed.dst,
        tuple(sorted(("1:" + e, "2:" + f) for e, f in seed.dart_map.items())),
        tuple(sorted((("1:" + e, m) for e, m in seed.edge_maps.items()),
                     key=lambda t: t[0])),
        vm)


def close_star_maps(x1: ObjectGraph, x2: ObjectGraph, seeds,
                    isotropy_cap: int = 512) -> ObjectLocalSystem:
    """Saturate seed star maps into an object local system, with axiom and
    isotropy checks."""
    for x in (x1, x2):
        report = validate_object_graph(x)
        if not report.ok:
            raise GraphError("invalid object graph: " + report.violations[0])
    arrows = [_check_star_map(x1, x2, s) if isinstance(s, SeedSpec) else s
              for s in seeds]
    union = disjoint_union(x1.graph, x2.graph)

    def identity_factory(v):
        xg = x1 if side_of(v) == 1 else x2
        raw = strip_side(v)
        prefix = v[:2]
        star = xg.graph.star(raw)
        return StarMapArrow(
            v, v,
            tuple((prefix + d, prefix + d) for d in star),
            tuple((prefix + d, obj_identity(xg.edge_objects[d])) for d in star),
            obj_identity(xg.vertex_objects[raw]))

    groupoid = saturate(arrows, union.vertices, identity_factory)
    sys = ObjectLocalSystem(x1, x2, union, groupoid)
    for dart in union.darts:
        if len(sys.isotropy(dart)) > isotropy_cap:
            raise AxiomError("isotropy group exceeds the configured cap at %r"
                             % (dart,))
    report = sys.check_axioms()
    if not report.ok:
        raise AxiomError("insufficient seeds: closure axioms unmet at %r"
                         % (report.detail,), witness=report.detail)
    return sys


# -- object covers --------------------------------------------------------------


@dataclass
class ObjectGraphMorphism:
    source: ObjectGraph
    target: ObjectGraph
    graph: GraphMorphism
    vertex_morphisms: dict
    edge_morphisms: dict


def verify_object_covering(f: ObjectGraphMorphism):
    """Exhaustive check of the covering conditions; returns (ok, failure)."""
    rep = is_covering(f.graph)
    if not rep.ok:
        return False, "underlying map: %s at %r" % (rep.reason, rep.witness)
    x, y = f.source, f.target
    for d in x.graph.darts:
        if f.edge_morphisms.get(d) != f.edge_morphisms.get(x.graph.reverse[d]):
            return False, "edge morphisms differ across the reversal at %r" % (d,)
    for v in x.graph.vertices:
        m = f.vertex_morphisms.get(v)
        if m is None or not is_object_iso(x.vertex_objects[v],
                                          y.vertex_objects[f.graph.vmap[v]], m):
            return False, "vertex morphism at %r is not invertible" % (v,)
    for d in x.graph.darts:
        m = f.edge_morphisms.get(d)
        if m is None or not is_object_iso(x.edge_objects[d],
                                          y.edge_objects[f.graph.dmap[d]], m):
            return False, "edge morphism at %r is not invertible" % (d,)
        u = x.graph.origin[d]
        left = obj_compose(f.vertex_morphisms[u], x.edge_morphisms[d])
        right = obj_compose(y.edge_morphisms[f.graph.dmap[d]], m)
        if left != right:
            return False, "decoration square fails at dart %r" % (d,)
    return True, None


@dataclass
class ObjectCover:
    cover: ObjectGraph
    mu1: ObjectGraphMorphism
    mu2: ObjectGraphMorphism
    built: BuiltCover


def build_object_cover(sys: ObjectLocalSystem, component: str = "least",
                       based_at=None) -> ObjectCover:
    """Run the generic assembly and decorate the result with objects pulled
    back from the first object graph."""
    built = build_cover(sys, component=component, based_at=based_at)
    x1, x2 = sys.x1, sys.x2
    atom_by_serial = {}
    for slot in sys.atoms_by_anchor.values():
        atom_by_serial.update(slot)
    arrow_by_serial = sys.groupoid.by_serial

    vertex_objects, vmorph1, vmorph2 = {}, {}, {}
    for vid, (arrow_serial, _) in built.vertex_label.items():
        arrow = arrow_by_serial[arrow_serial]
        obj = x1.vertex_objects[strip_side(arrow.src)]
        vertex_objects[vid] = obj
        vmorph1[vid] = obj_identity(obj)
        vmorph2[vid] = arrow.vertex_map
    edge_objects, edge_morphs, emorph1, emorph2 = {}, {}, {}, {}
    for did, (atom_serial, _) in built.dart_label.items():
        atom = atom_by_serial[atom_serial]
        raw = strip_side(atom.anchor)
        obj = x1.edge_objects[raw]
        edge_objects[did] = obj
        edge_morphs[did] = x1.edge_morphisms[raw]
        emorph1[did] = obj_identity(obj)
        emorph2[did] = atom.morph
    cover = ObjectGraph(built.graph, vertex_objects, edge_objects, edge_morphs)
    report = validate_object_graph(cover)
    if not report.ok:
        raise RuntimeError("internal verification failure: " + report.violations[0])
    mu1 = ObjectGraphMorphism(cover, x1, built.mu1, vmorph1, emorph1)
    mu2 = ObjectGraphMorphism(cover, x2, built.mu2, vmorph2, emorph2)
    for name, mu in (("mu1", mu1), ("mu2", mu2)):
        ok, failure = verify_object_covering(mu)
        if not ok:
            raise RuntimeError("internal verification failure: %s: %s"
                               % (name, failure))
    return ObjectCover(cover, mu1, mu2, built)


# -- demo fixture ----------------------------------------------------------------


def rotation_cycle_object(order: int) -> FiniteObject:
    vs = ["o%d" % i for i in range(order)]
    edges = [("r%d" % i, "o%d" % i, "o%d" % ((i + 1) % order), None)
             for i in range(order)]
    return make_object(vs, edges)


def rotation_map(order: int, steps: int = 1) -> ObjMorphism:
    return obj_morphism(
        {"o%d" % i: "o%d" % ((i + steps) % order) for i in range(order)},
        {"r%d" % i: "r%d" % ((i + steps) % order) for i in range(order)})


def rotation_pair(order: int):
    """Two single-loop object graphs over a cyclic object: the first glues
    the loop with identities, the second twists one side by a rotation.

    Returns (x1, x2, seeds).  The seeds are the star maps induced at two
    adjacent vertices of the common chain cover; one alone does not
    generate a bar-closed system (its closure misses the shifted maps),
    which exercises the insufficient-seed error path.
    """
    from .families import rose

    g = rose(1)
    cyc = rotation_cycle_object(order)
    ident = obj_identity(cyc)
    darts = list(g.darts)                  # ["e00.a", "e00.b"]
    x1 = ObjectGraph(g, {"v00": cyc},
                     {d: cyc for d in darts},
                     {d: ident for d in darts})
    x2 = ObjectGraph(g, {"v00": cyc},
                     {d: cyc for d in darts},
                     {"e00.a": ident, "e00.b": rotation_map(order)})
    seeds = []
    for i in (0, 1):
        seeds.append(SeedSpec(
            "v00", "v00",
            {"e00.a": "e00.a", "e00.b": "e00.b"},
            {"e00.a": rotation_map(order, i),
             "e00.b": rotation_map(order, i - 1)},
            vertex_map=rotation_map(order, i)))
    return x1, x2, seeds
