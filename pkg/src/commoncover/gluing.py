"""Weighted-gluing assembly: an independent second backend.

Cross arrows of a ball local system play the role of polyhedron classes
(each is a normalised identification between a ball around a vertex of the
first graph and one of the second); cross atoms, grouped with their bar
partners, play the role of face classes.  An orientation of the darts
splits the two sides of every face class; the weight of a polyhedron class
is the replication count the generic builder would give it, and the
orbit-stabilizer law makes the per-face balance equations hold exactly in
integer arithmetic.  Taking that many copies of each polyhedron and gluing
matched face slots in canonical order yields a graph all of whose
components cover both inputs.

Systems whose atoms identify a dart with a reversed dart admit no
orientation; the pipeline entry point subdivides both inputs once (which
always removes the obstruction for alignment-generated systems, because
subdivision midpoints are preserved), reruns, and contracts the result
back to covers of the original graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ball_system import build_ball_system_retrying
from .cover_builder import LocalSystem
from .graphs import (Graph, GraphMorphism, is_covering, strip_side,
                     validate_graph)
from .groupoids import lcm_all


class OrientationError(RuntimeError):
    """No consistent dart orientation exists: subdivide the inputs."""


def orient_darts(sys: LocalSystem) -> dict:
    """Two-colour the darts so that atoms join like signs and reversal flips
    the sign; raises ``OrientationError`` when impossible."""
    union = sys.union
    same = {d: [] for d in union.darts}
    for e in union.darts:
        for f in sys.orbit_darts(e):
            same[e].append(f)
            same[f].append(e)
    sign = {}
    for d0 in union.darts:
        if d0 in sign:
            continue
        sign[d0] = 1
        queue = [d0]
        while queue:
            d = queue.pop(0)
            rd = union.reverse[d]
            for f, s in [(x, sign[d]) for x in same[d]] + [(rd, -sign[d])]:
                if f not in sign:
                    sign[f] = s
                    queue.append(f)
                elif sign[f] != s:
                    raise OrientationError("orientation required: subdivide")
    return sign


@dataclass
class FaceClass:
    atom: object                   # the representative with positive anchor
    serial: tuple
    left: list                     # arrows whose action on the anchor identity gives the atom
    right: list


@dataclass
class PairsAndFaces:
    pairs: list                    # cross arrows, sorted
    faces: dict                    # serial -> FaceClass
    orientation: dict


def enumerate_pairs(sys: LocalSystem) -> PairsAndFaces:
    orientation = orient_darts(sys)
    union = sys.union
    pairs = sys.cross_arrows()
    faces = {}
    for arrow in pairs:
        for e in union.star(arrow.src):
            atom = sys.act_identity(arrow, e)
            if orientation[e] == 1:
                key = sys.atom_serial(atom)
                face = faces.setdefault(key, FaceClass(atom, key, [], []))
                face.left.append(arrow)
            else:
                rep = sys.bar(atom)
                key = sys.atom_serial(rep)
                face = faces.setdefault(key, FaceClass(rep, key, [], []))
                face.right.append(arrow)
    for face in faces.values():
        face.left.sort(key=lambda a: a.serial)
        face.right.sort(key=lambda a: a.serial)
        if not face.left or not face.right:
            raise RuntimeError("internal verification failure: one-sided face")
    return PairsAndFaces(pairs, faces, orientation)


@dataclass
class WeightFn:
    base: dict                     # arrow serial -> exact rational weight
    scale: int
    integral: dict                 # arrow serial -> positive integer

    def weight(self, arrow) -> int:
        return self.integral[arrow.serial]


def gluing_weights(sys: LocalSystem, data: PairsAndFaces) -> WeightFn:
    """Stabilizer-index weights, with every balance equation verified
    exactly: for each face, both side sums equal scale/orbit-size."""
    out = {x: sys.out_count(x) for x in sys.union.vertices}
    scale = lcm_all(out.values())
    base, integral = {}, {}
    for arrow in data.pairs:
        base[arrow.serial] = Fraction(1, out[arrow.src])
        integral[arrow.serial] = scale // out[arrow.src]
    for face in data.faces.values():
        anchor = sys.atom_anchor(face.atom)
        expected = scale // sys.orbit_size(anchor)
        left_sum = sum(integral[a.serial] for a in face.left)
        right_sum = sum(integral[a.serial] for a in face.right)
        if left_sum != expected or right_sum != expected:
            raise RuntimeError(
                "internal verification failure: gluing equation imbalance "
                "at face %r (%d vs %d vs %d)" % (face.serial, left_sum,
                                                 right_sum, expected))
        # per-face coset correspondence: side count * weight = face count
        x = sys.union.origin[anchor]
        if len(face.left) * sys.orbit_size(anchor) != out[x]:
            raise RuntimeError("internal verification failure: coset count "
                               "at face %r" % (face.serial,))
    return WeightFn(base, scale, integral)


@dataclass
class GluedCover:
    graph: Graph
    mu1: GraphMorphism
    mu2: GraphMorphism
    weights: WeightFn
    component_sizes: tuple
    subdivided: bool = False


def assemble(sys: LocalSystem, data: PairsAndFaces, weights: WeightFn,
             component: str = "all") -> GluedCover:
    """Glue weighted polyhedron copies along matched face slots."""
    union = sys.union
    instance_ids = {}
    for arrow in data.pairs:
        for c in range(1, weights.weight(arrow) + 1):
            instance_ids[(arrow.serial, c)] = "p%06d" % len(instance_ids)
    vmap1, vmap2, vcol = {}, {}, {}
    arrow_by_serial = {a.serial: a for a in data.pairs}
    for (serial, c), pid in instance_ids.items():
        arrow = arrow_by_serial[serial]
        vmap1[pid] = strip_side(arrow.src)
        vmap2[pid] = strip_side(arrow.dst)
        colour = sys.g1.vertex_colour.get(vmap1[pid])
        if colour is not None:
            vcol[pid] = colour
    darts, origin, reverse, dmap1, dmap2, dcol = [], {}, {}, {}, {}, {}
    for key in sorted(data.faces):
        face = data.faces[key]
        anchor = sys.atom_anchor(face.atom)
        image = sys.atom_image(face.atom)
        left_slots = [(a, c) for a in face.left
                      for c in range(1, weights.weight(a) + 1)]
        right_slots = [(a, c) for a in face.right
                       for c in range(1, weights.weight(a) + 1)]
        if len(left_slots) != len(right_slots):
            raise RuntimeError("internal verification failure: slot imbalance")
        for k, ((la, lc), (ra, rc)) in enumerate(zip(left_slots, right_slots)):
            dl = "d%06dL" % len(darts)
            dr = "d%06dR" % len(darts)
            darts += [dl, dr]
            origin[dl] = instance_ids[(la.serial, lc)]
            origin[dr] = instance_ids[(ra.serial, rc)]
            reverse[dl], reverse[dr] = dr, dl
            dmap1[dl] = strip_side(anchor)
            dmap1[dr] = strip_side(union.reverse[anchor])
            dmap2[dl] = strip_side(image)
            dmap2[dr] = strip_side(union.reverse[image])
            for d in (dl, dr):
                colour = sys.g1.dart_colour.get(dmap1[d])
                if colour is not None:
                    dcol[d] = colour
    graph = Graph(instance_ids.values(), darts, origin, reverse, vcol, dcol)
    check = validate_graph(graph)
    if not check.ok:
        raise RuntimeError("internal verification failure: " + check.violations[0])
    mu1 = GraphMorphism(graph, sys.g1, vmap1, dmap1)
    mu2 = GraphMorphism(graph, sys.g2, vmap2, dmap2)
    for name, mu in (("mu1", mu1), ("mu2", mu2)):
        rep = is_covering(mu)
        if not rep.ok:
            raise RuntimeError("internal verification failure: glued %s: %s at %r"
                               % (name, rep.reason, rep.witness))
    comps = graph.components()
    sizes = tuple(len(c) for c in comps)
    if component == "least":
        chosen = min(comps, key=lambda c: (len(c), c))
        graph = graph.restrict(chosen)
        mu1 = GraphMorphism(graph, sys.g1, {v: vmap1[v] for v in graph.vertices},
                            {d: dmap1[d] for d in graph.darts})
        mu2 = GraphMorphism(graph, sys.g2, {v: vmap2[v] for v in graph.vertices},
                            {d: dmap2[d] for d in graph.darts})
    return GluedCover(graph, mu1, mu2, weights, sizes)


# -- subdivision fallback -------------------------------------------------------


@dataclass
class SubdivisionInfo:
    graph: Graph                    # the subdivided graph
    midpoints: set
    original_dart: dict             # outward sub-dart -> original dart


def subdivide_graph(g: Graph) -> SubdivisionInfo:
    """Insert a midpoint on every geometric edge.

    Each original dart e from u yields an outward dart e.o from u to the
    midpoint and its reversal e.i back; darts keep their colours on the
    outward half.
    """
    vertices = list(g.vertices)
    midpoints = {}
    for d in g.edge_reps():
        midpoints[d] = "m.%s" % d
    vertices += sorted(midpoints.values())
    darts, origin, reverse, dcol = [], {}, {}, {}
    for d in g.darts:
        rep = min(d, g.reverse[d])
        out_d, in_d = d + ".o", d + ".i"
        darts += [out_d, in_d]
        origin[out_d] = g.origin[d]
        origin[in_d] = midpoints[rep]
        reverse[out_d], reverse[in_d] = in_d, out_d
        if d in g.dart_colour:
            dcol[out_d] = g.dart_colour[d]
    sub = Graph(vertices, darts, origin, reverse, dict(g.vertex_colour), dcol)
    return SubdivisionInfo(sub, set(midpoints.values()),
                           {d + ".o": d for d in g.darts})


def contract_subdivided(cover: Graph, mu1: GraphMorphism, mu2: GraphMorphism,
                        info1: SubdivisionInfo, info2: SubdivisionInfo,
                        g1: Graph, g2: Graph):
    """Contract the midpoint fibres of a cover of two subdivided graphs,
    producing coverings of the original graphs."""
    keep_vertices = []
    mid_vertices = []
    for v in cover.vertices:
        over_mid1 = mu1.vmap[v] in info1.midpoints
        over_mid2 = mu2.vmap[v] in info2.midpoints
        if over_mid1 != over_mid2:
            raise RuntimeError("internal verification failure: midpoint fibres "
                               "disagree at %r" % (v,))
        (mid_vertices if over_mid1 else keep_vertices).append(v)
    kept_darts = [d for d in cover.darts if mu1.dmap[d] in info1.original_dart]
    new_reverse = {}
    for w in mid_vertices:
        ds = cover.star(w)
        if len(ds) != 2:
            raise RuntimeError("internal verification failure: midpoint degree")
        a, b = cover.reverse[ds[0]], cover.reverse[ds[1]]
        new_reverse[a], new_reverse[b] = b, a
    graph = Graph(keep_vertices, kept_darts,
                  {d: cover.origin[d] for d in kept_darts},
                  new_reverse,
                  {v: c for v, c in cover.vertex_colour.items()
                   if v in set(keep_vertices)},
                  {d: c for d, c in cover.dart_colour.items() if d in set(kept_darts)})
    out1 = GraphMorphism(graph, g1,
                         {v: mu1.vmap[v] for v in keep_vertices},
                         {d: info1.original_dart[mu1.dmap[d]] for d in kept_darts})
    out2 = GraphMorphism(graph, g2,
                         {v: mu2.vmap[v] for v in keep_vertices},
                         {d: info2.original_dart[mu2.dmap[d]] for d in kept_darts})
    for mu in (out1, out2):
        rep = is_covering(mu)
        if not rep.ok:
            raise RuntimeError("internal verification failure: contracted cover: "
                               "%s at %r" % (rep.reason, rep.witness))
    return graph, out1, out2


def build_glued_cover(g1: Graph, g2: Graph, radius: int = 1,
                      explore_radius=None, component: str = "least",
                      sys=None) -> GluedCover:
    """Full pipeline: ball system, orientation, weights, assembly; falls
    back to subdividing both inputs once when orientation is impossible."""
    if sys is None:
        sys = build_ball_system_retrying(g1, g2, radius, explore_radius)
    try:
        data = enumerate_pairs(sys)
    except OrientationError:
        info1 = subdivide_graph(g1)
        info2 = subdivide_graph(g2)
        inner_sys = build_ball_system_retrying(info1.graph, info2.graph, radius,
                                               explore_radius)
        data = enumerate_pairs(inner_sys)
        weights = gluing_weights(inner_sys, data)
        glued = assemble(inner_sys, data, weights, component="all")
        graph, mu1, mu2 = contract_subdivided(glued.graph, glued.mu1, glued.mu2,
                                              info1, info2, g1, g2)
        sizes = tuple(len(c) for c in graph.components())
        if component == "least":
            comps = graph.components()
            chosen = min(comps, key=lambda c: (len(c), c))
            graph = graph.restrict(chosen)
            mu1 = GraphMorphism(graph, g1, {v: mu1.vmap[v] for v in graph.vertices},
                                {d: mu1.dmap[d] for d in graph.darts})
            mu2 = GraphMorphism(graph, g2, {v: mu2.vmap[v] for v in graph.vertices},
                                {d: mu2.dmap[d] for d in graph.darts})
            for mu in (mu1, mu2):
                if not is_covering(mu).ok:
                    raise RuntimeError("internal verification failure: "
                                       "contracted component")
        return GluedCover(graph, mu1, mu2, weights, sizes, subdivided=True)
    weights = gluing_weights(sys, data)
    return assemble(sys, data, weights, component=component)
