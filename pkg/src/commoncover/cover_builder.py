"""Generic assembly of a finite common cover from a local system.

A local system packages a finite groupoid of local symmetries over the
vertices of two graphs together with an action on edge atoms, a bar
involution, and two closure axioms:

* AX1 (coverage): every vertex of either graph is the endpoint of a cross
  arrow, and every dart is hit by a cross atom;
* AX2 (bar closure): the atom set anchored at the reverse of a dart is the
  bar image of the atom set anchored at the dart;
* AX3: the groupoid and action axioms themselves.

Given such a system, the cover has one vertex per (cross arrow, copy
index) and one dart per (cross atom, copy index).  The origin of a dart
(a, k) must be some (arrow, j) whose action on the identity atom of a's
anchor yields a; the orbit-stabilizer law makes the counts on the two
sides of this matching agree exactly, and the pairing itself is done in
canonical sorted order so builds are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .graphs import (Graph, GraphError, GraphMorphism, is_covering, side_of,
                     strip_side, validate_graph)
from .groupoids import FiniteGroupoid, lcm_all


class AxiomError(RuntimeError):
    """A local system failed its closure axioms (retry with a larger radius)."""

    def __init__(self, message, radius=None, witness=None):
        super().__init__(message)
        self.radius = radius
        self.witness = witness


@dataclass
class AxiomReport:
    coverage_ok: bool
    bar_ok: bool
    action_ok: bool
    detail: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.coverage_ok and self.bar_ok and self.action_ok


class LocalSystem:
    """Base class for the star, ball and object-graph local systems.

    Subclasses provide the atom representation; the generic cover assembly
    and the axiom checks only use the interface below.
    """

    kind = "abstract"

    def __init__(self, g1: Graph, g2: Graph, union: Graph, groupoid: FiniteGroupoid):
        self.g1 = g1
        self.g2 = g2
        self.union = union
        self.groupoid = groupoid
        self.axioms: Optional[AxiomReport] = None

    # -- atom interface (implemented by subclasses) -------------------------

    def identity_atom(self, dart):
        raise NotImplementedError

    def act(self, arrow, atom):
        raise NotImplementedError

    def act_identity(self, arrow, dart):
        return self.act(arrow, self.identity_atom(dart))

    def bar(self, atom):
        raise NotImplementedError

    def atom_anchor(self, atom) -> str:
        raise NotImplementedError

    def atom_image(self, atom) -> str:
        raise NotImplementedError

    def atom_serial(self, atom):
        raise NotImplementedError

    def orbit_size(self, dart) -> int:
        raise NotImplementedError

    def orbit_darts(self, dart):
        """Image darts of all atoms anchored at the dart."""
        raise NotImplementedError

    def sample_atoms(self):
        """Atoms used for runtime action-axiom checks."""
        return [self.identity_atom(d) for d in self.union.darts]

    def atom_known(self, atom) -> bool:
        """Membership of an atom in the system's closed atom set."""
        return self.atom_image(atom) in set(self.orbit_darts(self.atom_anchor(atom)))

    # -- shared helpers -------------------------------------------------------

    def eps(self, atom) -> str:
        return self.union.origin[self.atom_image(atom)]

    def out_count(self, obj) -> int:
        return self.groupoid.out_count(obj)

    def cross_arrows(self) -> list:
        return sorted((a for a in self.groupoid.arrows
                       if side_of(a.src) == 1 and side_of(a.dst) == 2),
                      key=lambda a: a.serial)

    def check_axioms(self, action_cap: int = 200000) -> AxiomReport:
        union = self.union
        cover_fail = None
        cross = self.cross_arrows()
        sources = {a.src for a in cross}
        targets = {a.dst for a in cross}
        for v in union.vertices:
            if side_of(v) == 1 and v not in sources:
                cover_fail = v
            if side_of(v) == 2 and v not in targets:
                cover_fail = v
        if cover_fail is None:
            for e in union.darts:
                images = self.orbit_darts(e)
                other = 2 if side_of(e) == 1 else 1
                if not any(side_of(f) == other for f in images):
                    cover_fail = e
                    break
        bar_fail = None
        for e in union.darts:
            expect = {union.reverse[f] for f in self.orbit_darts(e)}
            if set(self.orbit_darts(union.reverse[e])) != expect:
                bar_fail = e
                break
        if bar_fail is None:
            # payload-aware closure: the bar of every atom must be an atom
            for atom in self.sample_atoms():
                if not self.atom_known(self.bar(atom)):
                    bar_fail = self.atom_serial(atom)
                    break
        action_fail = self._check_action(action_cap)
        report = AxiomReport(
            cover_fail is None, bar_fail is None, action_fail is None,
            detail=cover_fail or bar_fail or action_fail)
        self.axioms = report
        return report

    def _check_action(self, cap: int) -> Optional[str]:
        checked = 0
        for atom in self.sample_atoms():
            x = self.eps(atom)
            ident = self.groupoid.identities.get(x)
            if ident is None or self.atom_serial(self.act(ident, atom)) != self.atom_serial(atom):
                return "identity action fails over %r" % (x,)
            bar_bar = self.bar(self.bar(atom))
            if self.atom_serial(bar_bar) != self.atom_serial(atom):
                return "bar involution fails at %r" % (self.atom_serial(atom),)
            for g in self.groupoid.by_source.get(x, ()):
                ga = self.act(g, atom)
                if self.eps(ga) != g.dst:
                    return "action target mismatch at %r" % (g.serial,)
                if self.atom_anchor(ga) != self.atom_anchor(atom):
                    return "action moved an atom anchor at %r" % (g.serial,)
                for h in self.groupoid.by_source.get(g.dst, ()):
                    checked += 1
                    if checked > cap:
                        return None
                    hg = h.compose(g)
                    if hg is None:
                        return "composition missing at %r" % (h.serial,)
                    if self.atom_serial(self.act(hg, atom)) != self.atom_serial(self.act(h, ga)):
                        return "action compatibility fails at %r" % (h.serial,)
        return None


# -- the cover ----------------------------------------------------------------


@dataclass
class BuiltCover:
    graph: Graph
    mu1: GraphMorphism
    mu2: GraphMorphism
    vertex_label: dict               # vertex id -> (arrow serial, j)
    dart_label: dict                 # dart id -> (atom serial, k)
    degrees: tuple
    n_multiple: int
    kind: str
    component_sizes: tuple
    based_vertex: Optional[str] = None
    full_graph: Optional[Graph] = None


def _internal(msg):
    raise RuntimeError("internal verification failure: " + msg)


def build_cover(sys: LocalSystem, component: str = "least",
                based_at=None) -> BuiltCover:
    """Assemble, verify and return a finite common cover of sys.g1 and sys.g2.

    ``component`` is "least" (default) or "all"; ``based_at`` selects the
    component containing copy 1 of the given seed arrow instead.
    """
    if sys.axioms is None:
        sys.check_axioms()
    if not sys.axioms.ok:
        raise AxiomError("local system failed closure axioms: %r" % (sys.axioms.detail,),
                         witness=sys.axioms.detail)
    union = sys.union
    out = {x: sys.out_count(x) for x in union.vertices}
    if any(c == 0 for c in out.values()):
        raise AxiomError("object without arrows", witness=min(
            x for x, c in out.items() if c == 0))
    n_mult = lcm_all(out.values())
    orbit = {e: sys.orbit_size(e) for e in union.darts}
    for e, size in orbit.items():
        if out[union.origin[e]] % size != 0 or n_mult % size != 0:
            _internal("orbit size does not divide the arrow count at %r" % (e,))

    cross = sys.cross_arrows()
    vertex_ids = {}
    vertex_label = {}
    vertex_colour = {}
    pull_colour_1 = bool(sys.g1.vertex_colour) or bool(sys.g1.dart_colour)
    for a in cross:
        reps = n_mult // out[a.src]
        for j in range(1, reps + 1):
            vid = "v%06d" % len(vertex_ids)
            vertex_ids[(a.serial, j)] = vid
            vertex_label[vid] = (a.serial, j)
            colour = (sys.g1.vertex_colour.get(strip_side(a.src))
                      if pull_colour_1 else
                      sys.g2.vertex_colour.get(strip_side(a.dst)))
            if colour is not None:
                vertex_colour[vid] = colour

    # group cover vertices by the atom their action produces at each star dart
    groups = {}
    atoms = {}
    arrow_of = {a.serial: a for a in cross}
    for a in cross:
        reps = n_mult // out[a.src]
        for e in union.star(a.src):
            atom = sys.act_identity(a, e)
            key = sys.atom_serial(atom)
            atoms.setdefault(key, atom)
            slot = groups.setdefault(key, [])
            for j in range(1, reps + 1):
                slot.append(vertex_ids[(a.serial, j)])

    # every cross atom must be realised: the groupoid is closed, so any atom
    # anchored on side 1 with image on side 2 arises from some cross arrow
    dart_ids = {}
    dart_label = {}
    origin = {}
    dart_colour = {}
    order = sorted(groups)
    for key in order:
        atom = atoms[key]
        anchor = sys.atom_anchor(atom)
        expected = n_mult // orbit[anchor]
        members = groups[key]
        if len(members) != expected:
            _internal("matching count at atom %r: %d != %d"
                      % (key, len(members), expected))
        for k in range(1, expected + 1):
            did = "d%06d" % len(dart_ids)
            dart_ids[(key, k)] = did
            dart_label[did] = (key, k)
            origin[did] = members[k - 1]
            colour = (sys.g1.dart_colour.get(strip_side(anchor))
                      if pull_colour_1 else
                      sys.g2.dart_colour.get(strip_side(sys.atom_image(atom))))
            if colour is not None:
                dart_colour[did] = colour
    reverse = {}
    for key in order:
        atom = atoms[key]
        bar_key = sys.atom_serial(sys.bar(atom))
        if bar_key not in groups:
            _internal("bar atom not realised for %r" % (key,))
        expected = n_mult // orbit[sys.atom_anchor(atom)]
        for k in range(1, expected + 1):
            reverse[dart_ids[(key, k)]] = dart_ids[(bar_key, k)]

    graph = Graph(vertex_ids.values(), dart_ids.values(), origin, reverse,
                  vertex_colour, dart_colour)
    check = validate_graph(graph)
    if not check.ok:
        _internal("assembled graph invalid: " + check.violations[0])

    mu1 = GraphMorphism(
        graph, sys.g1,
        {vid: strip_side(arrow_of[lab[0]].src) for vid, lab in vertex_label.items()},
        {did: strip_side(sys.atom_anchor(atoms[lab[0]])) for did, lab in dart_label.items()})
    mu2 = GraphMorphism(
        graph, sys.g2,
        {vid: strip_side(arrow_of[lab[0]].dst) for vid, lab in vertex_label.items()},
        {did: strip_side(sys.atom_image(atoms[lab[0]])) for did, lab in dart_label.items()})
    for name, mu in (("mu1", mu1), ("mu2", mu2)):
        rep = is_covering(mu)
        if not rep.ok:
            _internal("%s is not a covering: %s at %r" % (name, rep.reason, rep.witness))

    comps = graph.components()
    component_sizes = tuple(len(c) for c in comps)
    based_vertex = None
    if based_at is not None:
        seed_serial = based_at if not hasattr(based_at, "serial") else based_at.serial
        if (seed_serial, 1) not in vertex_ids:
            raise GraphError("seed arrow is not a cross arrow of the system")
        based_vertex = vertex_ids[(seed_serial, 1)]
        chosen = next(c for c in comps if based_vertex in c)
    elif component == "all":
        chosen = None
    elif component == "least":
        chosen = min(comps, key=lambda c: (len(c), c))
    else:
        raise GraphError("unknown component option: %r" % (component,))

    full_graph = None
    if chosen is not None:
        full_graph = graph
        keep = set(chosen)
        sub = graph.restrict(chosen)
        mu1 = GraphMorphism(sub, sys.g1,
                            {v: mu1.vmap[v] for v in sub.vertices},
                            {d: mu1.dmap[d] for d in sub.darts})
        mu2 = GraphMorphism(sub, sys.g2,
                            {v: mu2.vmap[v] for v in sub.vertices},
                            {d: mu2.dmap[d] for d in sub.darts})
        vertex_label = {v: vertex_label[v] for v in sub.vertices}
        dart_label = {d: dart_label[d] for d in sub.darts}
        graph = sub
        for name, mu in (("mu1", mu1), ("mu2", mu2)):
            rep = is_covering(mu)
            if not rep.ok:
                _internal("component %s lost the covering property" % name)

    nv = len(graph.vertices)
    if nv % len(sys.g1.vertices) or nv % len(sys.g2.vertices):
        _internal("cover size is not a multiple of a base size")
    degrees = (nv // len(sys.g1.vertices), nv // len(sys.g2.vertices))
    return BuiltCover(graph, mu1, mu2, vertex_label, dart_label, degrees,
                      n_mult, sys.kind, component_sizes, based_vertex, full_graph)


# -- certificates for the ball backend ---------------------------------------


@dataclass
class CertificateEntry:
    tree_vertex: tuple
    arrow_serial: tuple
    matches_label: bool
    witness_ok: bool


@dataclass
class RestrictionCertificate:
    """Per-ball witnesses that the induced tree automorphism is locally
    a restriction of a product of deck transformations."""

    radius: int
    test_radius: int
    entries: list
    fixes_base_ball: Optional[bool] = None

    @property
    def mismatches(self) -> int:
        return sum(1 for e in self.entries
                   if not (e.matches_label and e.witness_ok))

    @property
    def ok(self) -> bool:
        return self.mismatches == 0


def extract_certificate(built: BuiltCover, sys, test_radius: int,
                        check_fixed_ball: bool = False) -> RestrictionCertificate:
    """Certify the ball restrictions of the tree automorphism induced by a
    connected built cover.

    Lifts the first covering through the cover by path lifting, reads off
    the comparison map between the two universal covers, normalises its
    restriction to every R-ball within the test radius to canonical lifts,
    and matches the result against the arrow labelling the lifted vertex.
    Every matched arrow's witness word is re-evaluated from scratch.
    """
    if sys.kind != "ball":
        raise GraphError("certificates require a ball-system cover")
    if not built.graph.is_connected():
        raise GraphError("certificate extraction needs a connected cover")
    c1, c2, alignment, radius = sys.cover1, sys.cover2, sys.alignment, sys.radius
    graph, mu1, mu2 = built.graph, built.mu1, built.mu2
    v0 = c1.basepoint
    if built.based_vertex is not None:
        g0 = built.based_vertex
        if mu1.vmap[g0] != v0:
            raise GraphError("seed vertex does not sit over the basepoint")
    else:
        g0 = min(v for v in graph.vertices if mu1.vmap[v] == v0)

    # dart lookup: (cover vertex, base dart) -> cover dart
    lift_dart = {}
    for d in graph.darts:
        lift_dart[(graph.origin[d], mu1.dmap[d])] = d

    if built.based_vertex is not None:
        z0_image = alignment.apply(())
    else:
        z0_image = c2.canonical_lift(mu2.vmap[g0])

    nu1 = {(): g0}
    psi = {(): z0_image}
    frontier = [()]
    for _ in range(test_radius + radius):
        nxt = []
        for z in frontier:
            for d, w in c1.star_darts(z):
                if w in nu1:
                    continue
                cover_dart = lift_dart[(nu1[z], d)]
                nu1[w] = graph.head(cover_dart)
                psi[w] = c2.step(psi[z], mu2.dmap[cover_dart])
                nxt.append(w)
        frontier = nxt

    from .ball_system import BallArrow, verify_witness

    entries = []
    centers = sorted((z for z in nu1 if len(z) <= test_radius), key=lambda z: (len(z), z))
    for z in centers:
        x = c1.project(z)
        y = c2.project(psi[z])
        zx = c1.canonical_lift(x)
        zy = c2.canonical_lift(y)
        w1 = c1.deck_loop(zx, z)
        w2 = c2.deck_loop(psi[z], zy)
        mapping = tuple(sorted(
            (p, c2.transport(w2, psi[c1.transport(w1, p)]))
            for p in c1.ball(zx, radius).vertices))
        found = BallArrow("1:" + x, "2:" + y, mapping)
        serial = found.serial
        arrow = sys.groupoid.by_serial.get(serial)
        if arrow is None:
            raise AxiomError("ball restriction escaped the discovered groupoid at %r"
                             % (z,), witness=serial)
        matches = built.vertex_label[nu1[z]][0] == serial
        entries.append(CertificateEntry(z, serial, matches,
                                        verify_witness(arrow, sys)))

    fixed = None
    if check_fixed_ball:
        fixed = all(psi[p] == alignment.apply(p)
                    for p in c1.ball((), radius).vertices)
    return RestrictionCertificate(radius, test_radius, entries, fixed)
