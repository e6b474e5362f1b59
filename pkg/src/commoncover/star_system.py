"""Local systems of star bijections over the vertices of two graphs.

Two construction strategies sit behind one interface:

* ``dr_full``: every bijection between stars of same-block vertices that
  preserves the type (dart colour, reverse colour, head block) of each
  dart.  This system is a groupoid by construction and always satisfies
  the closure axioms.
* ``aligned``: only the star maps induced by an alignment of the two
  universal covers, evaluated at tree vertices within an exploration
  radius, then saturated into a groupoid.  Completeness at a finite radius
  is not guaranteed, so the closure axioms are checked and a failure
  raises ``AxiomError``; callers retry with a larger radius.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .cover_builder import AxiomError, LocalSystem
from .graphs import Graph, GraphError, disjoint_union
from .groupoids import FiniteGroupoid, saturate
from .refinement import JointBlocks, joint_refinement
from .universal_cover import TreeAlignment, UniversalCover, build_alignment

STRATEGY_DR_FULL = "dr_full"
STRATEGY_ALIGNED = "aligned"


@dataclass(frozen=True)
class StarArrow:
    """A bijection between two stars, as sorted (dart, image) pairs."""

    src: str
    dst: str
    bij: tuple

    @cached_property
    def serial(self):
        return ("star", self.src, self.dst, self.bij)

    @cached_property
    def as_dict(self) -> dict:
        return dict(self.bij)

    def compose(self, other: "StarArrow"):
        # bij pairs are kept sorted by source dart, and composition does not
        # touch the source darts, so no re-sort is needed
        if other.dst != self.src:
            return None
        m = self.as_dict
        return StarArrow(other.src, self.dst,
                         tuple((e, m[f]) for e, f in other.bij))

    def inverse(self) -> "StarArrow":
        return StarArrow(self.dst, self.src,
                         tuple(sorted((f, e) for e, f in self.bij)))


def _identity_arrow(union: Graph):
    def factory(x):
        return StarArrow(x, x, tuple((d, d) for d in union.star(x)))
    return factory


class StarLocalSystem(LocalSystem):
    kind = "star"

    def __init__(self, g1, g2, union, groupoid, joint: JointBlocks,
                 strategy: str, explore_radius=None,
                 atom_arrows=(), atom_centers=()):
        super().__init__(g1, g2, union, groupoid)
        self.joint = joint
        self.strategy = strategy
        self.explore_radius = explore_radius
        self.atom_arrows = tuple(atom_arrows)
        self.atom_centers = tuple(atom_centers)
        self._bij_cache = {}
        self._orbit_cache = None

    def _bij(self, arrow) -> dict:
        d = self._bij_cache.get(arrow.serial)
        if d is None:
            d = dict(arrow.bij)
            self._bij_cache[arrow.serial] = d
        return d

    # atoms are (anchor dart, image dart) pairs over prefixed identifiers
    def identity_atom(self, dart):
        return (dart, dart)

    def act(self, arrow, atom):
        return (atom[0], self._bij(arrow)[atom[1]])

    def bar(self, atom):
        rev = self.union.reverse
        return (rev[atom[0]], rev[atom[1]])

    def atom_anchor(self, atom):
        return atom[0]

    def atom_image(self, atom):
        return atom[1]

    def atom_serial(self, atom):
        return atom

    def _orbits(self) -> dict:
        if self._orbit_cache is None:
            parent = {d: d for d in self.union.darts}

            def find(a):
                while parent[a] != a:
                    parent[a] = parent[parent[a]]
                    a = parent[a]
                return a

            for arrow in self.groupoid.arrows:
                for e, f in arrow.bij:
                    ra, rb = find(e), find(f)
                    if ra != rb:
                        parent[max(ra, rb)] = min(ra, rb)
            classes = {}
            for d in self.union.darts:
                classes.setdefault(find(d), []).append(d)
            self._orbit_cache = {d: tuple(sorted(cls))
                                 for cls in classes.values() for d in cls}
        return self._orbit_cache

    def orbit_size(self, dart):
        return len(self._orbits()[dart])

    def orbit_darts(self, dart):
        return self._orbits()[dart]


def _dart_type(union: Graph, block_of: dict, d: str):
    return (union.dart_colour.get(d), union.dart_colour.get(union.reverse[d]),
            block_of[union.head(d)])


def _grouped_star(union, block_of, v):
    groups = {}
    for d in union.star(v):
        groups.setdefault(_dart_type(union, block_of, d), []).append(d)
    return groups


def _dr_full_arrows(union: Graph, joint: JointBlocks) -> list:
    block_of = joint.partition.block_of
    arrows = []
    for block in joint.partition.blocks:
        grouped = {v: _grouped_star(union, block_of, v) for v in block}
        for u in block:
            gu = grouped[u]
            types = sorted(gu)
            for v in block:
                gv = grouped[v]
                if sorted(gv) != types or any(len(gu[t]) != len(gv[t]) for t in types):
                    raise AxiomError("joint partition is not equitable at %r" % (v,))
                pools = [itertools.permutations(gv[t]) for t in types]
                for combo in itertools.product(*pools):
                    pairs = []
                    for t, perm in zip(types, combo):
                        pairs.extend(zip(gu[t], perm))
                    arrows.append(StarArrow(u, v, tuple(sorted(pairs))))
    return arrows


def induced_star_map(alignment: TreeAlignment, z) -> StarArrow:
    """Star bijection induced at a tree vertex: lift to the first cover's
    tree, push through the alignment, project to the second graph."""
    c1, c2 = alignment.c1, alignment.c2
    x = c1.project(z)
    z2 = alignment.apply(z)
    y = c2.project(z2)
    pairs = []
    for d, w in c1.star_darts(z):
        f = c2.dart_between(z2, alignment.apply(w))
        pairs.append(("1:" + d, "2:" + f))
    return StarArrow("1:" + x, "2:" + y, tuple(sorted(pairs)))


def _aligned_atoms(alignment: TreeAlignment, explore_radius: int):
    alignment.ensure_radius(explore_radius + 1)
    seen = {}
    centers = []
    frontier = [()]
    layer = 0
    while frontier and layer <= explore_radius:
        nxt = []
        for z in sorted(frontier):
            arrow = induced_star_map(alignment, z)
            if arrow.serial not in seen:
                seen[arrow.serial] = arrow
                centers.append(z)
            for _, w in alignment.c1.star_darts(z):
                if len(w) == len(z) + 1:
                    nxt.append(w)
        frontier = nxt
        layer += 1
    order = sorted(seen)
    return [seen[s] for s in order], centers


def build_star_system(g1: Graph, g2: Graph, strategy: str = STRATEGY_DR_FULL,
                      explore_radius=None, joint: JointBlocks = None,
                      alignment: TreeAlignment = None) -> StarLocalSystem:
    """Build the star-bijection local system for two connected graphs."""
    if joint is None:
        joint = joint_refinement(g1, g2)
    if not joint.ok:
        raise GraphError("no common universal cover")
    union = disjoint_union(g1, g2)
    if strategy == STRATEGY_DR_FULL:
        arrows = _dr_full_arrows(union, joint)
        identities = {x: _identity_arrow(union)(x) for x in union.vertices}
        groupoid = FiniteGroupoid(tuple(union.vertices),
                                  tuple(sorted(set(arrows), key=lambda a: a.serial)),
                                  identities)
        sys = StarLocalSystem(g1, g2, union, groupoid, joint, strategy)
        report = sys.check_axioms()
        if not report.ok:
            raise AxiomError("complete star system failed its axioms at %r"
                             % (report.detail,))
        return sys
    if strategy != STRATEGY_ALIGNED:
        raise GraphError("unknown strategy: %r" % (strategy,))
    if explore_radius is None:
        explore_radius = 1 + g1.diameter() + g2.diameter()
    if alignment is None:
        alignment = build_alignment(UniversalCover(g1), UniversalCover(g2), joint)
    atoms, centers = _aligned_atoms(alignment, explore_radius)
    groupoid = saturate(atoms, union.vertices, _identity_arrow(union))
    sys = StarLocalSystem(g1, g2, union, groupoid, joint, strategy,
                          explore_radius, atoms, centers)
    sys.alignment = alignment
    report = sys.check_axioms()
    if not report.ok:
        raise AxiomError("closure axioms unmet at radius %d (failing item %r)"
                         % (explore_radius, report.detail),
                         radius=explore_radius, witness=report.detail)
    return sys


def build_star_system_retrying(g1, g2, strategy=STRATEGY_ALIGNED,
                               explore_radius=None, doublings: int = 4):
    """Aligned-strategy builder with doubling retries on axiom failure."""
    if strategy == STRATEGY_DR_FULL:
        return build_star_system(g1, g2, strategy)
    radius = explore_radius
    if radius is None:
        radius = 1 + g1.diameter() + g2.diameter()
    last = None
    for _ in range(doublings + 1):
        try:
            return build_star_system(g1, g2, strategy, explore_radius=radius)
        except AxiomError as exc:
            last = exc
            radius *= 2
    raise last
