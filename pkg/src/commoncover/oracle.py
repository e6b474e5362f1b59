"""Brute-force ground truth: exhaustive small common covers and exhaustive
maximal-lcm values.  Deliberately independent of the main constructions so
cross-validation is meaningful; only the graph model is shared."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import lcm
from typing import Optional

from .graphs import Graph, GraphMorphism, is_covering


class BudgetExceeded(RuntimeError):
    pass


def permutation_cover(g: Graph, degree: int, voltages: dict):
    """Degree-m cover from a permutation per geometric edge representative."""
    perms = {}
    for rep in g.edge_reps():
        sigma = voltages.get(rep, tuple(range(degree)))
        perms[rep] = sigma
        inv = [0] * degree
        for i, j in enumerate(sigma):
            inv[j] = i
        perms[g.reverse[rep]] = tuple(inv)
    vid = {(v, i): "%s@%d" % (v, i) for v in g.vertices for i in range(degree)}
    did = {(d, i): "%s@%d" % (d, i) for d in g.darts for i in range(degree)}
    origin = {did[(d, i)]: vid[(g.origin[d], i)] for d, i in did}
    reverse = {did[(d, i)]: did[(g.reverse[d], perms[d][i])] for d, i in did}
    vcol = {vid[(v, i)]: g.vertex_colour[v] for v, i in vid if v in g.vertex_colour}
    dcol = {did[(d, i)]: g.dart_colour[d] for d, i in did if d in g.dart_colour}
    cover = Graph(vid.values(), did.values(), origin, reverse, vcol, dcol)
    proj = GraphMorphism(cover, g,
                         {vid[k]: k[0] for k in vid},
                         {did[k]: k[0] for k in did})
    return cover, proj


def _non_tree_reps(g: Graph):
    root = g.vertices[0]
    seen = {root}
    tree = set()
    queue = [root]
    while queue:
        v = queue.pop(0)
        for d in g.star(v):
            w = g.head(d)
            if w not in seen:
                seen.add(w)
                tree.add(d)
                tree.add(g.reverse[d])
                queue.append(w)
    return [d for d in g.edge_reps() if d not in tree]


def find_covering(h: Graph, target: Graph, budget: int = 200000) -> Optional[GraphMorphism]:
    """Backtracking search for a covering morphism h -> target."""
    if not h.vertices:
        return None
    counter = [budget]
    v0 = h.vertices[0]

    def compatible(v, w):
        if h.degree(v) != target.degree(w):
            return False
        cv = h.vertex_colour.get(v)
        cw = target.vertex_colour.get(w)
        return cv is None or cw is None or cv == cw

    def extend(vmap, dmap):
        counter[0] -= 1
        if counter[0] < 0:
            raise BudgetExceeded("oracle search budget exceeded")
        pending = None
        for d in h.darts:
            if d not in dmap and h.origin[d] in vmap:
                pending = d
                break
        if pending is None:
            if len(vmap) < len(h.vertices):
                return None            # disconnected remainder (h not connected)
            return GraphMorphism(h, target, vmap, dmap)
        v = h.origin[pending]
        used = {dmap[x] for x in h.star(v) if x in dmap}
        for e in target.star(vmap[v]):
            if e in used:
                continue
            hc = h.dart_colour.get(pending)
            tc = target.dart_colour.get(e)
            if hc is not None and tc is not None and hc != tc:
                continue
            w = h.head(pending)
            tw = target.head(e)
            if w in vmap:
                if vmap[w] != tw:
                    continue
            elif not compatible(w, tw):
                continue
            new_vmap = dict(vmap)
            new_vmap[w] = tw
            new_dmap = dict(dmap)
            new_dmap[pending] = e
            new_dmap[h.reverse[pending]] = target.reverse[e]
            out = extend(new_vmap, new_dmap)
            if out is not None:
                return out
        return None

    for w0 in target.vertices:
        if not compatible(v0, w0):
            continue
        out = extend({v0: w0}, {})
        if out is not None:
            rep = is_covering(out)
            if not rep.ok:
                raise RuntimeError("oracle produced a non-covering morphism")
            return out
    return None


@dataclass
class OracleResult:
    found: bool
    cover: Optional[Graph] = None
    to_first: Optional[GraphMorphism] = None
    to_second: Optional[GraphMorphism] = None
    degree: Optional[int] = None
    searched_up_to: int = 0
    budget_exceeded: bool = False


def brute_common_cover(g1: Graph, g2: Graph, max_degree: int,
                       budget: int = 400000) -> OracleResult:
    """Least connected common cover by exhaustive voltage enumeration.

    Enumerates connected degree-m covers of g1 (spanning-tree voltages
    trivial, all permutations on the remaining edges) for m = 1..max_degree
    and tests each for a covering onto g2.  Cover sizes grow with m, so the
    first hit has the least vertex count.
    """
    reps = _non_tree_reps(g1)
    counter = budget
    for m in range(1, max_degree + 1):
        perms = list(itertools.permutations(range(m)))
        for combo in itertools.product(perms, repeat=len(reps)):
            counter -= 1
            if counter < 0:
                return OracleResult(False, searched_up_to=m, budget_exceeded=True)
            cover, proj = permutation_cover(g1, m, dict(zip(reps, combo)))
            if not cover.is_connected():
                continue
            rep1 = is_covering(proj)
            if not rep1.ok:
                raise RuntimeError("voltage construction broke the covering property")
            try:
                onto2 = find_covering(cover, g2, budget=max(1000, counter))
            except BudgetExceeded:
                return OracleResult(False, searched_up_to=m, budget_exceeded=True)
            if onto2 is not None:
                return OracleResult(True, cover, proj, onto2, m, m)
    return OracleResult(False, searched_up_to=max_degree)


def _partitions(n: int, cap: Optional[int] = None):
    if n == 0:
        yield ()
        return
    if cap is None:
        cap = n
    for first in range(min(n, cap), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def brute_landau(n: int) -> int:
    """Maximal lcm over all integer partitions of n, by full enumeration."""
    if not 1 <= n <= 30:
        raise ValueError("exhaustive enumeration is limited to 1 <= n <= 30")
    best = 1
    for part in _partitions(n):
        val = 1
        for p in part:
            val = lcm(val, p)
        best = max(best, val)
    return best
