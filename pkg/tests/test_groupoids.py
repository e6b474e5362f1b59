import itertools

import pytest

from commoncover import families
from commoncover.groupoids import (GroupoidAction, lcm_all, orbit_of,
                                   orbit_partition, saturate, stabilizer_size)
from commoncover.star_system import StarArrow


def identity_factory_for(graph):
    def factory(x):
        return StarArrow(x, x, tuple((d, d) for d in graph.star(x)))
    return factory


def test_saturate_no_atoms_single_object():
    g = families.rose(1)
    gpd = saturate([], ["v00"], identity_factory_for(g))
    assert len(gpd.arrows) == 1
    assert gpd.arrows[0].src == gpd.arrows[0].dst == "v00"
    assert not gpd.verify()


def test_saturate_single_bijection_four_arrows():
    g = families.theta(2)
    bij = tuple(zip(g.star("v00"), g.star("v01")))
    gamma = StarArrow("v00", "v01", bij)
    gpd = saturate([gamma], ["v00", "v01"], identity_factory_for(g))
    assert len(gpd.arrows) == 4
    assert not gpd.verify()


def _brute_closure(atoms, identities):
    """Independent closure loop for cross-checking saturate."""
    arrows = set(identities)
    frontier = set(atoms)
    for a in atoms:
        frontier.add(a.inverse())
    arrows |= frontier
    changed = True
    while changed:
        changed = False
        for a, b in itertools.product(list(arrows), repeat=2):
            if a.src == b.dst:
                c = a.compose(b)
                if c not in arrows:
                    arrows.add(c)
                    changed = True
    return arrows


def test_saturate_two_bijections_matches_brute_force():
    g = families.theta(2)
    s0, s1 = g.star("v00"), g.star("v01")
    straight = StarArrow("v00", "v01", tuple(zip(s0, s1)))
    crossed = StarArrow("v00", "v01", tuple(zip(s0, reversed(s1))))
    factory = identity_factory_for(g)
    gpd = saturate([straight, crossed], ["v00", "v01"], factory)
    brute = _brute_closure([straight, crossed], [factory("v00"), factory("v01")])
    assert set(gpd.arrows) == brute
    assert len(gpd.arrows) <= 8
    # the crossed-with-straight composite has order 2 at v00
    flip = crossed.inverse().compose(straight)
    assert flip.src == flip.dst == "v00"
    assert flip.compose(flip) == factory("v00")


def _full_star_groupoid(g):
    arrows = []
    for u in g.vertices:
        for v in g.vertices:
            if g.degree(u) != g.degree(v):
                continue
            for perm in itertools.permutations(g.star(v)):
                arrows.append(StarArrow(u, v, tuple(zip(g.star(u), perm))))
    return saturate(arrows, g.vertices, identity_factory_for(g))


def test_orbit_partition_identities_only():
    g = families.cycle(3)
    gpd = saturate([], g.vertices, identity_factory_for(g))
    action = GroupoidAction(gpd, tuple(g.darts), lambda d: g.origin[d],
                            lambda a, d: dict(a.bij)[d])
    assert orbit_partition(action) == [(d,) for d in g.darts]


def test_orbit_partition_full_star_groupoid_on_c3():
    g = families.cycle(3)
    gpd = _full_star_groupoid(g)
    action = GroupoidAction(gpd, tuple(g.darts), lambda d: g.origin[d],
                            lambda a, d: dict(a.bij)[d])
    orbits = orbit_partition(action)
    assert len(orbits) == 1
    assert len(orbits[0]) == 6


def test_orbit_partition_empty_set():
    g = families.cycle(3)
    gpd = _full_star_groupoid(g)
    action = GroupoidAction(gpd, (), lambda d: g.origin[d],
                            lambda a, d: dict(a.bij)[d])
    assert orbit_partition(action) == []


def test_stabilizer_identities_only():
    g = families.cycle(3)
    gpd = saturate([], g.vertices, identity_factory_for(g))
    action = GroupoidAction(gpd, tuple(g.darts), lambda d: g.origin[d],
                            lambda a, d: dict(a.bij)[d])
    stab, out, orbit = stabilizer_size(action, g.darts[0])
    assert (stab, out, orbit) == (1, 1, 1)


def test_stabilizer_with_order_two_isotropy():
    g = families.rose(1)
    s = g.star("v00")
    flip = StarArrow("v00", "v00", ((s[0], s[1]), (s[1], s[0])))
    gpd = saturate([flip], ["v00"], identity_factory_for(g))
    # act trivially on a fresh one-point set: the full isotropy stabilises it
    action = GroupoidAction(gpd, ("pt",), lambda _: "v00", lambda a, x: x)
    stab, out, orbit = stabilizer_size(action, "pt")
    assert (stab, out, orbit) == (2, 2, 1)


def test_orbit_stabilizer_product_on_star_action():
    g = families.complete(4)
    gpd = _full_star_groupoid(g)
    action = GroupoidAction(gpd, tuple(g.darts), lambda d: g.origin[d],
                            lambda a, d: dict(a.bij)[d])
    for dart in g.darts[:3]:
        stab, out, orbit = stabilizer_size(action, dart)
        assert out == stab * orbit


def test_saturate_idempotent():
    g = families.theta(2)
    s0, s1 = g.star("v00"), g.star("v01")
    crossed = StarArrow("v00", "v01", tuple(zip(s0, reversed(s1))))
    factory = identity_factory_for(g)
    once = saturate([crossed], ["v00", "v01"], factory)
    twice = saturate(list(once.arrows), ["v00", "v01"], factory)
    assert set(once.arrows) == set(twice.arrows)


def test_lcm_all():
    assert lcm_all([3, 4]) == 12
    assert lcm_all([1]) == 1
    assert lcm_all([6, 10, 15]) == 30
    assert lcm_all([]) == 1
    with pytest.raises(ValueError):
        lcm_all([0])


def test_orbit_of_matches_partition():
    g = families.cycle(4)
    gpd = _full_star_groupoid(g)
    action = GroupoidAction(gpd, tuple(g.darts), lambda d: g.origin[d],
                            lambda a, d: dict(a.bij)[d])
    orbits = orbit_partition(action)
    for orbit in orbits:
        assert orbit_of(action, orbit[0]) == orbit
