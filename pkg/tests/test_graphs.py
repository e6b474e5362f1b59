import pytest

from commoncover import families
from commoncover.graphs import (Graph, GraphError, GraphMorphism,
                                compose_morphisms, fiber_product,
                                identity_morphism, is_covering, validate_graph)
from commoncover.oracle import find_covering


def test_validate_well_formed_fixtures():
    for g in (families.cycle(3), families.complete(4), families.rose(2),
              families.theta(3), families.path(3), families.complete_bipartite(3, 3)):
        assert validate_graph(g).ok


def test_validate_fixed_point_of_reversal():
    g = Graph(["v"], ["e"], {"e": "v"}, {"e": "e"})
    report = validate_graph(g)
    assert not report.ok
    assert any("fixed point" in v for v in report.violations)


def test_validate_non_involutive_reversal():
    g = Graph(["v"], ["a", "b", "c"],
              {"a": "v", "b": "v", "c": "v"},
              {"a": "b", "b": "c", "c": "a"})
    report = validate_graph(g)
    assert not report.ok
    assert any("not involutive" in v for v in report.violations)


def test_star_sizes():
    k4 = families.complete(4)
    assert all(len(k4.star(v)) == 3 for v in k4.vertices)
    r2 = families.rose(2)
    assert len(r2.star("v00")) == 4
    p3 = families.path(3)
    assert len(p3.star("v01")) == 2


def test_star_unknown_vertex():
    with pytest.raises(GraphError, match="vertex not in graph"):
        families.cycle(3).star("nope")


def test_star_sizes_sum_to_dart_count():
    for g in (families.cycle(5), families.complete(4), families.rose(3),
              families.complete_bipartite(2, 3)):
        assert sum(len(g.star(v)) for v in g.vertices) == len(g.darts)


def _wrap_cycle(n: int, k: int) -> GraphMorphism:
    big, small = families.cycle(n), families.cycle(k)
    vmap = {"v%02d" % i: "v%02d" % (i % k) for i in range(n)}
    dmap = {}
    for i in range(n):
        dmap["e%02d.a" % i] = "e%02d.a" % (i % k)
        dmap["e%02d.b" % i] = "e%02d.b" % (i % k)
    return GraphMorphism(big, small, vmap, dmap)


def test_wrap_covering_c12_over_c3():
    assert is_covering(_wrap_cycle(12, 3)).ok


def test_identity_is_covering():
    assert is_covering(identity_morphism(families.complete(4))).ok


def test_collapse_path_onto_loop_fails_star_injectivity():
    p3, r1 = families.path(3), families.rose(1)
    # middle-vertex star collapses: both darts at v01 hit the same loop side
    m = GraphMorphism(p3, r1,
                      {v: "v00" for v in p3.vertices},
                      {"e00.a": "e00.a", "e00.b": "e00.b",
                       "e01.a": "e00.b", "e01.b": "e00.a"})
    assert m.is_valid()
    report = is_covering(m)
    assert not report.ok
    images = [m.dmap[d] for d in p3.star("v01")]
    assert len(set(images)) < len(images)


def test_not_a_graph_morphism_raises():
    p3, r1 = families.path(3), families.rose(1)
    bad = GraphMorphism(p3, r1, {v: "v00" for v in p3.vertices},
                        {d: "e00.a" for d in p3.darts})
    with pytest.raises(GraphError, match="not a graph morphism"):
        is_covering(bad)


def _cycle_cover_of_rose(n: int) -> GraphMorphism:
    cn, r1 = families.cycle(n), families.rose(1)
    dmap = {}
    for i in range(n):
        dmap["e%02d.a" % i] = "e00.a"
        dmap["e%02d.b" % i] = "e00.b"
    return GraphMorphism(cn, r1, {v: "v00" for v in cn.vertices}, dmap)


def test_fiber_product_c3_c4_is_c12():
    fp = fiber_product(_cycle_cover_of_rose(3), _cycle_cover_of_rose(4))
    g = fp.graph
    assert len(g.vertices) == 12
    assert g.is_connected()
    assert all(g.degree(v) == 2 for v in g.vertices)
    # a connected 2-regular graph on 12 vertices is the 12-cycle
    assert find_covering(g, families.cycle(12)) is not None
    assert is_covering(fp.proj1).ok and is_covering(fp.proj2).ok


def test_fiber_product_identity_diagonal():
    q = families.complete(4)
    fp = fiber_product(identity_morphism(q), identity_morphism(q))
    diag = [v for v, pair in fp.vertex_pairs.items() if pair[0] == pair[1]]
    comps = fp.graph.components()
    assert sorted(len(c) for c in comps)[0] == len(q.vertices)
    assert any(set(diag) == set(c) for c in comps)


def test_fiber_product_self_cover_components():
    m = _cycle_cover_of_rose(3)
    fp = fiber_product(m, m)
    comps = fp.graph.components()
    assert [len(c) for c in comps] == [3, 3, 3]
    for comp in comps:
        sub = fp.graph.restrict(comp)
        assert all(sub.degree(v) == 2 for v in sub.vertices)


def test_fiber_product_projections_commute():
    m1, m2 = _cycle_cover_of_rose(3), _cycle_cover_of_rose(4)
    fp = fiber_product(m1, m2)
    left = compose_morphisms(m1, fp.proj1)
    right = compose_morphisms(m2, fp.proj2)
    assert left.dmap == right.dmap and left.vmap == right.vmap


def test_fiber_product_requires_coverings():
    p3, r1 = families.path(3), families.rose(1)
    not_cover = GraphMorphism(p3, r1, {v: "v00" for v in p3.vertices},
                              {"e00.a": "e00.a", "e00.b": "e00.b",
                               "e01.a": "e00.a", "e01.b": "e00.b"})
    with pytest.raises(GraphError, match="requires coverings"):
        fiber_product(not_cover, _cycle_cover_of_rose(3))


def test_restrict_rejects_broken_components():
    c4 = families.cycle(4)
    with pytest.raises(GraphError):
        c4.restrict(["v00", "v01"])


def test_diameter_and_components():
    assert families.cycle(6).diameter() == 3
    assert families.path(4).diameter() == 3
    two = Graph(["a", "b"], [], {}, {})
    assert len(two.components()) == 2
    with pytest.raises(GraphError):
        two.diameter()
