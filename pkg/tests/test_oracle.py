import random

import pytest

from commoncover import families
from commoncover.graphs import is_covering
from commoncover.oracle import (brute_common_cover, brute_landau,
                                find_covering, permutation_cover)


def test_c3_c4_minimum_is_twelve():
    result = brute_common_cover(families.cycle(3), families.cycle(4), 6)
    assert result.found
    assert result.degree == 4
    assert len(result.cover.vertices) == 12
    assert is_covering(result.to_first).ok
    assert is_covering(result.to_second).ok


def test_self_pair_found_at_degree_one():
    for g in (families.cycle(3), families.theta(3)):
        result = brute_common_cover(g, g, 3)
        assert result.found and result.degree == 1
        assert len(result.cover.vertices) == len(g.vertices)


def test_no_common_cover_detected():
    result = brute_common_cover(families.cycle(3), families.complete(4), 4)
    assert not result.found
    assert not result.budget_exceeded


def test_voltage_covers_are_coverings():
    rng = random.Random(3)
    g = families.theta(2)
    reps = g.edge_reps()
    for _ in range(10):
        degree = rng.randint(1, 4)
        voltages = {}
        for rep in reps:
            perm = list(range(degree))
            rng.shuffle(perm)
            voltages[rep] = tuple(perm)
        cover, proj = permutation_cover(g, degree, voltages)
        assert is_covering(proj).ok


def test_budget_exceeded_reported():
    result = brute_common_cover(families.cycle(3), families.cycle(4), 6,
                                budget=3)
    assert result.budget_exceeded and not result.found


def test_find_covering_respects_colours():
    # colours constrain the search only where both sides carry them
    full3 = families.with_vertex_colour(
        families.cycle(3), {"v00": "red", "v01": "blue", "v02": "blue"})
    plain12 = families.cycle(12)
    assert find_covering(plain12, families.cycle(3)) is not None
    assert find_covering(plain12, full3) is not None
    bad12 = families.with_vertex_colour(
        families.cycle(12),
        {("v%02d" % i): ("red" if i < 2 else "blue") for i in range(12)})
    assert find_covering(bad12, full3) is None


def test_brute_landau_values():
    assert brute_landau(1) == 1
    assert brute_landau(7) == 12
    assert brute_landau(10) == 30
    with pytest.raises(ValueError):
        brute_landau(31)
