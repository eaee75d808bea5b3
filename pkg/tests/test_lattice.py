from fractions import Fraction

import pytest

from slowent import rng
from slowent.lattice import (
    Box,
    ExplicitSet,
    GridSet,
    Pattern,
    SumsetSet,
    UsageError,
    box_site_count,
    pattern_distance,
    pattern_from_text,
    pattern_to_text,
    sumset,
    sup_norm,
)

from oracles import dense_pattern_distance


def test_box_site_count_examples():
    assert box_site_count(0, 2) == 1
    assert box_site_count(1, 2) == 9
    # direct evaluation (2*27+1)^2
    assert box_site_count(27, 2) == 55 * 55 == 3025
    assert box_site_count(2, 3) == 125


def test_box_site_count_matches_enumeration():
    b = Box(3)
    assert sum(1 for _ in b.sites()) == b.site_count()


def test_box_rejects_bad_arguments():
    with pytest.raises(UsageError):
        box_site_count(-1, 2)
    with pytest.raises(UsageError):
        box_site_count(2, 0)


def test_sup_norm():
    assert sup_norm((3, -5)) == 5
    assert sup_norm((0, 0)) == 0


def test_pattern_canonical_sparsity():
    with pytest.raises(UsageError):
        Pattern(Box(1), 0, {(0, 0): 0})
    with pytest.raises(UsageError):
        Pattern(Box(1), 0, {(2, 0): 1})


def test_pattern_distance_examples():
    a = Pattern(Box(1), 0, {(0, 0): 1, (1, 0): 1})
    b = Pattern(Box(1), 0, {(0, 0): 1})
    assert pattern_distance(a, a) == 0
    one_cell = Pattern(Box(1), 0, {(0, 0): 1})
    empty = Pattern(Box(1), 0, {})
    assert pattern_distance(one_cell, empty) == 1
    # 1 differing site over 2 core sites
    assert pattern_distance(a, b) == Fraction(1, 2)
    assert pattern_distance(empty, empty) == 0


def test_pattern_distance_mismatch_errors():
    a = Pattern(Box(1), 0, {})
    with pytest.raises(UsageError):
        pattern_distance(a, Pattern(Box(2), 0, {}))
    with pytest.raises(UsageError):
        pattern_distance(a, Pattern(Box(1), 7, {}))


def _random_pattern(seed, tag, i):
    cells = {}
    count = rng.uniform_int(seed, tag + "n", i, lo=0, hi=4)
    k = 0
    attempt = 0
    while k < count:
        x = rng.uniform_int(seed, tag + "x", i, k, attempt, lo=-2, hi=2)
        y = rng.uniform_int(seed, tag + "y", i, k, attempt, lo=-2, hi=2)
        attempt += 1
        if (x, y) in cells:
            continue
        cells[(x, y)] = 1 + rng.uniform_int(seed, tag + "s", i, k, lo=0, hi=1)
        k += 1
    return Pattern(Box(2), 0, cells)


def test_pattern_distance_matches_dense_oracle():
    for i in range(300):
        a = _random_pattern(5, "a", i)
        b = _random_pattern(5, "b", i)
        assert pattern_distance(a, b) == dense_pattern_distance(a, b)


def test_pattern_distance_metric_axioms_random():
    for i in range(500):
        a, b, c = (_random_pattern(9, t, i) for t in "abc")
        d_ab, d_bc, d_ac = pattern_distance(a, b), pattern_distance(b, c), pattern_distance(a, c)
        assert 0 <= d_ab <= 1
        assert d_ab == pattern_distance(b, a)
        assert (d_ab == 0) == (a == b)
        assert d_ac <= d_ab + d_bc


def test_sumset_explicit():
    u = ExplicitSet(frozenset({(0, 0), (3, 0)}))
    ident = ExplicitSet(frozenset({(0, 0)}))
    assert sumset(u, ident).sites == u.sites
    v = ExplicitSet(frozenset({(0, 0), (0, 3)}))
    assert sumset(u, v).sites == frozenset({(0, 0), (3, 0), (0, 3), (3, 3)})


def test_sumset_descriptor_matches_explicit():
    g1 = GridSet(3, 6)
    g2 = GridSet(57, 114)
    comp = sumset(g1, g2)
    assert isinstance(comp, SumsetSet)
    explicit = sumset(
        ExplicitSet(frozenset(g1.enumerate())), ExplicitSet(frozenset(g2.enumerate()))
    )
    assert set(comp.enumerate()) == set(explicit.sites)
    assert len(comp) == len(explicit.sites)
    for v in [(0, 0), (60, -3), (57, 6), (58, 0), (-117, 117)]:
        assert (v in comp) == (v in explicit)


def test_sumset_descriptor_requires_dominance():
    with pytest.raises(UsageError):
        SumsetSet((GridSet(3, 27), GridSet(5, 25)))


def test_grid_membership():
    g = GridSet(3, 27)
    assert (0, 0) in g and (27, -27) in g
    assert (1, 0) not in g and (30, 0) not in g
    assert len(g) == 361


def test_pattern_text_round_trip():
    p = Pattern(Box(3), 0, {(-3, 2): 1, (0, 0): 2, (1, -1): 3})
    text = pattern_to_text(p)
    assert pattern_from_text(text) == p
    assert pattern_to_text(pattern_from_text(text)) == text


def test_pattern_text_is_sorted_and_stable():
    p = Pattern(Box(1), 0, {(1, 0): 1, (-1, 0): 1, (0, 1): 1})
    lines = pattern_to_text(p).splitlines()
    assert lines[0] == "box 1 default 0"
    assert lines[1:] == ["-1 0 1", "0 1 1", "1 0 1"]


def test_pattern_text_rejects_garbage():
    with pytest.raises(UsageError):
        pattern_from_text("")
    with pytest.raises(UsageError):
        pattern_from_text("box x default 0")
    with pytest.raises(UsageError):
        pattern_from_text("box 1 default 0\n0 0 1\n0 0 1")


def test_sumset_descriptor_construction_membership():
    # membership of (30, -3) in the level-1 + level-2 grid sumset
    comp = sumset(GridSet(3, 27), GridSet(57, 185193))
    assert (30, -3) in comp
    assert (29, 0) not in comp
    assert (0, 0) in comp
