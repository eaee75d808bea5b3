import math
from fractions import Fraction

import pytest

from slowent import cutstack as cs
from slowent import rng
from slowent.lattice import Box, Pattern, UsageError
from slowent.symbolic import (
    A_SYMBOL,
    B_SYMBOL,
    OverlayName,
    apply_code,
    binary_entropy,
    erasure_code,
    gv_rate_deficit,
    hamming_ball_volume,
    hamming_cover_lower,
    identity_code,
    overlay_distance,
    overlay_from_word,
    overlay_name,
    separated_words_first_fit,
    translate_pattern,
)


def test_identity_code_restricts():
    p = Pattern(Box(3), 0, {(0, 0): 1, (2, -1): 1})
    out = apply_code(identity_code(), p)
    assert out == p


def test_apply_code_radius_check():
    code = erasure_code()
    with pytest.raises(UsageError):
        apply_code(
            code,
            Pattern(Box(0), 1, {}),
        )


def test_erasure_code_on_overlay(sched_default):
    p = cs.point_from_address(sched_default, [(0, 0)], seed=5)
    ov = overlay_name(p, 5)
    flat = ov.flatten()
    assert apply_code(erasure_code(), flat) == cs.name01(p, 5)


def test_apply_code_shift_equivariance():
    code = erasure_code()
    for i in range(100):
        cells = {}
        for k in range(rng.uniform_int(31, "n", i, lo=0, hi=6)):
            x = rng.uniform_int(31, "x", i, k, lo=-4, hi=4)
            y = rng.uniform_int(31, "y", i, k, lo=-4, hi=4)
            cells[(x, y)] = A_SYMBOL if rng.fair_bit(31, "s", i, k) else B_SYMBOL
        p = Pattern(Box(4), 0, cells)
        u = (rng.uniform_int(31, "ux", i, lo=-2, hi=2), rng.uniform_int(31, "uy", i, lo=-2, hi=2))
        lhs = translate_pattern(apply_code(code, p), u, 2)
        rhs = apply_code(code, translate_pattern(p, u, 2))
        assert lhs == rhs


def test_overlay_name_consistency(sched_default):
    p = cs.point_from_address(sched_default, [(0, 0)], seed=9)
    small = overlay_name(p, 3)
    big = overlay_name(p, 27)
    assert small.erase() == cs.name01(p, 3)
    for v, bit in small.bits.items():
        assert big.bits[v] == bit
    again = overlay_name(p, 3)
    assert again.bits == small.bits


def test_overlay_independent_across_points(sched_default):
    a = cs.sample_point(sched_default, 3, seed=100)
    b = cs.sample_point(sched_default, 3, seed=101)
    assert a.overlay_seed != b.overlay_seed


def test_overlay_fairness(sched_default):
    p = cs.point_from_address(sched_default, [(0, 0)], seed=13)
    name = overlay_name(p, 27)
    draws = 0
    ones = 0
    # extend the sample with bits from more points to reach a solid count
    for i in range(300):
        q = cs.sample_point(sched_default, 3, seed=rng.derive_seed(50, "fair", i))
        ov = overlay_name(q, 9)
        for b in ov.bits.values():
            draws += 1
            ones += b
    sigma = math.sqrt(draws * 0.25)
    assert abs(ones - draws / 2) <= 5 * sigma


def test_overlay_validation():
    base = Pattern(Box(1), 0, {(0, 0): 1})
    with pytest.raises(UsageError):
        OverlayName(base, {})
    with pytest.raises(UsageError):
        OverlayName(base, {(0, 0): 7})


def test_overlay_distance_examples():
    base = Pattern(Box(2), 0, {(x, y): 1 for x in (-2, 0, 2) for y in (0, 1)})
    same = overlay_from_word(base, 0b101010)
    assert overlay_distance(same, same) == 0
    other = overlay_from_word(base, 0b101011)
    assert overlay_distance(same, other) == Fraction(1, 6)
    # shared base of c cells, bits differing on j cells -> j/c
    third = overlay_from_word(base, 0b010101)
    assert overlay_distance(same, third) == 1


def test_overlay_distance_disjoint_bases(sched_default):
    p = cs.point_from_address(sched_default, [(0, 0)])
    base1 = cs.name01(p, 3)
    base2 = Pattern(Box(3), 0, {(x + 1, y): 1 for (x, y) in base1.cells if abs(x + 1) <= 3})
    d = overlay_distance(overlay_from_word(base1, 0), overlay_from_word(base2, 0))
    assert d == 1


def test_overlay_distance_dominates_base_metric(sched_default):
    from slowent.partitions import recurrence_metric

    for i in range(50):
        x = cs.sample_point(sched_default, 3, seed=rng.derive_seed(60, "a", i))
        y = cs.sample_point(sched_default, 3, seed=rng.derive_seed(60, "b", i))
        ox, oy = overlay_name(x, 6), overlay_name(y, 6)
        base = recurrence_metric(ox.base.support(), oy.base.support())
        assert overlay_distance(ox, oy) >= base


def test_hamming_cover_lower_values():
    assert hamming_cover_lower(20, Fraction(1, 10)) == (1 << 20) // 21
    assert hamming_cover_lower(20, Fraction(1, 10)) == 49932
    # d = 1: every pair of distinct colorings qualifies
    assert hamming_cover_lower(12, Fraction(1, 100)) == 1 << 12
    assert hamming_ball_volume(20, 1) == 21


def test_hamming_cover_lower_monotone():
    values = [hamming_cover_lower(16, eps) for eps in (Fraction(1, 16), Fraction(1, 8), Fraction(1, 4))]
    assert values == sorted(values, reverse=True)
    for v in values:
        assert 1 <= v <= 1 << 16


def test_hamming_cover_lower_validation():
    with pytest.raises(UsageError):
        hamming_cover_lower(0, Fraction(1, 8))
    with pytest.raises(UsageError):
        hamming_cover_lower(8, Fraction(1, 2))


def test_separated_words_first_fit_realizes_bound():
    for s, eps in ((10, Fraction(1, 5)), (12, Fraction(1, 4))):
        d = math.ceil(eps * s)
        family = separated_words_first_fit(s, d)
        assert family >= hamming_cover_lower(s, eps)


def test_separated_words_subset_mode():
    words = [0b0000, 0b0001, 0b0011, 0b1111]
    assert separated_words_first_fit(4, 2, words) == 3


def test_gv_rate_deficit_tends_to_entropy():
    eps = Fraction(1, 8)
    d_small = gv_rate_deficit(64, eps)
    h = binary_entropy(float(eps))
    assert 0 < d_small < 2 * h


def test_overlay_serializes_with_letter_symbols(sched_default):
    from slowent.lattice import pattern_from_text, pattern_to_text

    p = cs.point_from_address(sched_default, [(0, 0)], seed=3)
    flat = overlay_name(p, 3).flatten()
    text = pattern_to_text(flat)
    assert " a" in text or " b" in text
    assert pattern_from_text(text) == flat
