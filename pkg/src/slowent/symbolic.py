"""Full-shift machinery: sliding block codes, the fair two-letter overlay on
core sites, the erasure factor map, and Hamming-ball covering lower bounds.

Symbol ids follow the default registry: 0 and 1 for the base colors, 2 and
3 for the overlay letters a and b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import cutstack, rng
from .cutstack import PointHandle
from .lattice import Box, Pattern, Site, UsageError
from .partitions import CoFinitePartition, name_metric

A_SYMBOL = 2
B_SYMBOL = 3

#: Partition {0 | a, b} whose names are overlay names.
OVERLAY_PARTITION = CoFinitePartition(labels=(0, A_SYMBOL, B_SYMBOL), infinite_atom=0)


@dataclass
class SlidingBlockCode:
    """Shift-equivariant local rule: pattern over Q_m -> output symbol."""

    window_radius: int
    rule: Callable[[Pattern], int]
    input_default: int

    def default_output(self) -> int:
        return self.rule(Pattern(Box(self.window_radius), self.input_default, {}))


def apply_code(code: SlidingBlockCode, input_pattern: Pattern) -> Pattern:
    """Apply the local rule at every site, shrinking the box by the window radius.

    Sites whose window sees only default input cells map to the rule's
    default output, so the sparse result costs O(support), not O(box).
    """
    m = code.window_radius
    n = input_pattern.box.radius - m
    if n < 0:
        raise UsageError(f"input radius {input_pattern.box.radius} < window radius {m}")
    if input_pattern.default_symbol != code.input_default:
        raise UsageError("input default symbol does not match the code")
    out_box = Box(n, input_pattern.box.rank)
    default_out = code.default_output()
    candidates: set[Site] = set()
    for u in input_pattern.support():
        for dx in range(-m, m + 1):
            for dy in range(-m, m + 1):
                v = (u[0] - dx, u[1] - dy)
                if v in out_box:
                    candidates.add(v)
    cells: dict[Site, int] = {}
    window_box = Box(m, input_pattern.box.rank)
    offsets = [(dx, dy) for dx in range(-m, m + 1) for dy in range(-m, m + 1)]
    lookup = input_pattern.cells
    rule_cache: dict[tuple, int] = {}
    for v in candidates:
        local: dict[Site, int] = {}
        for w in offsets:
            sym = lookup.get((v[0] + w[0], v[1] + w[1]))
            if sym is not None:
                local[w] = sym
        key = tuple(sorted(local.items()))
        sym_out = rule_cache.get(key)
        if sym_out is None:
            sym_out = code.rule(Pattern(window_box, code.input_default, local))
            rule_cache[key] = sym_out
        if sym_out != default_out:
            cells[v] = sym_out
    return Pattern(out_box, default_out, cells)


def erasure_code() -> SlidingBlockCode:
    """Symbol-wise factor map a, b -> 1 and 0 -> 0."""

    def rule(window: Pattern) -> int:
        sym = window.symbol_at((0, 0))
        if sym in (A_SYMBOL, B_SYMBOL):
            return 1
        if sym in (0, 1):
            return 0 if sym == 0 else 1
        raise UsageError(f"unexpected symbol {sym} under erasure")

    return SlidingBlockCode(window_radius=0, rule=rule, input_default=0)


def identity_code(default: int = 0) -> SlidingBlockCode:
    return SlidingBlockCode(0, lambda w: w.symbol_at((0, 0)), default)


def translate_pattern(p: Pattern, offset: Site, radius: int) -> Pattern:
    """Restriction of the offset-shifted pattern to Q_radius."""
    box = Box(radius, p.box.rank)
    cells = {}
    for u, sym in p.cells.items():
        v = tuple(a - b for a, b in zip(u, offset))
        if v in box:
            cells[v] = sym
    return Pattern(box, p.default_symbol, cells)


# ---------------------------------------------------------------------------
# Overlay names


@dataclass
class OverlayName:
    """A 0/1 base pattern with a fair letter attached to every 1-cell."""

    base: Pattern
    bits: dict[Site, int]

    def __post_init__(self) -> None:
        if set(self.bits) != self.base.support():
            raise UsageError("overlay bits must be defined exactly on the base 1-cells")
        if any(b not in (0, 1) for b in self.bits.values()):
            raise UsageError("overlay bits must be 0 (a) or 1 (b)")

    def flatten(self) -> Pattern:
        """Pattern over {0, a, b} with default 0."""
        cells = {u: (A_SYMBOL if b == 0 else B_SYMBOL) for u, b in self.bits.items()}
        return Pattern(self.base.box, 0, cells)

    def erase(self) -> Pattern:
        return self.base


def overlay_name(point: PointHandle, n: int) -> OverlayName:
    """Sample the overlay name of radius n, conditioned on the point's base name.

    Bits are derived from (overlay seed, absolute window site), so one
    point's names are restriction-consistent across radii while distinct
    points carry independent letter streams.
    """
    base = cutstack.name01(point, n)
    # key bits by the absolute window offset relative to the point, which is
    # the same site in every nested window
    bits = {
        v: rng.fair_bit(point.overlay_seed, "overlay-bit", v[0], v[1]) for v in base.support()
    }
    return OverlayName(base, bits)


def overlay_from_word(base: Pattern, word: int) -> OverlayName:
    """Overlay with bits read off an integer word over the sorted 1-cells."""
    sites = sorted(base.support())
    bits = {u: (word >> i) & 1 for i, u in enumerate(sites)}
    return OverlayName(base, bits)


def overlay_distance(x: OverlayName, y: OverlayName) -> Fraction:
    """Name distance for the partition {0 | a, b}: infinite atom 0, letters core."""
    return name_metric(x.flatten(), y.flatten(), OVERLAY_PARTITION)


# ---------------------------------------------------------------------------
# Hamming-ball covering lower bound


def hamming_ball_volume(length: int, radius: int) -> int:
    """Number of binary words within Hamming distance `radius` of a fixed word."""
    return sum(math.comb(length, j) for j in range(radius + 1))


def hamming_cover_lower(core_size: int, eps: Fraction) -> int:
    """Certified lower bound on the largest family of core colorings with
    pairwise normalized Hamming distance >= eps.

    Sphere-covering argument: a maximal eps-separated family covers the cube
    with balls of radius d - 1 where d = ceil(eps * core_size), giving at
    least 2^s / V(s, d-1) words. This also lower-bounds covering numbers of
    the overlay metric at any smaller threshold.
    """
    eps = Fraction(eps)
    if core_size < 1:
        raise UsageError("core size must be >= 1")
    if not (0 < eps < Fraction(1, 2)):
        raise UsageError(f"eps must be in (0, 1/2), got {eps}")
    d = math.ceil(eps * core_size)
    return (1 << core_size) // hamming_ball_volume(core_size, d - 1)


def binary_entropy(x: float) -> float:
    if not 0 < x < 1:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def gv_rate_deficit(core_size: int, eps: Fraction) -> float:
    """The delta in the family-size form 2^((1 - delta) s); tends to H2(eps)."""
    bound = hamming_cover_lower(core_size, eps)
    return 1.0 - math.log2(bound) / core_size


def separated_words_first_fit(length: int, min_distance: int, words: list[int] | None = None) -> int:
    """First-fit maximal family of binary words at pairwise Hamming distance >= min_distance.

    With words=None scans the whole cube in numeric order, blocking the
    radius (min_distance - 1) ball around each kept word; this realizes the
    sphere-covering bound constructively.
    """
    if words is None:
        blocked = bytearray(1 << length)
        ball = _ball_masks(length, min_distance - 1)
        kept = 0
        for w in range(1 << length):
            if blocked[w]:
                continue
            kept += 1
            for mask in ball:
                blocked[w ^ mask] = 1
        return kept
    kept_words: list[int] = []
    for w in words:
        if all(bin(w ^ k).count("1") >= min_distance for k in kept_words):
            kept_words.append(w)
    return len(kept_words)


def _ball_masks(length: int, radius: int) -> list[int]:
    masks = [0]
    frontier = [0]
    for _ in range(radius):
        nxt = []
        for m in frontier:
            for b in range(m.bit_length(), length):
                nxt.append(m | (1 << b))
        frontier = nxt
        masks.extend(frontier)
    return masks
