"""Recurrence sets R_n(A, x), position decoding, and dimension checks.

For the built construction the recurrence set of a point is always a
product X x Y of per-coordinate offset lists, so pattern identity, counts,
and centroids all run on the two axis lists instead of the full site set.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import cutstack
from .covernum import box_count
from .cutstack import PointHandle
from .lattice import Site, UsageError


@dataclass(frozen=True)
class RecurrencePattern:
    """Canonically sorted return sites within Q_radius."""

    radius: int
    sites: tuple[Site, ...]

    def __post_init__(self) -> None:
        for u in self.sites:
            if max(abs(a) for a in u) > self.radius:
                raise UsageError(f"site {u} outside Q_{self.radius}")
        if list(self.sites) != sorted(set(self.sites)):
            raise UsageError("sites must be sorted and distinct")

    def __len__(self) -> int:
        return len(self.sites)

    def site_set(self) -> frozenset[Site]:
        return frozenset(self.sites)


def recurrence_set(point: PointHandle, n: int) -> RecurrencePattern:
    """Return sites of the point within Q_n; exactly the 1-cells of its name."""
    xs, ys = cutstack.window_axes(point, n)
    return RecurrencePattern(n, tuple(sorted((x, y) for x in xs for y in ys)))


def recurrence_count(point: PointHandle, n: int) -> int:
    """|R_n(A, x)| via interval counting, no site materialization."""
    return cutstack.core_count(point, n)


def recurrence_key(point: PointHandle, n: int) -> bytes:
    """Compact digest identifying the recurrence pattern.

    Distinct digests certify distinct patterns, so a digest count is a
    lower bound on the number of distinct patterns; it is used where the
    matching upper bound (patterns are functions of position) makes the
    count exact.
    """
    xs, ys = cutstack.window_axes(point, n)
    h = hashlib.blake2b(digest_size=16)
    h.update(repr((n, xs, ys)).encode())
    return h.digest()


def centroid_decode(pattern: RecurrencePattern) -> Site:
    """Recover the position encoded by a translate of a zero-sum site set.

    Returns the nearest-integer rounding of the negated site mean, with
    exact .5 ties rounded toward zero so contamination stays visible.
    """
    if not pattern.sites:
        raise UsageError("cannot decode an empty recurrence pattern")
    count = len(pattern.sites)
    sx = sum(u[0] for u in pattern.sites)
    sy = sum(u[1] for u in pattern.sites)
    return (_round_half_toward_zero(Fraction(-sx, count)), _round_half_toward_zero(Fraction(-sy, count)))


def centroid_decode_axes(count_x: int, mean_x: Fraction, count_y: int, mean_y: Fraction) -> Site:
    """Decoder on factorized windows: the mean of X x Y is (mean X, mean Y)."""
    if count_x == 0 or count_y == 0:
        raise UsageError("cannot decode an empty recurrence pattern")
    return (_round_half_toward_zero(-mean_x), _round_half_toward_zero(-mean_y))


def _round_half_toward_zero(q: Fraction) -> int:
    floor = q.numerator // q.denominator
    rem = q - floor
    if rem > Fraction(1, 2):
        return floor + 1
    if rem < Fraction(1, 2):
        return floor
    return floor + 1 if q < 0 else floor


def distinct_pattern_count(points: Iterable[PointHandle], n: int) -> int:
    """Number of distinct recurrence patterns over the sample at radius n."""
    return len({recurrence_key(p, n) for p in points})


@dataclass(frozen=True)
class InequalityCell:
    n: int
    cover_count: int
    log2_bound: float
    ok: bool


def rho_alpha_inequality_check(
    cover_values: Sequence[tuple[int, int]],
    alpha_hat: float,
    eps: Fraction | float,
    k: int = 2,
) -> list[InequalityCell]:
    """Check N <= 2^(2 |Q_n|^(alpha_hat + eps) log2 |Q_n|) for each (n, N).

    This is the binomial subset-count bound: patterns of at most
    |Q_n|^(alpha+eps) return sites cannot outnumber the subset count.
    """
    out = []
    for n, count in cover_values:
        if count < 1:
            raise UsageError("cover counts must be >= 1")
        q = box_count(n, k)
        log2_bound = 2.0 * (q ** (alpha_hat + float(eps))) * math.log2(q)
        ok = math.log2(count) <= log2_bound
        out.append(InequalityCell(n, count, log2_bound, ok))
    return out
