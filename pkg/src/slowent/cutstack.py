"""Rank-one cutting-and-tiling engine and its arithmetic-lattice construction.

The construction is driven by a Schedule of radii r(1) < r(2) < ... with
derived step sizes s(i) = r(i+1) - r(i) and spacings m(i) = s(i)^theta.
Stage i >= 2 holds an arrangement of cells over Q_{r(i)}; the 1-colored
(core) cells sit exactly at the sumset Gamma*_{i-1} = Gamma_1 + ... +
Gamma_{i-1} where Gamma_j = Q_{s(j)} intersect m(j)Z^2. Because m(j) >
2 r(j), every core site has a unique representation as a sum of per-level
offsets, and all window statistics factor per coordinate. The counting
helpers below exploit that factorization; nothing enumerates sites when an
interval computation suffices.

Points are addresses (gamma_1, ..., gamma_{i-1}): the interval structure of
the underlying arrangement is quotiented away since every computable
observable depends only on positions and widths. The generic engine keeps
explicit cells for small worked examples and non-uniform colorings.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import rng
from .lattice import Box, Pattern, Site, UsageError, site_add, sup_norm


class StageCapError(RuntimeError):
    """A window evaluation needed more construction stages than are built."""


MAX_STAGES = 64


# ---------------------------------------------------------------------------
# Schedules


@dataclass(frozen=True)
class Schedule:
    """Radii prefix with derived steps s(i) and spacings m(i).

    Invariants: s(i) = r(i+1) - r(i), m(i)^(1/theta) = s(i) exactly, and
    m(i) > c * r(i) with c >= 2 (uniqueness of address decomposition needs
    m(i) > 2 r(i)).
    """

    radii: tuple[int, ...]
    theta: Fraction
    c: Fraction

    def __post_init__(self) -> None:
        if len(self.radii) < 1 or self.radii[0] < 1:
            raise UsageError("schedule needs at least one radius with r(1) >= 1")
        if not (0 < self.theta < 1) or Fraction(1) / self.theta != int(Fraction(1) / self.theta):
            raise UsageError(f"theta must be a reciprocal integer in (0,1), got {self.theta}")
        if self.c < 2:
            raise UsageError(f"spacing factor c must be >= 2, got {self.c}")
        if len(self.radii) > MAX_STAGES:
            raise UsageError(f"too many stages ({len(self.radii)} > {MAX_STAGES})")
        inv = int(Fraction(1) / self.theta)
        prev = 0
        for i, r in enumerate(self.radii, start=1):
            if r <= prev:
                raise UsageError(f"radii must be strictly increasing, r({i}) = {r}")
            prev = r
        for i in range(1, len(self.radii)):
            s = self.radii[i] - self.radii[i - 1]
            m = _int_root(s, inv)
            if m is None:
                raise UsageError(f"s({i}) = {s} is not a perfect {inv}-th power")
            if m <= self.c * self.radii[i - 1]:
                raise UsageError(f"m({i}) = {m} violates m > c*r = {self.c * self.radii[i - 1]}")
            if 2 * self.radii[i - 1] >= m:
                raise UsageError(f"m({i}) = {m} <= 2 r({i}) breaks unique decomposition")

    @property
    def stages(self) -> int:
        return len(self.radii)

    def r(self, i: int) -> int:
        """Schedule radius r(i), 1-based."""
        if not 1 <= i <= self.stages:
            raise UsageError(f"r({i}) out of range 1..{self.stages}")
        return self.radii[i - 1]

    def arrangement_radius(self, i: int) -> int:
        """Radius of the stage-i arrangement: 0 at stage 1, r(i) afterwards."""
        return 0 if i == 1 else self.r(i)

    def s(self, i: int) -> int:
        """Step s(i) = r(i+1) - r(i); defined for 1 <= i < stages."""
        return self.r(i + 1) - self.r(i)

    def m(self, i: int) -> int:
        inv = int(Fraction(1) / self.theta)
        root = _int_root(self.s(i), inv)
        assert root is not None
        return root

    def level(self, i: int) -> "GammaLevel":
        return GammaLevel(i, self.m(i), self.s(i))

    def levels_1d(self, upto: int) -> list[tuple[int, int]]:
        """(m(j), s(j)) for j = 1..upto, the per-coordinate level data."""
        return [(self.m(j), self.s(j)) for j in range(1, upto + 1)]

    def prod_r_exponent(self, i: int) -> float:
        """Diagnostic log(prod_{j<=i} r(j)) / log r(i); 1 + o(1) only for fast growth."""
        if self.r(i) == 1:
            return float("nan")
        acc = sum(math.log(self.r(j)) for j in range(1, i + 1))
        return acc / math.log(self.r(i))


def _int_root(value: int, k: int) -> int | None:
    """Exact integer k-th root of value, or None. Pure-integer Newton iteration."""
    if value < 1:
        return None
    x = 1 << -(-value.bit_length() // k)
    while True:
        y = ((k - 1) * x + value // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    return x if x**k == value else None


def build_schedule(stages: int, theta: Fraction = Fraction(1, 3), c: Fraction | int = 2, r1: int = 1) -> Schedule:
    """Greedy minimal schedule: m(i) is the smallest integer > c * r(i)."""
    if stages < 1 or stages > MAX_STAGES:
        raise UsageError(f"stage count must be in 1..{MAX_STAGES}")
    c = Fraction(c)
    inv = Fraction(1) / theta
    if not (0 < theta < 1) or inv != int(inv):
        raise UsageError(f"theta must be a reciprocal integer in (0,1), got {theta}")
    inv = int(inv)
    radii = [r1]
    for _ in range(stages - 1):
        r = radii[-1]
        m = int(c * r) + 1 if (c * r) == int(c * r) else math.ceil(c * r)
        radii.append(r + m**inv)
    return Schedule(tuple(radii), Fraction(theta), c)


def schedule_to_text(sched: Schedule) -> str:
    lines = [f"theta {sched.theta.numerator}/{sched.theta.denominator}", f"c {sched.c}"]
    for i in range(1, sched.stages + 1):
        lines.append(f"r {i} {sched.r(i)}")
    return "\n".join(lines) + "\n"


def schedule_from_text(text: str) -> Schedule:
    theta: Fraction | None = None
    c: Fraction | None = None
    radii: dict[int, int] = {}
    for ln in text.splitlines():
        parts = ln.split()
        if not parts:
            continue
        if parts[0] == "theta" and len(parts) == 2:
            theta = Fraction(parts[1])
        elif parts[0] == "c" and len(parts) == 2:
            c = Fraction(parts[1])
        elif parts[0] == "r" and len(parts) == 3:
            radii[int(parts[1])] = int(parts[2])
        else:
            raise UsageError(f"bad schedule line: {ln!r}")
    if theta is None or c is None or not radii:
        raise UsageError("schedule file needs theta, c, and r lines")
    if sorted(radii) != list(range(1, len(radii) + 1)):
        raise UsageError("schedule r indices must be 1..K without gaps")
    return Schedule(tuple(radii[i] for i in sorted(radii)), theta, c)


# ---------------------------------------------------------------------------
# Gamma levels, addresses, decomposition


@dataclass(frozen=True)
class GammaLevel:
    """Level-i offset lattice Q_{s(i)} intersect m(i)Z^2."""

    level: int
    spacing: int
    radius: int

    def __contains__(self, u: Site) -> bool:
        return all(a % self.spacing == 0 and abs(a) <= self.radius for a in u)

    def steps(self) -> int:
        return self.radius // self.spacing

    def axis_values(self) -> list[int]:
        k = self.steps()
        return [q * self.spacing for q in range(-k, k + 1)]

    def enumerate(self) -> Iterable[Site]:
        vals = self.axis_values()
        return ((x, y) for x in vals for y in vals)


def gamma_size(level: GammaLevel) -> int:
    """|Gamma_i| = (2 s(i)/m(i) + 1)^2; requires m(i) | s(i)."""
    if level.radius % level.spacing != 0:
        raise UsageError(f"spacing {level.spacing} does not divide radius {level.radius}")
    return (2 * (level.radius // level.spacing) + 1) ** 2


def gamma_star_size(stage: int, sched: Schedule) -> int:
    """|Gamma*_{stage-1}| = product of level sizes below the stage; 1 at stage 1."""
    out = 1
    for j in range(1, stage):
        out *= gamma_size(sched.level(j))
    return out


@dataclass(frozen=True)
class Address:
    """Per-level offsets (gamma_1, ..., gamma_{stage-1}) identifying a core column."""

    levels: tuple[Site, ...]
    stage: int

    def __post_init__(self) -> None:
        if len(self.levels) != self.stage - 1:
            raise UsageError(f"address with {len(self.levels)} levels cannot be stage {self.stage}")

    def site(self) -> Site:
        x = sum(g[0] for g in self.levels)
        y = sum(g[1] for g in self.levels)
        return (x, y)


def validate_address(addr: Address, sched: Schedule) -> None:
    for j, g in enumerate(addr.levels, start=1):
        if g not in sched.level(j):
            raise UsageError(f"level-{j} offset {g} outside Gamma_{j}")
    reach = sched.r(addr.stage) - sched.r(1)
    if addr.levels and sup_norm(addr.site()) > reach:
        raise UsageError("address site escapes Q_{r(i)-r(1)}")


def _peel_coord(a: int, spacing: int, radius: int, bound: int) -> int | None:
    """Unique multiple g of spacing with |g| <= radius and |a - g| <= bound, else None."""
    q = round(a / spacing) * spacing
    for cand in (q, q - spacing, q + spacing):
        if abs(cand) <= radius and abs(a - cand) <= bound:
            return cand
    return None


def decompose(v: Site, stage: int, sched: Schedule) -> Address | None:
    """Unique representation of v over Gamma_{stage-1} + ... + Gamma_1, or None.

    Works top-down: at level j the remainder must stay within the total
    reach r(j) - r(1) of the lower levels, and m(j) > 2 r(j) forces at most
    one candidate multiple per coordinate, so no backtracking is needed.
    """
    if stage < 1 or stage > sched.stages:
        raise UsageError(f"stage {stage} out of range 1..{sched.stages}")
    levels: list[Site] = []
    current = tuple(v)
    for j in range(stage - 1, 0, -1):
        m, s = sched.m(j), sched.s(j)
        bound = sched.r(j) - sched.r(1)
        picked = []
        for a in current:
            g = _peel_coord(a, m, s, bound)
            if g is None:
                return None
            picked.append(g)
        levels.append(tuple(picked))
        current = tuple(a - g for a, g in zip(current, picked))
    if any(a != 0 for a in current):
        return None
    return Address(tuple(reversed(levels)), stage)


def compose(levels: Sequence[Site], sched: Schedule) -> Site:
    addr = Address(tuple(levels), len(levels) + 1)
    validate_address(addr, sched)
    return addr.site()


# ---------------------------------------------------------------------------
# 1-D counting kernels. Everything about core sets and copy coverage factors
# per coordinate, so these four little functions carry all the heavy lifting.


def _axis_count(levels: list[tuple[int, int]], lo: int, hi: int) -> int:
    """|(G_1 + ... + G_J) ∩ [lo, hi]| for per-coordinate grids G_j = m_j Z ∩ [-s_j, s_j]."""
    if lo > hi:
        return 0
    if not levels:
        return 1 if lo <= 0 <= hi else 0
    if len(levels) == 1:
        m, s = levels[0]
        a, b = max(lo, -s), min(hi, s)
        if a > b:
            return 0
        return b // m - -(-a // m) + 1 if b // m >= -(-a // m) else 0
    m, s = levels[-1]
    rest = levels[:-1]
    reach = sum(t[1] for t in rest)
    if lo <= -(reach + s) and hi >= reach + s:
        out = 1
        for mm, ss in levels:
            out *= 2 * (ss // mm) + 1
        return out
    k = s // m
    total = 0
    for q in range(max(-(-(lo - reach) // m), -k), min((hi + reach) // m, k) + 1):
        total += _axis_count(rest, lo - q * m, hi - q * m)
    return total


def _axis_count_sum(levels: list[tuple[int, int]], lo: int, hi: int) -> tuple[int, int]:
    """Count and coordinate-sum of (G_1 + ... + G_J) ∩ [lo, hi]."""
    if lo > hi:
        return 0, 0
    if not levels:
        return (1, 0) if lo <= 0 <= hi else (0, 0)
    if len(levels) == 1:
        m, s = levels[0]
        a, b = max(lo, -s), min(hi, s)
        if a > b:
            return 0, 0
        qa, qb = -(-a // m), b // m
        if qb < qa:
            return 0, 0
        cnt = qb - qa + 1
        return cnt, m * (qa + qb) * cnt // 2
    m, s = levels[-1]
    rest = levels[:-1]
    reach = sum(t[1] for t in rest)
    k = s // m
    cnt_total, sum_total = 0, 0
    for q in range(max(-(-(lo - reach) // m), -k), min((hi + reach) // m, k) + 1):
        base = q * m
        cnt, sm = _axis_count_sum(rest, lo - base, hi - base)
        cnt_total += cnt
        sum_total += sm + base * cnt
    return cnt_total, sum_total


def _axis_values(levels: list[tuple[int, int]], lo: int, hi: int) -> list[int]:
    """Sorted values of (G_1 + ... + G_J) ∩ [lo, hi]."""
    if lo > hi:
        return []
    if not levels:
        return [0] if lo <= 0 <= hi else []
    m, s = levels[-1]
    rest = levels[:-1]
    reach = sum(t[1] for t in rest)
    k = s // m
    out: list[int] = []
    for q in range(max(-(-(lo - reach) // m), -k), min((hi + reach) // m, k) + 1):
        base = q * m
        out.extend(base + x for x in _axis_values(rest, lo - base, hi - base))
    return out


def _axis_covered(levels: list[tuple[int, int]], halfwidth: int, lo: int, hi: int) -> int:
    """|(Lambda + [-halfwidth, halfwidth]) ∩ [lo, hi]| with Lambda the level sumset.

    Copy intervals can abut or overlap when spacing is tight, so this merges
    the interval union explicitly instead of multiplying counts.
    """
    if lo > hi:
        return 0
    centers = _axis_values(levels, lo - halfwidth, hi + halfwidth)
    total = 0
    cur_lo: int | None = None
    cur_hi = 0
    for c in centers:
        a, b = max(c - halfwidth, lo), min(c + halfwidth, hi)
        if a > b:
            continue
        if cur_lo is None:
            cur_lo, cur_hi = a, b
        elif a <= cur_hi + 1:
            cur_hi = max(cur_hi, b)
        else:
            total += cur_hi - cur_lo + 1
            cur_lo, cur_hi = a, b
    if cur_lo is not None:
        total += cur_hi - cur_lo + 1
    return total


# ---------------------------------------------------------------------------
# Points


@dataclass
class PointHandle:
    """A sampled core point, identified by its address and grown lazily.

    Level offsets at already-computed stages never change; extension draws
    come from counter-based streams keyed by (seed, level), so identical
    (seed, schedule) pairs reproduce identical extensions regardless of the
    order in which windows are evaluated.
    """

    schedule: Schedule
    seed: int
    levels: list[Site] = field(default_factory=list)
    zero_fill: bool = False
    overlay_seed: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.overlay_seed == 0:
            self.overlay_seed = rng.derive_seed(self.seed, "overlay-seed")

    @property
    def stage(self) -> int:
        return len(self.levels) + 1

    def extend_to(self, stage: int) -> None:
        """Grow the address so the point lives in the stage-`stage` arrangement."""
        if stage > self.schedule.stages:
            raise StageCapError(
                f"stage {stage} exceeds built schedule ({self.schedule.stages} stages); "
                f"max feasible window shrinks accordingly"
            )
        with self._lock:
            for j in range(len(self.levels) + 1, stage):
                if self.zero_fill:
                    self.levels.append((0, 0))
                    continue
                k = self.schedule.s(j) // self.schedule.m(j)
                qx = rng.uniform_int(self.seed, "gamma-x", j, lo=-k, hi=k)
                qy = rng.uniform_int(self.seed, "gamma-y", j, lo=-k, hi=k)
                m = self.schedule.m(j)
                self.levels.append((qx * m, qy * m))

    def position_at(self, stage: int) -> Site:
        """Position of the point in the stage-`stage` arrangement."""
        self.extend_to(stage)
        x = sum(g[0] for g in self.levels[: stage - 1])
        y = sum(g[1] for g in self.levels[: stage - 1])
        return (x, y)

    def determining_stage(self, n: int) -> int:
        """Smallest stage whose arrangement pins every color in the window Q_n.

        Uses the conservative slack rule n + r(stage-1) <= r(stage) - ||u||,
        which leaves room for a full lower-stage copy around the window.
        """
        if n == 0 and not self.levels:
            return 1
        for j in range(2, self.schedule.stages + 1):
            u = self.position_at(j)
            slack = self.schedule.r(j - 1)
            if n + slack <= self.schedule.r(j) - sup_norm(u):
                return j
        raise StageCapError(
            f"window Q_{n} not determined within {self.schedule.stages} built stages"
        )


def sample_point(sched: Schedule, stage: int, seed: int) -> PointHandle:
    """Draw a stage-`stage` point with independent uniform per-level offsets."""
    if stage < 1:
        raise UsageError(f"stage must be >= 1, got {stage}")
    p = PointHandle(sched, seed)
    p.extend_to(stage)
    return p


def point_from_address(sched: Schedule, levels: Sequence[Site], seed: int = 0, zero_fill: bool = True) -> PointHandle:
    """Point with pinned low-level offsets; higher levels zero (canonical embedding)."""
    p = PointHandle(sched, seed, levels=list(levels), zero_fill=zero_fill)
    for j, g in enumerate(levels, start=1):
        if g not in sched.level(j):
            raise UsageError(f"level-{j} offset {g} outside Gamma_{j}")
    return p


# ---------------------------------------------------------------------------
# Window evaluation


def color01_at(point: PointHandle, v: Site) -> int:
    """Color of the site at offset v from the point: 1 on the core sumset, else 0."""
    j = point.determining_stage(sup_norm(v))
    w = site_add(point.position_at(j), v)
    return 1 if decompose(w, j, point.schedule) is not None else 0


def window_axes(point: PointHandle, n: int) -> tuple[list[int], list[int]]:
    """Per-coordinate offsets of the 1-cells in Q_n around the point.

    The window's 1-cell set is always a product X x Y because the core
    sumset is a product of identical per-coordinate sumsets.
    """
    j = point.determining_stage(n)
    u = point.position_at(j)
    levels = point.schedule.levels_1d(j - 1)
    xs = [x - u[0] for x in _axis_values(levels, u[0] - n, u[0] + n)]
    ys = [y - u[1] for y in _axis_values(levels, u[1] - n, u[1] + n)]
    return xs, ys


def name01(point: PointHandle, n: int) -> Pattern:
    """The two-color name of radius n: sparse pattern with default 0."""
    xs, ys = window_axes(point, n)
    cells = {(x, y): 1 for x in xs for y in ys}
    return Pattern(Box(n), 0, cells)


def core_count(point: PointHandle, n: int) -> int:
    """|{v in Q_n : color = 1}| without materializing the window."""
    j = point.determining_stage(n)
    u = point.position_at(j)
    levels = point.schedule.levels_1d(j - 1)
    return _axis_count(levels, u[0] - n, u[0] + n) * _axis_count(levels, u[1] - n, u[1] + n)


def core_centroid(point: PointHandle, n: int) -> tuple[int, Fraction, Fraction]:
    """Count and exact mean offset of the window's 1-cells."""
    j = point.determining_stage(n)
    u = point.position_at(j)
    levels = point.schedule.levels_1d(j - 1)
    cx, sx = _axis_count_sum(levels, u[0] - n, u[0] + n)
    cy, sy = _axis_count_sum(levels, u[1] - n, u[1] + n)
    if cx == 0 or cy == 0:
        raise UsageError("empty window core")
    # mean over the product set factors into per-axis means
    return cx * cy, Fraction(sx, cx) - u[0], Fraction(sy, cy) - u[1]


def count_provenance_leq(point: PointHandle, n: int, prov_stage: int) -> int:
    """Number of sites in Q_n around the point whose cell was created at a stage <= prov_stage."""
    j = point.determining_stage(n)
    if prov_stage >= j:
        return (2 * n + 1) ** 2
    u = point.position_at(j)
    halfwidth = point.schedule.arrangement_radius(prov_stage)
    levels = [(point.schedule.m(t), point.schedule.s(t)) for t in range(prov_stage, j)]
    return _axis_covered(levels, halfwidth, u[0] - n, u[0] + n) * _axis_covered(
        levels, halfwidth, u[1] - n, u[1] + n
    )


def locate_site(point: PointHandle, v: Site) -> tuple[int, Site]:
    """Creation stage of the cell at offset v, plus its position in that stage's arrangement.

    Peels level offsets top-down; the remainder after peeling level l must
    lie inside the stage-l arrangement (radius r(l), or 0 at stage 1).
    """
    j = point.determining_stage(sup_norm(v))
    current = site_add(point.position_at(j), v)
    prov = j
    for l in range(j - 1, 0, -1):
        m, s = point.schedule.m(l), point.schedule.s(l)
        bound = point.schedule.arrangement_radius(l)
        picked = []
        for a in current:
            g = _peel_coord(a, m, s, bound)
            if g is None:
                break
            picked.append(g)
        if len(picked) != 2:
            break
        current = tuple(a - g for a, g in zip(current, picked))
        prov = l
    return prov, current


# ---------------------------------------------------------------------------
# Mass ledger


@dataclass(frozen=True)
class MassLedger:
    """Exact per-stage measure bookkeeping."""

    widths: tuple[Fraction, ...]
    stage_masses: tuple[Fraction, ...]
    new_masses: tuple[Fraction, ...]
    core_masses: tuple[Fraction, ...]

    def width(self, i: int) -> Fraction:
        return self.widths[i - 1]

    def stage_mass(self, i: int) -> Fraction:
        return self.stage_masses[i - 1]

    def new_mass(self, i: int) -> Fraction:
        return self.new_masses[i - 1]

    def mu_core(self, i: int) -> Fraction:
        return self.core_masses[i - 1]


def mass_ledger(sched: Schedule, stage: int) -> MassLedger:
    """Widths, total stage masses, per-stage new mass, and the core mass mu(A).

    The core mass is |Gamma*_{i-1}| * w(i) and equals 1 at every stage: the
    core never gains cells, it is only cut into thinner copies.
    """
    widths = [Fraction(1)]
    for j in range(1, stage):
        widths.append(widths[-1] / gamma_size(sched.level(j)))
    totals, news, cores = [], [], []
    for i in range(1, stage + 1):
        side = 2 * sched.arrangement_radius(i) + 1
        total = side * side * widths[i - 1]
        totals.append(total)
        news.append(total - totals[i - 2] if i >= 2 else total)
        cores.append(gamma_star_size(i, sched) * widths[i - 1])
    return MassLedger(tuple(widths), tuple(totals), tuple(news), tuple(cores))


# ---------------------------------------------------------------------------
# Generic cutting-and-tiling engine (explicit cells, small instances only)


@dataclass
class Arrangement:
    """Explicit arrangement: equal-width cells over Q_radius with colors and provenance."""

    radius: int
    width: Fraction
    cells: dict[Site, tuple[int, int]]
    stage: int

    def total_mass(self) -> Fraction:
        return self.width * len(self.cells)

    def mass_of(self, pred: Callable[[Site, int, int], bool]) -> Fraction:
        return self.width * sum(1 for u, (color, prov) in self.cells.items() if pred(u, color, prov))


def initial_arrangement(color: int = 1) -> Arrangement:
    """Stage 1: a single cell of width 1 at the origin."""
    return Arrangement(0, Fraction(1), {(0, 0): (color, 1)}, 1)


GENERIC_CELL_CAP = 5_000_000


def generic_cut_tile(
    arr: Arrangement,
    m: int,
    psi: dict[int, Site],
    r_next: int,
    new_color: int = 0,
) -> Arrangement:
    """Cut `arr` into m equal-width pieces, translate piece j to psi(j), fill the rest.

    psi must be injective with pairwise spacing >= 2 * arr.radius and keep
    every placed copy inside Q_{r_next}; placements may not collide. Old
    cell mass is conserved exactly.
    """
    if sorted(psi) != list(range(1, m + 1)):
        raise UsageError("psi must be defined exactly on 1..m")
    targets = list(psi.values())
    if len(set(targets)) != m:
        raise UsageError("psi must be injective")
    for i in range(m):
        for j in range(i + 1, m):
            if sup_norm(site_add(targets[i], tuple(-a for a in targets[j]))) < 2 * arr.radius:
                raise UsageError(f"psi spacing violation between pieces {i + 1} and {j + 1}")
    if (2 * r_next + 1) ** 2 > GENERIC_CELL_CAP:
        raise UsageError(f"arrangement Q_{r_next} exceeds the explicit-cell cap")
    new_stage = arr.stage + 1
    cells: dict[Site, tuple[int, int]] = {}
    for j in range(1, m + 1):
        base = psi[j]
        for u, payload in arr.cells.items():
            w = site_add(base, u)
            if sup_norm(w) > r_next:
                raise UsageError(f"placement {w} of piece {j} escapes Q_{r_next}")
            if w in cells:
                raise UsageError(f"placement collision at {w}")
            cells[w] = payload
    for x in range(-r_next, r_next + 1):
        for y in range(-r_next, r_next + 1):
            if (x, y) not in cells:
                cells[(x, y)] = (new_color, new_stage)
    out = Arrangement(r_next, arr.width / m, cells, new_stage)
    assert out.mass_of(lambda u, c, p: p < new_stage) == arr.total_mass()
    return out


def boundary_mass(arr: Arrangement, dist: int) -> Fraction:
    """Mass of pre-existing cells within `dist` of the boundary of the arrangement box."""
    return arr.mass_of(lambda u, c, p: p < arr.stage and sup_norm(u) >= arr.radius - dist)


def construction_arrangement(sched: Schedule, stage: int) -> Arrangement:
    """Materialize the first `stage` arrangements of the two-color construction."""
    arr = initial_arrangement()
    for i in range(1, stage):
        level = sched.level(i)
        gammas = sorted(level.enumerate())
        psi = {j + 1: g for j, g in enumerate(gammas)}
        arr = generic_cut_tile(arr, len(gammas), psi, sched.r(i + 1), new_color=0)
    return arr
