"""Covering and separation numbers with mass slack, plus growth-exponent fits.

The exact oracle searches point-subset covers only: over a finite weighted
sample, arbitrary measurable cover sets can be replaced by their traces on
the sample, so point subsets are fully general. Feasible sets are subsets
of maximal cliques of the diameter graph, which keeps branch-and-bound
small. Everything combinatorial is exact rational; only the growth fits
use floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .lattice import UsageError


class CoverTooLarge(RuntimeError):
    """Instance exceeds the exact oracle's brute-force limit; use the bounds."""


EXACT_COVER_LIMIT = 20


@dataclass
class MetricSample:
    """Finite weighted point set with an exact pairwise distance matrix."""

    ids: tuple
    masses: tuple[Fraction, ...]
    dist: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.ids)
        if len(self.masses) != n or len(self.dist) != n or any(len(row) != n for row in self.dist):
            raise UsageError("sample shape mismatch")
        if any(m < 0 for m in self.masses):
            raise UsageError("negative mass")
        for i in range(n):
            if self.dist[i][i] != 0:
                raise UsageError(f"nonzero diagonal at {i}")
            for j in range(i + 1, n):
                if self.dist[i][j] != self.dist[j][i]:
                    raise UsageError(f"asymmetric distances at ({i},{j})")
                if self.dist[i][j] < 0:
                    raise UsageError(f"negative distance at ({i},{j})")

    def __len__(self) -> int:
        return len(self.ids)

    def total_mass(self) -> Fraction:
        return sum(self.masses, Fraction(0))

    def check_triangle(self) -> None:
        n = len(self.ids)
        d = self.dist
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if d[i][k] > d[i][j] + d[j][k]:
                        raise UsageError(f"triangle violation at ({i},{j},{k})")


def sample_from_points(ids: Sequence, masses: Sequence[Fraction], metric) -> MetricSample:
    """Assemble a sample by evaluating `metric(id_i, id_j)` on all pairs."""
    n = len(ids)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = Fraction(metric(ids[i], ids[j]))
            rows[i][j] = rows[j][i] = v
    return MetricSample(tuple(ids), tuple(Fraction(m) for m in masses), tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class CoverEstimate:
    """Bracketing of a covering number, with the parameters that produced it."""

    lower: int
    upper: int
    exact: int | None
    methods: tuple[str, ...]
    eps_diam: Fraction
    eps_mass: Fraction

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise UsageError(f"inconsistent estimate: lower {self.lower} > upper {self.upper}")
        if self.exact is not None and not (self.lower <= self.exact <= self.upper):
            raise UsageError(f"inconsistent estimate {self.lower} <= {self.exact} <= {self.upper}")


def _maximal_cliques(adj: list[int], n: int) -> list[int]:
    """Bitmask maximal cliques of the diameter-feasibility graph (Bron-Kerbosch)."""
    cliques: list[int] = []

    def expand(r: int, p: int, x: int) -> None:
        if p == 0 and x == 0:
            cliques.append(r)
            return
        pivot_candidates = p | x
        pivot = (pivot_candidates & -pivot_candidates).bit_length() - 1
        best = pivot
        best_deg = -1
        pc = pivot_candidates
        while pc:
            v = (pc & -pc).bit_length() - 1
            deg = bin(adj[v] & p).count("1")
            if deg > best_deg:
                best, best_deg = v, deg
            pc &= pc - 1
        ext = p & ~adj[best]
        while ext:
            v = (ext & -ext).bit_length() - 1
            bit = 1 << v
            expand(r | bit, p & adj[v], x & adj[v])
            p &= ~bit
            x |= bit
            ext &= ~bit
        return

    expand(0, (1 << n) - 1, 0)
    return cliques


def exact_cover_number(
    sample: MetricSample,
    eps_diam: Fraction,
    eps_mass: Fraction = Fraction(0),
    limit: int = EXACT_COVER_LIMIT,
) -> int:
    """Minimal number of diameter <= eps_diam subsets covering mass >= (1 - eps_mass) * total."""
    n = len(sample)
    if n > limit:
        raise CoverTooLarge(f"{n} points exceeds exact limit {limit}; use the greedy/separation bounds")
    total = sample.total_mass()
    target = (Fraction(1) - Fraction(eps_mass)) * total
    if target <= 0:
        return 0
    adj = [0] * n
    for i in range(n):
        for j in range(n):
            if i != j and sample.dist[i][j] <= eps_diam:
                adj[i] |= 1 << j
    cliques = _maximal_cliques(adj, n)
    mass_bits = list(sample.masses)

    def mass_of(mask: int) -> Fraction:
        out = Fraction(0)
        while mask:
            v = (mask & -mask).bit_length() - 1
            out += mass_bits[v]
            mask &= mask - 1
        return out

    clique_mass = [(mass_of(c), c) for c in cliques]
    clique_mass.sort(key=lambda t: (-t[0], t[1]))
    best_single = clique_mass[0][0] if clique_mass else Fraction(0)

    def feasible(depth_left: int, covered: int, covered_mass: Fraction, seen: dict[int, int]) -> bool:
        if covered_mass >= target:
            return True
        if depth_left == 0:
            return False
        # prune only when this mask was reached before with at least as much depth
        if seen.get(covered, -1) >= depth_left:
            return False
        seen[covered] = depth_left
        if covered_mass + depth_left * best_single < target:
            return False
        for cmass, c in clique_mass:
            gain = c & ~covered
            if gain == 0:
                continue
            if covered_mass + depth_left * cmass < target:
                break
            if feasible(depth_left - 1, covered | c, covered_mass + mass_of(gain), seen):
                return True
        return False

    for count in range(0, n + 1):
        if feasible(count, 0, Fraction(0), {}):
            return count
    raise AssertionError("cover search failed to terminate")


def greedy_cover_upper(sample: MetricSample, eps_diam: Fraction, eps_mass: Fraction = Fraction(0)) -> int:
    """Greedy ball cover: radius eps_diam/2 balls certify diameter <= eps_diam.

    Repeatedly takes the ball covering the most uncovered mass (ties to the
    smallest center index); the result is a valid cover, hence an upper
    bound on the exact count.
    """
    n = len(sample)
    total = sample.total_mass()
    target = (Fraction(1) - Fraction(eps_mass)) * total
    if target <= 0:
        return 0
    radius = Fraction(eps_diam) / 2
    balls = []
    for i in range(n):
        mask = 0
        for j in range(n):
            if sample.dist[i][j] <= radius:
                mask |= 1 << j
        balls.append(mask)
    covered = 0
    covered_mass = Fraction(0)
    count = 0
    while covered_mass < target:
        best_i, best_gain = -1, Fraction(-1)
        for i in range(n):
            gain = Fraction(0)
            m = balls[i] & ~covered
            while m:
                v = (m & -m).bit_length() - 1
                gain += sample.masses[v]
                m &= m - 1
            if gain > best_gain:
                best_i, best_gain = i, gain
        if best_gain <= 0:
            break
        covered |= balls[best_i]
        covered_mass += best_gain
        count += 1
    return count


def max_separated_lower(sample: MetricSample, eps: Fraction) -> int:
    """First-fit maximal eps-separated subset, scanning by point index.

    Any cover by sets of diameter < eps contains at most one selected point
    per set, so the size lower-bounds full-coverage covers. Points of zero
    mass still get selected but need not be covered, so the lower-bound
    reading requires strictly positive masses.
    """
    chosen: list[int] = []
    for i in range(len(sample)):
        if all(sample.dist[i][j] >= eps for j in chosen):
            chosen.append(i)
    return len(chosen)


def cover_estimate(sample: MetricSample, eps_diam: Fraction, eps_mass: Fraction = Fraction(0)) -> CoverEstimate:
    """Bundle separation lower bound, greedy upper bound, and the oracle when feasible.

    The separation count only bounds full-coverage covers, so with mass
    slack the lower bound degrades to the trivial one.
    """
    eps_mass = Fraction(eps_mass)
    if eps_mass == 0:
        lower = max_separated_lower(sample, Fraction(eps_diam) + Fraction(1, 10**9))
        methods = ["first-fit-separated", "greedy-ball"]
    else:
        lower = 1 if (Fraction(1) - eps_mass) * sample.total_mass() > 0 else 0
        methods = ["trivial-lower", "greedy-ball"]
    upper = greedy_cover_upper(sample, eps_diam, eps_mass)
    exact: int | None = None
    if len(sample) <= EXACT_COVER_LIMIT:
        exact = exact_cover_number(sample, eps_diam, eps_mass)
        methods.append("branch-and-bound")
    return CoverEstimate(lower, upper, exact, tuple(methods), Fraction(eps_diam), eps_mass)


# ---------------------------------------------------------------------------
# Growth fitting


@dataclass(frozen=True)
class GrowthFit:
    """Least-squares exponent over a declared window plus a limsup surrogate.

    The surrogate is the maximum over all suffix windows (of >= 2 samples
    for regression scales, >= 1 for pointwise scales) and is always
    reported with the window that attained it.
    """

    scale: str
    samples: tuple[tuple[int, float], ...]
    exponent: float
    residual: float
    window: tuple[int, ...]
    limsup_exponent: float
    limsup_window: tuple[int, ...]


def _least_squares(xs: list[float], ys: list[float]) -> tuple[float, float]:
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        raise UsageError("degenerate fit: coincident abscissae")
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
    intercept = my - slope * mx
    resid = max(abs(y - (slope * x + intercept)) for x, y in zip(xs, ys))
    return slope, resid


def growth_fit(samples: Sequence[tuple[int, float]], scale: str, window: int | None = None) -> GrowthFit:
    """Fit a growth exponent on the stated scale.

    slow: log log value against log n (the exponent alpha in value ~ 2^(n^alpha)).
    exp:  log2 value against n (the rate in value ~ 2^(rate n)).
    """
    if scale not in ("slow", "exp"):
        raise UsageError(f"unknown scale {scale!r}")
    pts = list(samples)
    if any(pts[i][0] >= pts[i + 1][0] for i in range(len(pts) - 1)):
        raise UsageError("sample abscissae must be strictly increasing")
    if scale == "slow":
        if any(v <= 1 for _, v in pts):
            raise UsageError("slow scale needs values > 1")
        if any(n <= 1 for n, _ in pts):
            raise UsageError("slow scale needs n > 1")
        xs = [math.log(n) for n, _ in pts]
        ys = [math.log(math.log(v)) for _, v in pts]
    else:
        if any(v <= 0 for _, v in pts):
            raise UsageError("exp scale needs positive values")
        xs = [float(n) for n, _ in pts]
        ys = [math.log2(v) for _, v in pts]
    win = pts if window is None else pts[-window:]
    if len(win) < 2:
        raise UsageError("need at least 2 samples in the fit window")
    offset = len(pts) - len(win)
    slope, resid = _least_squares(xs[offset:], ys[offset:])
    best, best_win = -math.inf, ()
    for start in range(len(pts) - 1):
        s, _ = _least_squares(xs[start:], ys[start:])
        if s > best:
            best, best_win = s, tuple(n for n, _ in pts[start:])
    return GrowthFit(
        scale=scale,
        samples=tuple((n, float(v)) for n, v in pts),
        exponent=slope,
        residual=resid,
        window=tuple(n for n, _ in win),
        limsup_exponent=best,
        limsup_window=best_win,
    )


def alpha_fit(recurrence_counts: Sequence[tuple[int, int]], k: int = 2) -> GrowthFit:
    """Recurrence-dimension surrogate from |R_n| counts.

    Pointwise values log|R_n| / log|Q_n| stand in for the limsup (their max
    is reported as the limsup surrogate); the regression slope of log|R_n|
    against log|Q_n| is the fitted exponent.
    """
    pts = list(recurrence_counts)
    if any(c < 1 for _, c in pts):
        raise UsageError("recurrence counts must be >= 1")
    if any(pts[i][0] >= pts[i + 1][0] for i in range(len(pts) - 1)):
        raise UsageError("sample abscissae must be strictly increasing")
    xs = [math.log(box_count(n, k)) for n, _ in pts]
    ys = [math.log(c) for _, c in pts]
    if len(pts) >= 2:
        slope, resid = _least_squares(xs, ys)
    else:
        slope, resid = float("nan"), 0.0
    pointwise = [(n, ys[i] / xs[i]) for i, (n, _) in enumerate(pts) if xs[i] > 0]
    if not pointwise:
        raise UsageError("need at least one n >= 1 sample")
    best_n, best = max(pointwise, key=lambda t: (t[1], -t[0]))
    return GrowthFit(
        scale="alpha",
        samples=tuple((n, float(c)) for n, c in pts),
        exponent=slope,
        residual=resid,
        window=tuple(n for n, _ in pts),
        limsup_exponent=best,
        limsup_window=(best_n,),
    )


def box_count(n: int, k: int) -> int:
    return (2 * n + 1) ** k


def alpha_pointwise(r_count: int, n: int, k: int = 2) -> float:
    """log |R_n| / log |Q_n| for a single scale."""
    if n < 1:
        raise UsageError("pointwise alpha needs n >= 1")
    if r_count < 1:
        raise UsageError("empty recurrence set")
    return math.log(r_count) / math.log(box_count(n, k))


# ---------------------------------------------------------------------------
# Bowen metric checks for Lipschitz toy actions (floats by design)


def bowen_distance(action, base_metric, n: int, x, y) -> float:
    """sup over ||u||_inf <= n of base_metric(T^u x, T^u y)."""
    best = 0.0
    for ux in range(-n, n + 1):
        for uy in range(-n, n + 1):
            d = base_metric(action.apply((ux, uy), x), action.apply((ux, uy), y))
            if d > best:
                best = d
    return best


def bowen_first_fit_separated(dist_fn, count: int, eps: float) -> int:
    """First-fit separated-set size under a pair distance callback.

    dist_fn(i, j, cap) may stop scanning orbit sites once the running max
    reaches cap; the returned value only needs to be exact on the side of
    the eps comparison it lands on.
    """
    try:
        dist_fn(0, 0, eps)
        capped = True
    except TypeError:
        capped = False
    chosen: list[int] = []
    for i in range(count):
        if capped:
            ok = all(dist_fn(i, j, eps) >= eps for j in chosen)
        else:
            ok = all(dist_fn(i, j) >= eps for j in chosen)
        if ok:
            chosen.append(i)
    return len(chosen)


@dataclass(frozen=True)
class BowenCell:
    n: int
    eps: float
    separation: int
    log2_bound: float
    ok: bool


def bowen_bound_log2(n: int, eps: float, lip_generator: float, sep_prefactor: float, k: int = 2) -> float:
    """log2 of the exponential separation bound C^n / eps^C for Lipschitz actions.

    With lip T^u <= C1^(k n) for ||u|| <= n and sep(Omega, d, eps) <=
    C2 / eps^C2, a separated set under d_n is (eps / C1^(k n))-separated
    under d, so sep <= C2 (C1^(k n) / eps)^C2. Computed in log space; the
    combined single constant is C = max(C2, C1^(k C2), 2).
    """
    c1, c2 = lip_generator, sep_prefactor
    c = max(c2, c1 ** (k * c2), 2.0)
    return n * math.log2(c) + c * math.log2(1.0 / eps)


def bowen_sep_check(
    pair_bowen_dist,
    sample_size: int,
    n_list: Sequence[int],
    eps_list: Sequence[float],
    lip_generator: float,
    sep_prefactor: float,
    k: int = 2,
) -> list[BowenCell]:
    """Check sep(sample, d_n, eps) <= C^n / eps^C in log space per (n, eps) cell.

    pair_bowen_dist(n) must return a callable (i, j) -> Bowen distance at
    radius n between sample points i and j.
    """
    cells = []
    for n in n_list:
        dn = pair_bowen_dist(n)
        for eps in eps_list:
            sep = bowen_first_fit_separated(dn, sample_size, eps)
            log2_bound = bowen_bound_log2(n, eps, lip_generator, sep_prefactor, k)
            cells.append(BowenCell(n, eps, sep, log2_bound, math.log2(max(sep, 1)) <= log2_bound))
    return cells
