"""Independent brute-force oracles used to freeze expected test values.

Everything here enumerates sites or subsets directly and stays deliberately
separate from the library's counting and search paths.
"""

from fractions import Fraction
from itertools import combinations

from slowent.lattice import Pattern, box_sites


def dense_pattern_distance(a: Pattern, b: Pattern) -> Fraction:
    """Pattern distance by scanning every site of the box (no sparsity)."""
    assert a.box == b.box
    differing = 0
    core = 0
    for u in a.box.sites():
        sa, sb = a.symbol_at(u), b.symbol_at(u)
        if sa != sb:
            differing += 1
        if sa != a.default_symbol or sb != b.default_symbol:
            core += 1
    return Fraction(differing, core) if core else Fraction(0)


def brute_gamma(spacing: int, radius: int) -> set[tuple[int, int]]:
    return {
        (x, y)
        for x in range(-radius, radius + 1)
        for y in range(-radius, radius + 1)
        if x % spacing == 0 and y % spacing == 0
    }


def brute_gamma_star_member(v: tuple[int, int], levels: list[tuple[int, int]]) -> bool:
    """Membership of v in Gamma_1 + ... + Gamma_J by local enumeration.

    Enumerates candidate offsets of the top level near v and recurses.
    """
    if not levels:
        return v == (0, 0)
    m, s = levels[-1]
    rest = levels[:-1]
    reach = sum(t[1] for t in rest)
    for qx in range(-(s // m), s // m + 1):
        gx = qx * m
        if abs(v[0] - gx) > reach:
            continue
        for qy in range(-(s // m), s // m + 1):
            gy = qy * m
            if abs(v[1] - gy) > reach:
                continue
            if brute_gamma_star_member((v[0] - gx, v[1] - gy), rest):
                return True
    return False


def brute_exact_cover(masses: list[Fraction], dist: list[list[Fraction]], eps_diam: Fraction, eps_mass: Fraction) -> int:
    """Minimal partial cover by enumerating all diameter-feasible subsets."""
    n = len(masses)
    total = sum(masses, Fraction(0))
    target = (Fraction(1) - eps_mass) * total
    if target <= 0:
        return 0
    feasible = []
    for size in range(1, n + 1):
        for combo in combinations(range(n), size):
            if all(dist[i][j] <= eps_diam for i, j in combinations(combo, 2)):
                feasible.append(frozenset(combo))
    for count in range(1, n + 1):
        for chosen in combinations(feasible, count):
            covered = set().union(*chosen)
            if sum((masses[i] for i in covered), Fraction(0)) >= target:
                return count
    raise AssertionError("uncoverable instance")


def brute_window_ones(point, n: int) -> set[tuple[int, int]]:
    """Per-site window colors via the single-site color path (no axis counting)."""
    from slowent.cutstack import color01_at

    return {(x, y) for (x, y) in box_sites(n) if color01_at(point, (x, y)) == 1}
