"""Integer-lattice geometry: sites, centered boxes, sparse patterns, sumsets.

Sites are plain integer tuples. A Pattern is a sparse coloring of a box
Q_n = {u : ||u||_inf <= n}: only cells that differ from the default symbol
are stored, because in the infinite-measure setting the default symbol
occupies all but a vanishing fraction of sites. All distances are exact
rationals; floats never enter this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterator

Site = tuple[int, ...]


class UsageError(ValueError):
    """Caller violated an operation's precondition."""


def site_add(u: Site, v: Site) -> Site:
    return tuple(a + b for a, b in zip(u, v))


def site_sub(u: Site, v: Site) -> Site:
    return tuple(a - b for a, b in zip(u, v))


def site_neg(u: Site) -> Site:
    return tuple(-a for a in u)


def sup_norm(u: Site) -> int:
    return max(abs(a) for a in u)


def box_site_count(n: int, k: int = 2) -> int:
    """Number of lattice sites in Q_n for rank k, exactly (2n+1)^k."""
    if n < 0:
        raise UsageError(f"box radius must be >= 0, got {n}")
    if k < 1:
        raise UsageError(f"rank must be >= 1, got {k}")
    return (2 * n + 1) ** k


def box_sites(n: int, k: int = 2) -> Iterator[Site]:
    """Iterate all sites of Q_n in lexicographic order."""
    if n < 0:
        raise UsageError(f"box radius must be >= 0, got {n}")
    return product(range(-n, n + 1), repeat=k)


@dataclass(frozen=True)
class Box:
    """Centered box Q_n in Z^k."""

    radius: int
    rank: int = 2

    def __post_init__(self) -> None:
        if self.radius < 0 or self.rank < 1:
            raise UsageError(f"invalid box (radius={self.radius}, rank={self.rank})")

    def __contains__(self, u: Site) -> bool:
        return len(u) == self.rank and sup_norm(u) <= self.radius

    def site_count(self) -> int:
        return box_site_count(self.radius, self.rank)

    def sites(self) -> Iterator[Site]:
        return box_sites(self.radius, self.rank)


@dataclass
class Pattern:
    """Sparse coloring of a box; cells holds only the non-default sites."""

    box: Box
    default_symbol: int
    cells: dict[Site, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for u, sym in self.cells.items():
            if u not in self.box:
                raise UsageError(f"cell {u} outside box Q_{self.box.radius}")
            if sym == self.default_symbol:
                raise UsageError(f"cell {u} stores the default symbol (not canonical)")

    def symbol_at(self, u: Site) -> int:
        if u not in self.box:
            raise UsageError(f"site {u} outside box Q_{self.box.radius}")
        return self.cells.get(u, self.default_symbol)

    def support(self) -> set[Site]:
        """Sites carrying a non-default symbol."""
        return set(self.cells)

    def symbols(self) -> set[int]:
        return {self.default_symbol} | set(self.cells.values())

    def restricted(self, radius: int) -> "Pattern":
        """Restriction to the smaller box Q_radius."""
        if radius > self.box.radius:
            raise UsageError(f"cannot restrict Q_{self.box.radius} to larger Q_{radius}")
        sub = Box(radius, self.box.rank)
        return Pattern(sub, self.default_symbol, {u: s for u, s in self.cells.items() if u in sub})

    def key(self) -> tuple:
        """Hashable canonical identity."""
        return (self.box.radius, self.box.rank, self.default_symbol, tuple(sorted(self.cells.items())))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.key() == other.key()


def pattern_distance(a: Pattern, b: Pattern) -> Fraction:
    """Relative Hamming distance between two patterns over the same box.

    Counts disagreeing sites, normalized by the number of sites where either
    pattern is non-default, with the convention 0/0 = 0. Always in [0, 1],
    and a true metric on patterns over a fixed box.
    """
    if a.box != b.box:
        raise UsageError("patterns live on different boxes")
    if a.default_symbol != b.default_symbol:
        raise UsageError("patterns have different default symbols")
    union = a.support() | b.support()
    if not union:
        return Fraction(0)
    differing = sum(1 for u in union if a.cells.get(u, a.default_symbol) != b.cells.get(u, b.default_symbol))
    return Fraction(differing, len(union))


# ---------------------------------------------------------------------------
# Lattice sets: explicit finite sets, arithmetic grids, and their sumsets.


@dataclass(frozen=True)
class ExplicitSet:
    """A finite lattice set given by enumeration."""

    sites: frozenset[Site]

    def __contains__(self, u: Site) -> bool:
        return tuple(u) in self.sites

    def __len__(self) -> int:
        return len(self.sites)

    def enumerate(self) -> Iterator[Site]:
        return iter(sorted(self.sites))


@dataclass(frozen=True)
class GridSet:
    """Q_radius intersected with spacing * Z^rank."""

    spacing: int
    radius: int
    rank: int = 2

    def __post_init__(self) -> None:
        if self.spacing < 1 or self.radius < 0:
            raise UsageError(f"invalid grid (spacing={self.spacing}, radius={self.radius})")

    def __contains__(self, u: Site) -> bool:
        return len(u) == self.rank and all(a % self.spacing == 0 and abs(a) <= self.radius for a in u)

    def steps(self) -> int:
        """Per-coordinate count of multiples on one side of 0."""
        return self.radius // self.spacing

    def __len__(self) -> int:
        return (2 * self.steps() + 1) ** self.rank

    def axis_values(self) -> list[int]:
        k = self.steps()
        return [q * self.spacing for q in range(-k, k + 1)]

    def enumerate(self) -> Iterator[Site]:
        return product(self.axis_values(), repeat=self.rank)


@dataclass(frozen=True)
class SumsetSet:
    """Minkowski sum of grids with unique per-level decomposition.

    Levels are ordered coarse-to-fine is not required; membership peels the
    largest spacing first. Requires every level's spacing to exceed twice the
    reach of the remaining levels, which forces unique representation.
    """

    levels: tuple[GridSet, ...]

    def __post_init__(self) -> None:
        ordered = sorted(self.levels, key=lambda g: g.spacing, reverse=True)
        reach = sum(g.radius for g in ordered)
        for g in ordered:
            reach -= g.radius
            if g.spacing <= 2 * reach:
                raise UsageError(
                    f"spacing {g.spacing} does not dominate remaining reach {reach}; "
                    "sumset would lose unique decomposition"
                )

    def __contains__(self, u: Site) -> bool:
        ordered = sorted(self.levels, key=lambda g: g.spacing, reverse=True)
        rest = list(ordered)
        v = tuple(u)
        while rest:
            g = rest.pop(0)
            reach = sum(h.radius for h in rest)
            picked = []
            for a in v:
                q = _nearest_multiple(a, g.spacing, g.radius, reach)
                if q is None:
                    return False
                picked.append(q)
            v = tuple(a - q for a, q in zip(v, picked))
        return all(a == 0 for a in v)

    def __len__(self) -> int:
        out = 1
        for g in self.levels:
            out *= len(g)
        return out

    def enumerate(self) -> Iterator[Site]:
        axes = [sorted(_sum_axis(self.levels, dim)) for dim in range(self.levels[0].rank)]
        return product(*axes)


def _nearest_multiple(a: int, spacing: int, radius: int, slack: int) -> int | None:
    """The unique multiple q of spacing with |q| <= radius and |a - q| <= slack, or None."""
    q = ((a + spacing // 2) // spacing) * spacing if spacing > 1 else a
    # round-to-nearest can land one step off for negative remainders; scan the
    # two adjacent multiples to be safe
    for cand in (q, q - spacing, q + spacing):
        if abs(cand) <= radius and abs(a - cand) <= slack:
            return cand
    return None


def _sum_axis(levels: tuple[GridSet, ...], dim: int) -> set[int]:
    values = {0}
    for g in levels:
        values = {v + a for v in values for a in g.axis_values()}
    return values


LatticeSet = ExplicitSet | GridSet | SumsetSet


def sumset(left: LatticeSet, right: LatticeSet) -> LatticeSet:
    """Minkowski sum U + V = {u + v : u in U, v in V}.

    Two explicit sets combine by enumeration; anything involving a grid
    descriptor composes descriptors without enumerating.
    """
    if isinstance(left, ExplicitSet) and isinstance(right, ExplicitSet):
        return ExplicitSet(frozenset(site_add(u, v) for u in left.sites for v in right.sites))
    left_levels = _as_levels(left)
    right_levels = _as_levels(right)
    return SumsetSet(left_levels + right_levels)


def _as_levels(s: LatticeSet) -> tuple[GridSet, ...]:
    if isinstance(s, GridSet):
        return (s,)
    if isinstance(s, SumsetSet):
        return s.levels
    raise UsageError("descriptor composition requires grid or sumset operands")


# ---------------------------------------------------------------------------
# Symbol registry and pattern text format.


@dataclass
class SymbolRegistry:
    """Maps small integer symbol ids to display names used in text formats."""

    names: dict[int, str]

    def name(self, sym: int) -> str:
        try:
            return self.names[sym]
        except KeyError:
            raise UsageError(f"symbol id {sym} not registered") from None

    def id_of(self, name: str) -> int:
        for sym, nm in self.names.items():
            if nm == name:
                return sym
        raise UsageError(f"symbol name {name!r} not registered")


#: Default ids: 0/1 for the two-color construction, a/b for overlay bits.
DEFAULT_REGISTRY = SymbolRegistry({0: "0", 1: "1", 2: "a", 3: "b"})


def pattern_to_text(p: Pattern, registry: SymbolRegistry = DEFAULT_REGISTRY) -> str:
    """Canonical text form: header line, then one sorted line per non-default cell."""
    if p.box.rank != 2:
        raise UsageError("text format is defined for rank-2 patterns")
    lines = [f"box {p.box.radius} default {registry.name(p.default_symbol)}"]
    for (x, y), sym in sorted(p.cells.items()):
        lines.append(f"{x} {y} {registry.name(sym)}")
    return "\n".join(lines) + "\n"


def pattern_from_text(text: str, registry: SymbolRegistry = DEFAULT_REGISTRY) -> Pattern:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise UsageError("empty pattern text")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "box" or head[2] != "default":
        raise UsageError(f"bad pattern header: {lines[0]!r}")
    try:
        box = Box(int(head[1]))
    except ValueError:
        raise UsageError(f"bad box radius: {head[1]!r}") from None
    default = registry.id_of(head[3])
    cells: dict[Site, int] = {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise UsageError(f"bad cell line: {ln!r}")
        try:
            site = (int(parts[0]), int(parts[1]))
        except ValueError:
            raise UsageError(f"bad cell line: {ln!r}") from None
        if site in cells:
            raise UsageError(f"duplicate cell {site}")
        cells[site] = registry.id_of(parts[2])
    return Pattern(box, default, cells)
