"""Slow-entropy estimators and rank-one cutting-and-tiling constructions
for infinite-measure-preserving lattice actions."""

from . import covernum, cutstack, expcli, lattice, partitions, recurrence, rng, symbolic, toys

__all__ = [
    "covernum",
    "cutstack",
    "expcli",
    "lattice",
    "partitions",
    "recurrence",
    "rng",
    "symbolic",
    "toys",
]

__version__ = "0.1.0"
