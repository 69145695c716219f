"""Sensor readings on a fixed 0.1-unit grid.

Readings are stored as integer tenths so range tests, text rendering and
the cost model's match probability all agree exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from typing import NamedTuple

from .errors import CatmosError
from .query_model import RangeQuery, format_number

SCALE = 10


class Reading(NamedTuple):
    node: int
    t: int
    tenths: int

    @property
    def value(self) -> float:
        return self.tenths / SCALE


def to_tenths(x) -> Decimal:
    return Decimal(format_number(x)) * SCALE


def bounds_tenths(q: RangeQuery) -> tuple[int, int]:
    """Smallest and largest grid reading inside ``q``'s inclusive range."""
    return math.ceil(to_tenths(q.min_value)), math.floor(to_tenths(q.max_value))


def matches(q: RangeQuery, tenths: int) -> bool:
    lo, hi = bounds_tenths(q)
    return lo <= tenths <= hi


@dataclass(frozen=True)
class ReadingDistribution:
    """Uniform distribution over the grid points of ``[lo, hi]``."""

    lo: float = 0.0
    hi: float = 60.0

    def __post_init__(self):
        if not self.hi > self.lo:
            raise CatmosError(f"distribution needs hi > lo, got [{self.lo}, {self.hi}]")
        for x in (self.lo, self.hi):
            if to_tenths(x) != int(to_tenths(x)):
                raise CatmosError(f"distribution bound {x} is not on the 0.1 grid")

    @property
    def grid(self) -> tuple[int, int]:
        return int(to_tenths(self.lo)), int(to_tenths(self.hi))

    @property
    def size(self) -> int:
        g_lo, g_hi = self.grid
        return g_hi - g_lo + 1

    def p_match(self, q: RangeQuery) -> float:
        g_lo, g_hi = self.grid
        lo, hi = bounds_tenths(q)
        return max(0, min(hi, g_hi) - max(lo, g_lo) + 1) / self.size
