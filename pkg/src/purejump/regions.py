"""Jump-size regions: unions of signed bands bounded away from 0.

A band is {x : sign condition, lo < |x| <= hi}; closure away from zero
matches the small-jump convention |x| <= 1 (inclusive) and the shell
convention (eps_{k+1}, eps_k].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InvalidRegion

POS, NEG, BOTH = "pos", "neg", "both"


@dataclass(frozen=True)
class Band:
    """One signed band {x : lo < |x| <= hi} on the given side(s)."""

    lo: float
    hi: float
    side: str = BOTH

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi):
            raise InvalidRegion(f"band bounds must satisfy 0 <= lo < hi, got ({self.lo}, {self.hi})")
        if self.side not in (POS, NEG, BOTH):
            raise InvalidRegion(f"unknown side {self.side!r}")

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        a = np.abs(x)
        inside = (a > self.lo) & (a <= self.hi)
        if self.side == POS:
            inside &= x > 0
        elif self.side == NEG:
            inside &= x < 0
        return inside

    def one_sided(self) -> "list[Band]":
        if self.side == BOTH:
            return [Band(self.lo, self.hi, POS), Band(self.lo, self.hi, NEG)]
        return [self]


@dataclass(frozen=True)
class Region:
    """A finite union of pairwise-disjoint bands."""

    bands: tuple[Band, ...]

    @staticmethod
    def of(bands: Iterable[Band]) -> "Region":
        return Region(tuple(bands))

    @staticmethod
    def empty() -> "Region":
        return Region(())

    @staticmethod
    def abs_band(lo: float, hi: float) -> "Region":
        """{x : lo < |x| <= hi}."""
        return Region((Band(lo, hi, BOTH),))

    @staticmethod
    def small_jumps(cut: float = 1.0) -> "Region":
        """{x : 0 < |x| <= cut}, the small-jump region (inclusive boundary)."""
        return Region((Band(0.0, cut, BOTH),))

    @staticmethod
    def large_jumps(cut: float = 1.0) -> "Region":
        return Region((Band(cut, math.inf, BOTH),))

    @staticmethod
    def all_jumps() -> "Region":
        return Region((Band(0.0, math.inf, BOTH),))

    @staticmethod
    def positive(lo: float, hi: float) -> "Region":
        """{x : lo < x <= hi} on the positive side."""
        return Region((Band(lo, hi, POS),))

    @staticmethod
    def negative(lo: float, hi: float) -> "Region":
        """{x : lo < |x| <= hi, x < 0}."""
        return Region((Band(lo, hi, NEG),))

    @staticmethod
    def two_sided(g: float, f: float, hi: float = 1.0) -> "Region":
        """{x in [-hi, -g] union [f, hi]}: asymmetric truncation thresholds."""
        bands = []
        if f < hi:
            bands.append(Band(f * (1 - 1e-15), hi, POS))
        if g < hi:
            bands.append(Band(g * (1 - 1e-15), hi, NEG))
        return Region(tuple(bands))

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.zeros(x.shape, dtype=bool)
        for b in self.bands:
            inside |= b.contains(x)
        return inside

    def is_empty(self) -> bool:
        return len(self.bands) == 0

    def intersect_abs(self, lo: float, hi: float) -> "Region":
        """Intersection with {lo < |x| <= hi}."""
        out = []
        for b in self.bands:
            a, c = max(b.lo, lo), min(b.hi, hi)
            if a < c:
                out.append(Band(a, c, b.side))
        return Region(tuple(out))

    def restrict_side(self, side: str) -> "Region":
        if side == BOTH:
            return self
        out = []
        for b in self.bands:
            if b.side == side or b.side == BOTH:
                out.append(Band(b.lo, b.hi, side))
        return Region(tuple(out))

    def bounded_by(self) -> float:
        return max((b.hi for b in self.bands), default=0.0)

    def __str__(self):
        if not self.bands:
            return "{}"
        parts = []
        for b in self.bands:
            mid = {POS: "x", NEG: "-x", BOTH: "|x|"}[b.side]
            parts.append(f"{{{b.lo:g} < {mid} <= {b.hi:g}}}")
        return " u ".join(parts)
