"""Jump-size truncation schemes: shells and per-level threshold processes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidScheme
from .regions import Region


@dataclass(frozen=True)
class TruncationScheme:
    """Shells (eps_{k+1}, eps_k], k = 0..K-1, with eps strictly decreasing.

    ``f_levels``/``g_levels`` are optional per-level positive thresholds
    (defaults: the symmetric eps levels), nonincreasing in the level index.
    """

    eps: tuple[float, ...]
    kind: str = "dyadic"
    f_levels: Optional[tuple[float, ...]] = None
    g_levels: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        e = np.asarray(self.eps, dtype=float)
        if e.ndim != 1 or len(e) < 2:
            raise InvalidScheme("need at least one shell")
        if np.any(e <= 0) or np.any(np.diff(e) >= 0):
            raise InvalidScheme("shell boundaries must be strictly decreasing and positive")
        for name, levels in (("f", self.f_levels), ("g", self.g_levels)):
            if levels is None:
                continue
            lv = np.asarray(levels, dtype=float)
            if np.any(lv <= 0) or np.any(lv > self.eps[0]) or np.any(np.diff(lv) > 0):
                raise InvalidScheme(f"{name}-thresholds must be positive, nonincreasing, "
                                    f"and bounded by the top level")

    @property
    def n_shells(self) -> int:
        return len(self.eps) - 1

    def shell_region(self, k: int) -> Region:
        if not 0 <= k < self.n_shells:
            raise InvalidScheme(f"shell index {k} outside 0..{self.n_shells - 1}")
        return Region.abs_band(self.eps[k + 1], self.eps[k])

    def retained_region(self, n: Optional[int] = None) -> Region:
        """Jump sizes retained at level n: {|x| > eps_n} (large jumps included)."""
        n = self.n_shells if n is None else n
        if not 0 <= n <= self.n_shells:
            raise InvalidScheme(f"level {n} outside 0..{self.n_shells}")
        return Region.abs_band(self.eps[n], math.inf)

    def discarded_region(self, n: Optional[int] = None) -> Region:
        n = self.n_shells if n is None else n
        return Region.abs_band(0.0, self.eps[n])

    def shell_of(self, x) -> np.ndarray:
        """Shell index of each jump size (-1: larger than eps_0; n_shells: discarded)."""
        a = np.abs(np.asarray(x, dtype=float))
        e = np.asarray(self.eps)
        idx = np.searchsorted(-e, -a, side="left") - 1
        idx = np.where(a > e[0], -1, idx)
        idx = np.where(a <= e[-1], self.n_shells, idx)
        return idx.astype(int)

    @staticmethod
    def dyadic(n_shells: int, top: float = 1.0) -> "TruncationScheme":
        eps = tuple(top * 2.0 ** (-k) for k in range(n_shells + 1))
        return TruncationScheme(eps, kind="dyadic")

    @staticmethod
    def atom_aligned(x_of, n_shells: int, top: float = 1.0) -> "TruncationScheme":
        """One atom (pair) per shell: boundaries at geometric means of locations."""
        ks = np.arange(1, n_shells + 2, dtype=float)
        xs = np.asarray(x_of(ks), dtype=float)
        if np.any(np.diff(xs) >= 0):
            raise InvalidScheme("atom locations must be strictly decreasing")
        eps = [top]
        for k in range(n_shells):
            eps.append(math.sqrt(xs[k] * xs[k + 1]))
        return TruncationScheme(tuple(eps), kind="atom-aligned")
