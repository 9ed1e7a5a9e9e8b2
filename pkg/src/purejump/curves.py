"""Cumulative finite-variation curves: drift fields of sample paths.

A Curve is a piecewise-linear continuous part (exact at its grid nodes)
plus finitely many atoms, optionally composed with a monotone time map
(the tan time change stores its curve in inner time and maps query times).
"""

from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np

from .errors import PureJumpError


class Curve:
    def __init__(self, grid, vals, atom_times=(), atom_sizes=(),
                 to_inner: Optional[Callable] = None,
                 from_inner: Optional[Callable] = None):
        self.grid = np.asarray(grid, dtype=float)
        self.vals = np.asarray(vals, dtype=float)
        if self.grid.ndim != 1 or self.grid.shape != self.vals.shape or len(self.grid) < 1:
            raise PureJumpError("curve grid/values mismatch")
        if np.any(np.diff(self.grid) <= 0):
            raise PureJumpError("curve grid must be strictly increasing")
        self.atom_times = np.asarray(atom_times, dtype=float)
        self.atom_sizes = np.asarray(atom_sizes, dtype=float)
        order = np.argsort(self.atom_times, kind="stable")
        self.atom_times = self.atom_times[order]
        self.atom_sizes = self.atom_sizes[order]
        self.to_inner = to_inner        # outer t -> inner s (atoms kept in outer time)
        self.from_inner = from_inner

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(T: float = 1.0) -> "Curve":
        return Curve([0.0, T], [0.0, 0.0])

    @staticmethod
    def linear(rate: float, T: float) -> "Curve":
        return Curve([0.0, T], [0.0, rate * T])

    @staticmethod
    def from_samples(grid, vals, **kw) -> "Curve":
        return Curve(grid, vals, **kw)

    @staticmethod
    def atoms_only(times, sizes, T: float) -> "Curve":
        return Curve([0.0, max(T, 1e-12)], [0.0, 0.0], times, sizes)

    # -- queries --------------------------------------------------------------

    def _cont(self, t):
        s = np.asarray(t, dtype=float)
        if self.to_inner is not None:
            s = self.to_inner(s)
        lo, hi = self.grid[0], self.grid[-1]
        s = np.clip(s, lo, hi)
        return np.interp(s, self.grid, self.vals)

    def __call__(self, t):
        out = self._cont(t) - self._cont(np.zeros_like(np.asarray(t, dtype=float)))
        if len(self.atom_times):
            t_arr = np.asarray(t, dtype=float)
            idx = np.searchsorted(self.atom_times, t_arr, side="right")
            cum = np.concatenate([[0.0], np.cumsum(self.atom_sizes)])
            out = out + cum[idx]
        return out

    def variation(self, t1: Optional[float] = None) -> float:
        """Total variation on [0, t1]."""
        g, v = self.grid, self.vals
        if t1 is not None:
            s1 = float(self.to_inner(t1)) if self.to_inner is not None else t1
            keep = g <= s1
            gg = np.concatenate([g[keep], [min(s1, g[-1])]]) if keep.any() else np.array([g[0]])
            vv = np.interp(gg, g, v)
        else:
            gg, vv = g, v
        tv = float(np.sum(np.abs(np.diff(vv))))
        if len(self.atom_times):
            sel = self.atom_times <= (t1 if t1 is not None else math.inf)
            tv += float(np.sum(np.abs(self.atom_sizes[sel])))
        return tv

    def breakpoints_outer(self) -> np.ndarray:
        g = self.grid
        if self.from_inner is not None:
            g = self.from_inner(g)
        return np.unique(np.concatenate([g, self.atom_times]))

    def integrate_left(self, zeta: Callable, t1: float) -> float:
        """int_0^t1 zeta(t-) dCurve(t) for zeta constant between breakpoints.

        The caller guarantees zeta is piecewise constant with breaks among
        the curve's outer breakpoints (use ``refine`` first otherwise);
        left evaluation makes the integrand predictable.
        """
        pts = self.breakpoints_outer()
        pts = pts[(pts > 0.0) & (pts < t1)]
        pts = np.unique(np.concatenate([[0.0], pts, [t1]]))
        vals_at = self(pts)
        cont = 0.0
        for a, b in zip(pts, pts[1:]):
            dv = float(self._cont(np.array(b)) - self._cont(np.array(a)))
            cont += float(zeta(0.5 * (a + b))) * dv
        atoms = 0.0
        if len(self.atom_times):
            sel = (self.atom_times > 0.0) & (self.atom_times <= t1)
            for tt, sz in zip(self.atom_times[sel], self.atom_sizes[sel]):
                atoms += float(zeta(tt)) * sz    # step zeta is left-evaluated at tt
        return cont + atoms

    def variation_blocks(self, zeta_abs: Callable, t1: float, refine: int = 0):
        """Blockwise int |zeta| |dCurve| contributions over the outer breakpoints."""
        pts = self.breakpoints_outer()
        pts = pts[(pts > 0.0) & (pts < t1)]
        pts = np.unique(np.concatenate([[0.0], pts, [t1]]))
        for a, b in zip(pts, pts[1:]):
            dv = abs(float(self._cont(np.array(b)) - self._cont(np.array(a))))
            yield float(zeta_abs(0.5 * (a + b))) * dv

    # -- arithmetic -----------------------------------------------------------

    def _merge_grid(self, other: "Curve"):
        if (self.to_inner is None) != (other.to_inner is None):
            raise PureJumpError("cannot merge curves on different time scales")
        return np.unique(np.concatenate([self.grid, other.grid]))

    def __add__(self, other: "Curve") -> "Curve":
        g = self._merge_grid(other)
        v = np.interp(g, self.grid, self.vals) + np.interp(g, other.grid, other.vals)
        at = np.concatenate([self.atom_times, other.atom_times])
        asz = np.concatenate([self.atom_sizes, other.atom_sizes])
        at, asz = _combine_atoms(at, asz)
        return Curve(g, v, at, asz, self.to_inner, self.from_inner)

    def __sub__(self, other: "Curve") -> "Curve":
        return self + other.scaled(-1.0)

    def scaled(self, c: float) -> "Curve":
        return Curve(self.grid, c * self.vals, self.atom_times, c * self.atom_sizes,
                     self.to_inner, self.from_inner)

    def atom_at(self, t: float) -> float:
        if not len(self.atom_times):
            return 0.0
        sel = np.isclose(self.atom_times, t, rtol=1e-12, atol=1e-15)
        return float(np.sum(self.atom_sizes[sel]))


def _combine_atoms(times, sizes):
    if not len(times):
        return times, sizes
    order = np.argsort(times, kind="stable")
    times, sizes = times[order], sizes[order]
    out_t, out_s = [], []
    for t, s in zip(times, sizes):
        if out_t and t == out_t[-1]:
            out_s[-1] += s
        else:
            out_t.append(t)
            out_s.append(s)
    return np.array(out_t), np.array(out_s)
