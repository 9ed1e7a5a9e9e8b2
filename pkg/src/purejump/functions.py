"""Closed-form predictable functions of (t, x) and of t.

The jump-integrand vocabulary is finite sums of monomials
``coef * |x|^power * sign(x)^odd * 1_band(x) * 1_window(t)``; it is closed
under the operations the integral calculus needs: products with
piecewise-constant time integrands, small/large truncation by the
integrand's own magnitude, and composition with power maps acting on jump
sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .errors import PureJumpError
from .regions import Region


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant, left-evaluated time function: value v_i on (b_i, b_{i+1}].

    Left evaluation makes step integrands predictable: at a breakpoint the
    pre-jump value applies.
    """

    breaks: tuple[float, ...]       # ascending, b_0 is the left end of the support
    values: tuple[float, ...]       # one per interval (b_i, b_{i+1}]; len = len(breaks)

    def __post_init__(self):
        if len(self.values) != len(self.breaks):
            raise PureJumpError("need one value per interval (last one extends to +inf)")
        if any(b >= c for b, c in zip(self.breaks, self.breaks[1:])):
            raise PureJumpError("breakpoints must be strictly increasing")

    @staticmethod
    def constant(v: float) -> "StepFunction":
        return StepFunction((0.0,), (float(v),))

    @staticmethod
    def indicator(a: float, b: float) -> "StepFunction":
        """1 on (a, b], 0 elsewhere."""
        return StepFunction((0.0, a, b), (0.0, 1.0, 0.0)) if a > 0.0 else \
            StepFunction((0.0, b), (1.0, 0.0))

    @staticmethod
    def dyadic_alternating(t1: float, depth: int = 4) -> "StepFunction":
        """Signs alternating across the dyadic partition of (0, t1] at the given depth."""
        n = 1 << depth
        breaks = tuple(t1 * i / n for i in range(n))
        values = tuple(1.0 if i % 2 == 0 else -1.0 for i in range(n))
        return StepFunction(breaks, values)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(np.asarray(self.breaks), t, side="left") - 1
        idx = np.clip(idx, 0, len(self.values) - 1)
        return np.asarray(self.values)[idx]

    def bound(self) -> float:
        return max(abs(v) for v in self.values)

    def scaled(self, c: float) -> "StepFunction":
        return StepFunction(self.breaks, tuple(c * v for v in self.values))

    def segments(self, t0: float, t1: float):
        """Yield (a, b, value) covering (t0, t1]."""
        pts = [t0] + [b for b in self.breaks if t0 < b < t1] + [t1]
        for a, b in zip(pts, pts[1:]):
            yield a, b, float(self((a + b) / 2.0))


@dataclass(frozen=True)
class Monomial:
    """coef * |x|^power * sign(x)^odd restricted to a band and a time window."""

    coef: float = 1.0
    power: float = 1.0
    odd: bool = False
    band: Optional[Region] = None
    window: Optional[tuple[float, float]] = None    # (t0, t1], None = all times

    def in_window(self, t):
        if self.window is None:
            return np.ones_like(np.asarray(t, dtype=float), dtype=bool)
        t = np.asarray(t, dtype=float)
        return (t > self.window[0]) & (t <= self.window[1])

    def __call__(self, t, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = self.coef * np.abs(x) ** self.power
        if self.odd:
            v = v * np.sign(x)
        if self.band is not None:
            v = np.where(self.band.contains(x), v, 0.0)
        v = np.where(x == 0.0, 0.0, v)
        w = self.in_window(t)
        return np.where(w, v, 0.0)

    def magnitude_band(self, cut: float, within: bool) -> Optional[Region]:
        """The x-set where |monomial| <= cut (within) or > cut (not within)."""
        c = abs(self.coef)
        if c == 0.0:
            return Region.all_jumps() if within else Region.empty()
        if self.power == 0.0:
            inside = c <= cut
            keep = inside if within else not inside
            return Region.all_jumps() if keep else Region.empty()
        level = (cut / c) ** (1.0 / self.power)
        if self.power > 0.0:
            return Region.abs_band(0.0, level) if within else Region.abs_band(level, math.inf)
        return Region.abs_band(level, math.inf) if within else Region.abs_band(0.0, level)

    def _intersect_band(self, other: Optional[Region]) -> Optional[Region]:
        if other is None:
            return self.band
        if self.band is None:
            return other
        out = []
        for b in self.band.bands:
            r = other.intersect_abs(b.lo, b.hi).restrict_side(b.side)
            out.extend(r.bands)
        return Region(tuple(out))


class JumpFunction:
    """A finite sum of monomials with pairwise-disjoint supports."""

    def __init__(self, monomials: Sequence[Monomial], name: str = ""):
        self.monomials = list(monomials)
        self.name = name

    # -- constructors --------------------------------------------------------

    @staticmethod
    def identity() -> "JumpFunction":
        return JumpFunction([Monomial(1.0, 1.0, True)], name="x")

    @staticmethod
    def power(p: float, odd: bool = False, coef: float = 1.0) -> "JumpFunction":
        name = f"{coef:g}*" if coef != 1.0 else ""
        name += ("sign(x)*" if odd and p != 1.0 else "")
        name += ("x" if (odd and p == 1.0) else f"|x|^{p:g}")
        return JumpFunction([Monomial(coef, p, odd)], name=name)

    @staticmethod
    def square() -> "JumpFunction":
        return JumpFunction([Monomial(1.0, 2.0, False)], name="x^2")

    @staticmethod
    def zero() -> "JumpFunction":
        return JumpFunction([], name="0")

    @staticmethod
    def banded(region: Region, coef: float = 1.0, p: float = 1.0,
               odd: bool = True) -> "JumpFunction":
        return JumpFunction([Monomial(coef, p, odd, band=region)],
                            name=f"band{region}")

    # -- evaluation -----------------------------------------------------------

    def __call__(self, t, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(np.broadcast(np.asarray(t, dtype=float), x).shape)
        for m in self.monomials:
            out = out + m(t, x)
        return out

    def is_zero(self) -> bool:
        return all(m.coef == 0.0 for m in self.monomials)

    # -- algebra --------------------------------------------------------------

    def scaled(self, c: float) -> "JumpFunction":
        return JumpFunction([replace(m, coef=c * m.coef) for m in self.monomials],
                            name=f"{c:g}*({self.name})")

    def restricted(self, region: Region) -> "JumpFunction":
        out = []
        for m in self.monomials:
            band = m._intersect_band(region)
            out.append(replace(m, band=band))
        return JumpFunction(out, name=f"{self.name}|{region}")

    def windowed(self, t0: float, t1: float) -> "JumpFunction":
        out = []
        for m in self.monomials:
            if m.window is not None:
                a, b = max(m.window[0], t0), min(m.window[1], t1)
                if a >= b:
                    continue
                out.append(replace(m, window=(a, b)))
            else:
                out.append(replace(m, window=(t0, t1)))
        return JumpFunction(out, name=f"{self.name}|({t0:g},{t1:g}]")

    def truncate(self, cut: float = 1.0, small: bool = True) -> "JumpFunction":
        """eta * 1_{|eta| <= cut} (small) or eta * 1_{|eta| > cut}."""
        out = []
        for m in self.monomials:
            mag = m.magnitude_band(cut, within=small)
            if mag is None or not mag.bands:
                continue
            band = m._intersect_band(mag)
            if band is not None and not band.bands:
                continue
            out.append(replace(m, band=band))
        tag = "<=" if small else ">"
        return JumpFunction(out, name=f"{self.name}*1(|.|{tag}{cut:g})")

    def times_step(self, zeta: StepFunction, t0: float, t1: float) -> "JumpFunction":
        """(zeta eta)(t, x) over (t0, t1] as a sum of windowed monomials."""
        out = []
        for a, b, v in zeta.segments(t0, t1):
            if v == 0.0:
                continue
            for m in self.windowed(a, b).monomials:
                out.append(replace(m, coef=v * m.coef))
        return JumpFunction(out, name=f"zeta*({self.name})")

    def compose_power(self, psi: "JumpFunction") -> "JumpFunction":
        """psi(eta) for single-monomial psi acting on jump sizes.

        psi must vanish at 0 (positive power), so psi(eta) vanishes off the
        support of eta.
        """
        if len(psi.monomials) != 1:
            raise PureJumpError("composition implemented for single-power maps")
        pm = psi.monomials[0]
        if pm.power <= 0.0:
            raise PureJumpError("a jump-size map must vanish at 0 (positive power)")
        out = []
        for m in self.monomials:
            if m.coef == 0.0:
                continue
            c_abs = abs(m.coef) ** pm.power
            sign_c = math.copysign(1.0, m.coef)
            coef = pm.coef * c_abs * (sign_c if pm.odd else 1.0)
            odd = pm.odd and m.odd
            band = m.band
            if pm.band is not None:
                # pull the psi-band back through |eta| = |coef| |x|^power
                pulled = []
                for b in pm.band.bands:
                    if m.power == 0.0:
                        continue
                    lo = (b.lo / abs(m.coef)) ** (1.0 / m.power) if b.lo > 0 else 0.0
                    hi = (b.hi / abs(m.coef)) ** (1.0 / m.power) if math.isfinite(b.hi) else math.inf
                    pulled.append(Region.abs_band(lo, hi))
                merged = Region(tuple(bb for r in pulled for bb in r.bands))
                band = m._intersect_band(merged) if merged.bands else Region.empty()
            out.append(Monomial(coef, pm.power * m.power, odd, band, m.window))
        return JumpFunction(out, name=f"psi({self.name})")


# -- slice/time integrals of jump functions against a compensator ------------

def slice_abs_integral(jf: JumpFunction, comp, t: float):
    """int |eta_t(x)| F_t(dx) as an ExtReal."""
    from .series import ExtReal
    total = ExtReal.finite(0.0)
    for m in jf.monomials:
        if not bool(m.in_window(t)):
            continue
        region = m.band if m.band is not None else Region.all_jumps()
        total = total + comp.partial_moment(m.power, region, t).scaled(abs(m.coef))
    return total


def slice_signed_integral(jf: JumpFunction, comp, t: float):
    """int eta_t(x) F_t(dx): (value or None, absolutely-convergent flag)."""
    value = 0.0
    flag = "absolute"
    for m in jf.monomials:
        if not bool(m.in_window(t)):
            continue
        region = m.band if m.band is not None else Region.all_jumps()
        if m.odd:
            s = comp_signed_power(comp, m.power, region, t)
            if s.flag == "divergent":
                return None, "divergent"
            if s.flag == "conditional":
                flag = "conditional"
            value += m.coef * s.value
        else:
            v = comp.partial_moment(m.power, region, t)
            if v.is_infinite:
                return None, "divergent"
            value += m.coef * v.value
    return value, flag


def comp_signed_power(comp, p, region, t):
    from .kernels import SignedIntegral
    from .series import ExtReal
    results = []
    for c in comp.components:
        idx = comp._atom_index_at(c, t)
        if c.atomic and idx is None:
            continue
        results.append(c.kernel.signed_power(p, region, t, index=idx))
    if not results:
        return SignedIntegral(0.0, "absolute", ExtReal.finite(0.0))
    abs_total = ExtReal.finite(0.0)
    for r in results:
        abs_total = abs_total + r.abs_value
    if all(r.flag == "absolute" for r in results):
        return SignedIntegral(sum(r.value for r in results), "absolute", abs_total)
    if all(r.flag in ("absolute", "conditional") for r in results):
        return SignedIntegral(sum(r.value for r in results), "conditional", abs_total)
    return SignedIntegral(None, "divergent", abs_total)


def time_abs_integral(jf: JumpFunction, comp, t1: Optional[float] = None):
    """int_0^t1 (int |eta_t(x)| F_t(dx)) dA_t as an ExtReal."""
    from .series import ExtReal
    t1 = comp.horizon if t1 is None else t1
    total = ExtReal.finite(0.0)
    for m in jf.monomials:
        w0, w1 = (0.0, t1) if m.window is None else (m.window[0], min(m.window[1], t1))
        if w1 <= w0:
            continue
        region = m.band if m.band is not None else Region.all_jumps()
        total = total + comp.time_moment(m.power, region, w1, t0=w0).scaled(abs(m.coef))
        if total.is_infinite:
            return total
    return total
