"""Clock processes A_t: the time components of disintegrated compensators.

A clock integrates slice values against dA.  Three variants: absolutely
continuous (Lebesgue with a rate), purely atomic (fixed times, possibly
accumulating at a finite point), and the tan time change wrapping an inner
clock.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .errors import PureJumpError
from .series import ExtReal, sum_blocks, sum_chunks, dyadic_ranges

HALF_PI = math.pi / 2.0


class Clock:
    has_atoms = False
    is_atomic = False

    def integrate_abs(self, h: Callable[[float], float], t0: float, t1: float,
                      *, singular=(), h_vec=None, description="") -> ExtReal:
        """Integral of a nonnegative slice value h against dA over (t0, t1]."""
        raise NotImplementedError

    def integrate_signed(self, h: Callable[[float], float], t0: float, t1: float) -> float:
        """Signed integral for finite integrands (drift-curve construction)."""
        raise NotImplementedError

    def cumulative(self, t: float) -> ExtReal:
        return self.integrate_abs(lambda s: 1.0, 0.0, t, h_vec=lambda n, s: np.ones_like(s))


class LebesgueClock(Clock):
    """dA = rate(t) dt; rate is a nonnegative (vectorized) function of time."""

    def __init__(self, rate=1.0, breaks: tuple[float, ...] = (), rate_repr: str = ""):
        if callable(rate):
            self.rate = rate
            self.constant_rate = None
        else:
            r = float(rate)
            if r < 0:
                raise PureJumpError("clock rate must be nonnegative")
            self.rate = lambda t: np.full_like(np.asarray(t, dtype=float), r)
            self.constant_rate = r
        self.breaks = tuple(sorted(breaks))
        self.rate_repr = rate_repr

    def _subintervals(self, t0, t1, singular):
        pts = {t0, t1}
        pts.update(b for b in self.breaks if t0 < b < t1)
        pts.update(s for s in singular if t0 <= s <= t1)
        return sorted(pts)

    def _quad(self, f, a, b):
        if b <= a:
            return 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            val, _ = quad(f, a, b, limit=200, epsabs=1e-13, epsrel=1e-11)
        return val

    def integrate_abs(self, h, t0, t1, *, singular=(), h_vec=None, description=""):
        if t1 <= t0:
            return ExtReal.finite(0.0)

        def g(t):
            return h(t) * float(self.rate(t))

        if math.isinf(t1):
            # dyadic blocks out to infinity from max(t0, 1)
            base = max(t0, 1.0)
            head = self.integrate_abs(h, t0, base, singular=singular,
                                      description=description) if base > t0 else ExtReal.finite(0.0)
            if head.is_infinite:
                return head

            def blocks():
                j = 0
                while True:
                    a, b = base * 2.0 ** j, base * 2.0 ** (j + 1)
                    yield self._quad(g, a, b)
                    j += 1

            return head + sum_blocks(blocks(), description=description or "tail integral")

        pts = self._subintervals(t0, t1, singular)
        total = ExtReal.finite(0.0)
        for a, b in zip(pts, pts[1:]):
            probes = np.linspace(a, b, 9)[1:-1]
            vals = np.array([g(float(s)) for s in probes])
            if np.sum(~np.isfinite(vals)) >= 2:
                from .series import DivergenceCertificate
                cert = DivergenceCertificate(
                    "window-bounded-below", 0, math.inf, math.inf, 0,
                    description or "slice value infinite on an interval")
                return ExtReal.infinite(cert)
            sing_left = not np.isfinite(g(a + (b - a) * 1e-9)) or a in singular
            sing_right = not np.isfinite(g(b - (b - a) * 1e-9)) or b in singular
            if not sing_left and not sing_right:
                val = self._quad(g, a, b)
                if math.isfinite(val):
                    total = total + ExtReal.finite(val)
                    continue
                # undetected endpoint blow-up: certify from both ends
                sing_left = sing_right = True
            if sing_left and sing_right:
                mid = 0.5 * (a + b)
                total = (total
                         + self._dyadic_toward(g, mid, a, description)
                         + self._dyadic_toward(g, mid, b, description))
            elif sing_left:
                total = total + self._dyadic_toward(g, b, a, description)
            else:
                total = total + self._dyadic_toward(g, a, b, description)
            if total.is_infinite:
                return total
        return total

    def _dyadic_toward(self, g, start, target, description):
        """Integrate from start toward a singular endpoint with dyadic blocks."""
        span = target - start

        def blocks():
            j = 0
            while True:
                a = target - span * 2.0 ** (-j)
                b = target - span * 2.0 ** (-j - 1)
                lo, hi = (a, b) if a <= b else (b, a)
                yield self._quad(g, lo, hi)
                j += 1

        return sum_blocks(blocks(), description=description or "endpoint singularity")

    def integrate_signed(self, h, t0, t1):
        if t1 <= t0:
            return 0.0
        pts = self._subintervals(t0, t1, ())
        return sum(self._quad(lambda t: h(t) * float(self.rate(t)), a, b)
                   for a, b in zip(pts, pts[1:]))

    def cumulative_grid(self, grid: np.ndarray, h=None) -> np.ndarray:
        """Cumulative integral of h(t) dA at the grid nodes (exact per cell)."""
        if h is None:
            h = lambda t: 1.0
        cells = [self.integrate_signed(h, a, b) for a, b in zip(grid, grid[1:])]
        return np.concatenate([[0.0], np.cumsum(cells)])

    def sample_event_times(self, cumulative_grid_t: np.ndarray,
                           cumulative_grid_v: np.ndarray,
                           rng: np.random.Generator) -> np.ndarray:
        """Inhomogeneous Poisson event times by inverse-transform on a grid."""
        lam = cumulative_grid_v[-1]
        if lam <= 0:
            return np.empty(0)
        n = rng.poisson(lam)
        if n == 0:
            return np.empty(0)
        u = np.sort(rng.random(n)) * lam
        times = np.interp(u, cumulative_grid_v, cumulative_grid_t)
        return times


class FixedTimesClock(Clock):
    """Purely atomic clock: atoms (t_n, w_n) indexed by n = 1, 2, ...

    ``times_of`` / ``weights_of`` are vectorized in n; ``count`` is None for
    an infinite family.  The time order along the enumeration is declared
    ('increasing' times accumulate from below at ``accumulation``;
    'decreasing' times accumulate at it from above).
    """

    has_atoms = True
    is_atomic = True

    def __init__(self, times_of, weights_of, count: Optional[int] = None,
                 time_order: str = "increasing",
                 accumulation: Optional[float] = None, label: str = "fixed-times"):
        self.times_of = times_of
        self.weights_of = weights_of
        self.count = count
        if time_order not in ("increasing", "decreasing"):
            raise PureJumpError("time_order must be 'increasing' or 'decreasing'")
        self.time_order = time_order
        self.accumulation = accumulation
        self.label = label
        if count is None and accumulation is None:
            raise PureJumpError("an infinite fixed-time family must declare its "
                                "accumulation point")

    @staticmethod
    def from_lists(times, weights, label="fixed-times"):
        times = np.asarray(times, dtype=float)
        weights = np.asarray(weights, dtype=float)
        order = np.argsort(times)
        times, weights = times[order], weights[order]

        def times_of(n):
            return times[np.asarray(n, dtype=int) - 1]

        def weights_of(n):
            return weights[np.asarray(n, dtype=int) - 1]

        return FixedTimesClock(times_of, weights_of, count=len(times),
                               time_order="increasing", label=label)

    def _n_range(self, t0, t1):
        """Index range (lo, hi) (hi None = unbounded) with t_n in (t0, t1]."""
        increasing = self.time_order == "increasing"

        def t_of(n):
            return float(self.times_of(np.array([n], dtype=float))[0])

        def search_first(pred):
            # smallest n >= 1 with pred(n) true; None if never within count
            n, step = 1, 1
            cap = self.count if self.count is not None else 1 << 62
            if pred(1):
                return 1
            while True:
                nxt = min(n + step, cap + 1)
                if nxt > cap:
                    if not pred(cap):
                        return None
                    nxt = cap
                if pred(nxt):
                    lo, hi = n, nxt
                    while lo + 1 < hi:
                        mid = (lo + hi) // 2
                        if pred(mid):
                            hi = mid
                        else:
                            lo = mid
                    return hi
                if nxt == cap:
                    return None
                n, step = nxt, step * 2

        if increasing:
            lo = search_first(lambda n: t_of(n) > t0)
            if lo is None:
                return 1, 0
            acc = self.accumulation if self.accumulation is not None else math.inf
            if t1 >= acc and self.count is None:
                return lo, None
            hi = search_first(lambda n: t_of(n) > t1)
            hi = (self.count if hi is None else hi - 1)
            return lo, (hi if hi is not None else None)
        else:
            lo = search_first(lambda n: t_of(n) <= t1)
            if lo is None:
                return 1, 0
            acc = self.accumulation if self.accumulation is not None else -math.inf
            if t0 < acc or (t0 <= 0.0 and acc == 0.0):
                hi = self.count
            else:
                hi = search_first(lambda n: t_of(n) <= t0)
                hi = (self.count if hi is None else hi - 1)
            return lo, hi

    def integrate_abs(self, h, t0, t1, *, singular=(), h_vec=None, description=""):
        lo, hi = self._n_range(t0, t1)
        if hi is not None and hi < lo:
            return ExtReal.finite(0.0)
        if h_vec is None:
            def h_vec(ns, ts):
                return np.array([h(float(t)) for t in ts])

        def chunk(ns):
            ts = self.times_of(ns)
            return self.weights_of(ns) * h_vec(ns, ts)

        if hi is not None:
            ns = np.arange(lo, hi + 1, dtype=float)
            vals = chunk(ns)
            if np.any(~np.isfinite(vals)):
                from .series import DivergenceCertificate
                cert = DivergenceCertificate(
                    "window-bounded-below", 0, math.inf, math.inf, 0,
                    description or f"{self.label}: infinite slice value at an atom")
                return ExtReal.infinite(cert)
            return ExtReal.finite(float(np.sum(vals)))

        def chunks():
            for a, b in dyadic_ranges(start=lo):
                yield chunk(np.arange(a, b + 1, dtype=float))

        return sum_chunks(chunks(), description=description or self.label)

    def integrate_signed(self, h, t0, t1):
        lo, hi = self._n_range(t0, t1)
        if hi is None:
            raise PureJumpError("signed atomic integral over an infinite family; "
                                "integrate the two signs separately")
        if hi < lo:
            return 0.0
        ns = np.arange(lo, hi + 1, dtype=float)
        ts = self.times_of(ns)
        return float(np.sum(self.weights_of(ns) * np.array([h(float(t)) for t in ts])))

    def materialize(self, t0, t1, n_cap: int):
        """Atoms with times in (t0, t1], truncated at n_cap; time-sorted.

        Returns (indices, times, weights, truncated_flag).
        """
        lo, hi = self._n_range(t0, t1)
        truncated = False
        if hi is None or hi - lo + 1 > n_cap:
            hi = lo + n_cap - 1
            truncated = True
            if self.count is not None:
                hi = min(hi, self.count)
        if hi < lo:
            return np.empty(0, dtype=int), np.empty(0), np.empty(0), truncated
        ns = np.arange(lo, hi + 1)
        ts = self.times_of(ns.astype(float))
        ws = self.weights_of(ns.astype(float))
        order = np.argsort(ts, kind="stable")
        return ns[order], ts[order], ws[order], truncated


class TanChangeClock(Clock):
    """A_t = A_inner(tan(t ^ pi/2)): compresses the inner half line into [0, pi/2)."""

    def __init__(self, inner: Clock):
        self.inner = inner
        self.has_atoms = inner.has_atoms
        self.is_atomic = inner.is_atomic

    def to_inner(self, t):
        t = np.minimum(np.asarray(t, dtype=float), HALF_PI)
        with np.errstate(over="ignore"):
            return np.where(t >= HALF_PI, math.inf, np.tan(t))

    def from_inner(self, s):
        return np.arctan(np.asarray(s, dtype=float))

    def integrate_abs(self, h, t0, t1, *, singular=(), h_vec=None, description=""):
        s0 = float(self.to_inner(t0))
        s1 = float(self.to_inner(min(t1, HALF_PI)))

        def h_inner(s):
            return h(float(self.from_inner(s)))

        hv = None
        if h_vec is not None:
            def hv(ns, ss):
                return h_vec(ns, self.from_inner(ss))

        inner_sing = tuple(float(self.to_inner(s)) for s in singular if s < HALF_PI)
        return self.inner.integrate_abs(h_inner, s0, s1, singular=inner_sing,
                                        h_vec=hv, description=description)

    def integrate_signed(self, h, t0, t1):
        s0 = float(self.to_inner(t0))
        s1 = float(self.to_inner(min(t1, HALF_PI)))
        if math.isinf(s1):
            raise PureJumpError("signed tan-change integral up to the horizon "
                                "pi/2 must be certified via integrate_abs")
        return self.inner.integrate_signed(lambda s: h(float(self.from_inner(s))), s0, s1)
