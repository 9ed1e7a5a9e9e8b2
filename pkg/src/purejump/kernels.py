"""Jump-size kernel families F_t(dx).

Each kernel answers partial-moment queries over regions, signed truncated
means, atom-limsup questions, and inverse-CDF sampling.  Closed forms are
the primary evaluation route; a quadrature/summation route backs the
dual-route consistency checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import EmptyRegion, InvalidRegion, PureJumpError, UnknownAsymptotics
from .regions import BOTH, NEG, POS, Band, Region
from .series import ExtReal, DivergenceCertificate, chunks_from_term, sum_blocks, sum_chunks


# --------------------------------------------------------------------------
# time-parametrized scalars (constant or affine in t)

@dataclass(frozen=True)
class TimeParam:
    """A scalar parameter, constant or affine in time: a + b*t."""

    a: float
    b: float = 0.0

    @staticmethod
    def make(value) -> "TimeParam":
        if isinstance(value, TimeParam):
            return value
        return TimeParam(float(value))

    def __call__(self, t):
        return self.a + self.b * np.asarray(t, dtype=float)

    @property
    def is_constant(self) -> bool:
        return self.b == 0.0

    def const_value(self) -> float:
        if not self.is_constant:
            raise ValueError("parameter is time-dependent")
        return self.a

    def __repr__(self):
        return f"{self.a:g}" if self.is_constant else f"{self.a:g}{self.b:+g}*t"


@dataclass
class SignedIntegral:
    """Result of a signed kernel integral: value + absolute-convergence flag."""

    value: Optional[float]
    flag: str                      # "absolute", "conditional", or "divergent"
    abs_value: ExtReal

    @property
    def absolutely_convergent(self) -> bool:
        return self.flag == "absolute"


def _band_sides(region: Region):
    for band in region.bands:
        for b in band.one_sided():
            yield b


class Kernel:
    """Base class; subclasses fill the hooks below."""

    has_atoms = False
    symmetric = False
    support_hi = math.inf

    def moment(self, p: float, region: Region, t: float, index=None) -> ExtReal:
        """Integral of |x|^p over the region against F_t (nonnegative)."""
        raise NotImplementedError

    def moment_quadrature(self, p: float, region: Region, t: float, index=None) -> ExtReal:
        """Second evaluation route (adaptive quadrature / generic summation)."""
        return self.moment(p, region, t, index)

    def signed_power(self, p: float, region: Region, t: float, index=None) -> SignedIntegral:
        """Integral of sign(x)|x|^p over the region against F_t."""
        pos = self.moment(p, region.restrict_side(POS), t, index)
        neg = self.moment(p, region.restrict_side(NEG), t, index)
        total_abs = pos + neg
        if not pos.is_infinite and not neg.is_infinite:
            return SignedIntegral(pos.value - neg.value, "absolute", total_abs)
        if pos.is_infinite and neg.is_infinite and self._region_symmetric(region):
            return SignedIntegral(0.0, "conditional", total_abs)
        return SignedIntegral(None, "divergent", total_abs)

    def _region_symmetric(self, region: Region) -> bool:
        if not self.symmetric:
            return False
        pos = sorted((b.lo, b.hi) for b in region.restrict_side(POS).bands)
        neg = sorted((b.lo, b.hi) for b in region.restrict_side(NEG).bands)
        return pos == neg

    def atom_xm_limsup(self, side: str, t: float, index=None) -> float:
        """limsup of |x| F_t({x}) as x -> 0 on the given side, decided analytically."""
        if not self.has_atoms:
            return 0.0
        raise UnknownAsymptotics(f"{type(self).__name__} does not declare atom asymptotics")

    def sample(self, region: Region, t: float, rng: np.random.Generator, size=None, index=None):
        raise NotImplementedError

    def singular_exponent(self, t: float) -> float:
        """Exponent alpha with F_t ~ |x|^(-1-alpha) near 0 (0 when mass bounded)."""
        return 0.0

    # classification metadata hooks
    pinned_drift: Optional[float] = None   # set on drift-pinning families


# --------------------------------------------------------------------------

@dataclass
class EmptyKernel(Kernel):
    """F_t = 0."""

    symmetric = True
    support_hi = 0.0

    def moment(self, p, region, t, index=None):
        return ExtReal.finite(0.0)

    def sample(self, region, t, rng, size=None, index=None):
        raise EmptyRegion("empty kernel carries no mass")


class PowerLawKernel(Kernel):
    """Density scale * |x|^(-1-alpha(t)) on 0 < |x| <= cutoff, one- or two-sided.

    alpha may be a constant or affine in t (the t-modulated family).
    """

    has_atoms = False

    def __init__(self, alpha, cutoff: float = 1.0, scale: float = 1.0, side: str = BOTH):
        self.alpha = TimeParam.make(alpha)
        if cutoff <= 0 or scale <= 0:
            raise PureJumpError("cutoff and scale must be positive")
        self.cutoff = float(cutoff)
        self.scale = float(scale)
        if side not in (POS, NEG, BOTH):
            raise PureJumpError(f"unknown side {side!r}")
        self.side = side
        self.symmetric = side == BOTH
        self.support_hi = self.cutoff

    def singular_exponent(self, t):
        return float(self.alpha(t))

    def _covers(self, band_side: str) -> bool:
        return self.side == BOTH or self.side == band_side

    def _primitive(self, q: float, a: float, b: float) -> float:
        # integral of x^(q-1) over (a, b], finite cases only
        if q == 0.0:
            return math.log(b / a)
        return (b ** q - a ** q) / q

    def _one_side_moment(self, p: float, a: float, b: float, t: float) -> ExtReal:
        b = min(b, self.cutoff)
        if b <= a:
            return ExtReal.finite(0.0)
        q = p - float(self.alpha(t))
        if a > 0.0:
            return ExtReal.finite(self.scale * self._primitive(q, a, b))
        if q > 0.0:
            return ExtReal.finite(self.scale * (b ** q) / q)
        # divergent at 0: certify over dyadic shells (b 2^-j-1, b 2^-j]
        def shells():
            j = 0
            while True:
                hi = b * 2.0 ** (-j)
                lo = hi / 2.0
                yield self.scale * self._primitive(q, lo, hi)
                j += 1
        return sum_blocks(shells(), description=f"power-law moment p={p}, alpha={self.alpha(t)}")

    def moment(self, p, region, t, index=None):
        total = ExtReal.finite(0.0)
        for b in _band_sides(region):
            if self._covers(b.side):
                total = total + self._one_side_moment(p, b.lo, b.hi, t)
        return total

    def moment_quadrature(self, p, region, t, index=None):
        alpha = float(self.alpha(t))
        total = ExtReal.finite(0.0)
        for b in _band_sides(region):
            if not self._covers(b.side):
                continue
            lo, hi = b.lo, min(b.hi, self.cutoff)
            if hi <= lo:
                continue
            q = p - alpha
            if lo == 0.0 and q <= 0.0:
                total = total + self._one_side_moment(p, lo, hi, t)
                continue
            if lo == 0.0:
                # remove the integrable singularity with u = x^q
                val = self.scale * quad(lambda u: 1.0 / q, 0.0, hi ** q, limit=200,
                                        epsabs=1e-13, epsrel=1e-11)[0]
            else:
                val = self.scale * quad(lambda x: x ** (p - 1.0 - alpha), lo, hi,
                                        limit=200, epsabs=1e-13, epsrel=1e-11)[0]
            total = total + ExtReal.finite(val)
        return total

    def atom_xm_limsup(self, side, t, index=None):
        return 0.0

    def sample(self, region, t, rng, size=None, index=None):
        alpha = float(self.alpha(t))
        q = -alpha
        sides = []
        for b in _band_sides(region):
            if not self._covers(b.side):
                continue
            lo, hi = b.lo, min(b.hi, self.cutoff)
            if hi <= lo:
                continue
            m = self._one_side_moment(0.0, lo, hi, t)
            if m.is_infinite:
                raise PureJumpError("sampling region has infinite mass")
            if m.value > 0:
                sides.append((b.side, lo, hi, m.value))
        if not sides:
            raise EmptyRegion("no kernel mass in region")
        weights = np.array([s[3] for s in sides])
        weights /= weights.sum()
        n = 1 if size is None else int(size)
        which = rng.choice(len(sides), size=n, p=weights)
        u = rng.random(n)
        out = np.empty(n)
        for i, (side, lo, hi, _) in enumerate(sides):
            sel = which == i
            if not np.any(sel):
                continue
            uu = u[sel]
            if q == 0.0:
                x = lo * (hi / lo) ** uu    # lo > 0 whenever the mass is finite
            else:
                alo = lo ** q if lo > 0 else (math.inf if q < 0 else 0.0)
                ahi = hi ** q
                x = (alo + uu * (ahi - alo)) ** (1.0 / q)
            out[sel] = x if side == POS else -x
        return out[0] if size is None else out


class AtomFamilyKernel(Kernel):
    """Countable atom family: atoms at +/- x(k) with mass m(k), k = 1, 2, ...

    ``log_x`` and ``log_m`` are vectorized closed forms (log of location and
    mass); locations are strictly decreasing to 0.  ``xm_limsup`` declares
    the analytic limsup of |x_k| m_k per side, required by the small-atom
    condition tests.
    """

    has_atoms = True

    def __init__(self, log_x: Callable[[np.ndarray], np.ndarray],
                 log_m: Callable[[np.ndarray], np.ndarray],
                 side: str = BOTH, k_max: Optional[int] = None,
                 xm_limsup: Optional[float] = None,
                 label: str = "atom-family",
                 pinned_drift: Optional[float] = None):
        self.log_x = log_x
        self.log_m = log_m
        self.side = side
        self.k_max = k_max
        self._xm_limsup = xm_limsup
        self.label = label
        self.symmetric = side == BOTH
        self.support_hi = float(np.exp(log_x(np.array([1.0]))[0]))
        self.pinned_drift = pinned_drift

    def x_of(self, k):
        return np.exp(self.log_x(np.asarray(k, dtype=float)))

    def m_of(self, k):
        return np.exp(self.log_m(np.asarray(k, dtype=float)))

    def _k_range(self, lo: float, hi: float):
        """Indices k with lo < x_k <= hi; (k_first, k_last) with k_last None = unbounded."""
        if hi <= 0:
            return 1, 0
        # x_of is strictly decreasing: find first k with x_k <= hi
        k = 1
        step = 1
        if self.x_of(1) > hi:
            while True:
                if self.k_max is not None and k > self.k_max:
                    return 1, 0
                if self.x_of(k) <= hi:
                    break
                k += step
                step = min(2 * step, 1 << 20)
            # binary search back
            lo_k = max(1, k - step)
            hi_k = k
            while lo_k < hi_k:
                mid = (lo_k + hi_k) // 2
                if self.x_of(mid) <= hi:
                    hi_k = mid
                else:
                    lo_k = mid + 1
            k = lo_k
        k_first = k
        if lo <= 0.0:
            k_last = self.k_max
            return k_first, k_last
        # last k with x_k > lo
        if self.x_of(k_first) <= lo:
            return 1, 0
        k = k_first
        step = 1
        while True:
            nxt = k + step
            if self.k_max is not None and nxt > self.k_max:
                k = self.k_max
                break
            xv = self.x_of(nxt)
            if xv <= lo or xv == 0.0 or not np.isfinite(xv):
                # binary search in (k, nxt]
                lo_k, hi_k = k, nxt
                while lo_k + 1 < hi_k:
                    mid = (lo_k + hi_k) // 2
                    xm = self.x_of(mid)
                    if xm > lo and np.isfinite(xm) and xm > 0.0:
                        lo_k = mid
                    else:
                        hi_k = mid
                k = lo_k
                break
            k = nxt
            step = min(2 * step, 1 << 20)
        return k_first, k

    def _side_factor(self, band_side: str) -> float:
        if self.side == BOTH or self.side == band_side:
            return 1.0
        return 0.0

    def moment(self, p, region, t, index=None):
        total = ExtReal.finite(0.0)
        for b in _band_sides(region):
            w = self._side_factor(b.side)
            if w == 0.0:
                continue
            k0, k1 = self._k_range(b.lo, b.hi)
            if k1 is not None and k1 < k0:
                continue

            def term(ks):
                with np.errstate(over="ignore"):
                    return w * np.exp(self.log_m(ks) + p * self.log_x(ks))

            if k1 is not None:
                # finitely many atoms: the sum is finite by definition
                ks = np.arange(k0, k1 + 1, dtype=float)
                total = total + ExtReal.finite(float(np.sum(term(ks))))
            else:
                total = total + sum_chunks(
                    chunks_from_term(term, start=k0),
                    description=f"{self.label} p={p}")
        return total

    def atom_xm_limsup(self, side, t, index=None):
        if self._xm_limsup is None:
            raise UnknownAsymptotics(f"{self.label} declares no x*m limsup")
        if self.side != BOTH and side != self.side:
            return 0.0
        return self._xm_limsup

    def sample(self, region, t, rng, size=None, index=None):
        xs, ms = [], []
        for b in _band_sides(region):
            w = self._side_factor(b.side)
            if w == 0.0:
                continue
            k0, k1 = self._k_range(b.lo, b.hi)
            if k1 is None:
                raise PureJumpError("sampling region must meet finitely many atoms "
                                    "or have certified-finite mass")
            if k1 < k0:
                continue
            ks = np.arange(k0, k1 + 1, dtype=float)
            x = self.x_of(ks)
            m = w * self.m_of(ks)
            sign = 1.0 if b.side == POS else -1.0
            xs.append(sign * x)
            ms.append(m)
        if not xs:
            raise EmptyRegion("no atoms in region")
        xs = np.concatenate(xs)
        ms = np.concatenate(ms)
        if ms.sum() <= 0:
            raise EmptyRegion("zero atom mass in region")
        probs = ms / ms.sum()
        n = 1 if size is None else int(size)
        out = rng.choice(xs, size=n, p=probs)
        return out[0] if size is None else out


class FiniteAtomsKernel(Kernel):
    """A fixed finite list of atoms (x_i, m_i), time-constant."""

    has_atoms = True

    def __init__(self, atoms: Sequence[tuple[float, float]]):
        for x, m in atoms:
            if x == 0.0:
                raise InvalidRegion("atom at 0 is not a jump")
            if m < 0.0:
                raise PureJumpError("atom masses must be nonnegative")
        self.atoms = [(float(x), float(m)) for x, m in atoms]
        self.support_hi = max((abs(x) for x, _ in self.atoms), default=0.0)
        pos = sorted((x, m) for x, m in self.atoms if x > 0)
        neg = sorted((-x, m) for x, m in self.atoms if x < 0)
        self.symmetric = pos == neg

    def moment(self, p, region, t, index=None):
        xs = np.array([x for x, _ in self.atoms]) if self.atoms else np.zeros(0)
        ms = np.array([m for _, m in self.atoms]) if self.atoms else np.zeros(0)
        if xs.size == 0:
            return ExtReal.finite(0.0)
        sel = region.contains(xs)
        return ExtReal.finite(float(np.sum(ms[sel] * np.abs(xs[sel]) ** p)))

    def atom_xm_limsup(self, side, t, index=None):
        return 0.0  # finitely many atoms: nothing accumulates at 0

    def sample(self, region, t, rng, size=None, index=None):
        xs = np.array([x for x, _ in self.atoms])
        ms = np.array([m for _, m in self.atoms])
        sel = region.contains(xs)
        xs, ms = xs[sel], ms[sel]
        if xs.size == 0 or ms.sum() <= 0:
            raise EmptyRegion("no atom mass in region")
        n = 1 if size is None else int(size)
        out = rng.choice(xs, size=n, p=ms / ms.sum())
        return out[0] if size is None else out


class SliceAtomsKernel(Kernel):
    """Per-clock-atom finite atom lists, addressed by the clock-atom index.

    ``slice_of(n)`` returns the list of (x, mass) for the n-th clock atom.
    Optional vectorized hooks serve the certified series walks over
    infinitely many clock atoms.
    """

    has_atoms = True

    def __init__(self, slice_of: Callable[[int], list[tuple[float, float]]],
                 vec_abs_moment: Optional[Callable[[float, Region, np.ndarray], np.ndarray]] = None,
                 vec_signed_mean: Optional[Callable[[Region, np.ndarray], np.ndarray]] = None,
                 vec_sample: Optional[Callable[[np.ndarray, np.random.Generator], np.ndarray]] = None,
                 symmetric: bool = False,
                 support_hi: float = math.inf,
                 label: str = "slice-atoms"):
        self.slice_of = slice_of
        self.vec_abs_moment = vec_abs_moment
        self.vec_signed_mean = vec_signed_mean
        self.vec_sample = vec_sample
        self.symmetric = symmetric
        self.support_hi = support_hi
        self.label = label

    def _need_index(self, index):
        if index is None:
            raise PureJumpError("slice-atom kernels are evaluated per clock atom "
                                "(index required)")
        return int(index)

    def moment(self, p, region, t, index=None):
        n = self._need_index(index)
        total = 0.0
        for x, m in self.slice_of(n):
            if region.contains(np.array(x)):
                total += m * abs(x) ** p
        return ExtReal.finite(total)

    def atom_xm_limsup(self, side, t, index=None):
        return 0.0  # each slice is a finite list

    def sample(self, region, t, rng, size=None, index=None):
        n = self._need_index(index)
        atoms = [(x, m) for x, m in self.slice_of(n) if region.contains(np.array(x))]
        if not atoms:
            raise EmptyRegion("no slice atom in region")
        xs = np.array([x for x, _ in atoms])
        ms = np.array([m for _, m in atoms])
        k = 1 if size is None else int(size)
        out = rng.choice(xs, size=k, p=ms / ms.sum())
        return out[0] if size is None else out

    def slice_total_mass(self, n: int) -> float:
        return sum(m for _, m in self.slice_of(n))


class MovingAtomKernel(Kernel):
    """A single atom whose location moves in time: F_t = mass(t) delta_loc(t).

    ``breaks`` lists the discontinuities of loc/mass (piecewise-constant
    families).
    """

    has_atoms = True

    def __init__(self, loc: Callable[[float], float], mass: Callable[[float], float],
                 breaks: Callable[[float, float], np.ndarray],
                 support_hi: float = math.inf, label: str = "moving-atom"):
        self.loc = loc
        self.mass = mass
        self.breaks = breaks
        self.support_hi = support_hi
        self.symmetric = False
        self.label = label

    def moment(self, p, region, t, index=None):
        x = self.loc(t)
        if region.contains(np.array(x)):
            return ExtReal.finite(self.mass(t) * abs(x) ** p)
        return ExtReal.finite(0.0)

    def atom_xm_limsup(self, side, t, index=None):
        return 0.0  # one atom per slice: nothing accumulates at 0 within a slice

    def sample(self, region, t, rng, size=None, index=None):
        x = self.loc(t)
        if not region.contains(np.array(x)):
            raise EmptyRegion("moving atom outside region")
        if size is None:
            return x
        return np.full(int(size), x)


class MixtureKernel(Kernel):
    """Nonnegative-weighted finite mixture of kernels."""

    def __init__(self, parts: Sequence[tuple[float, Kernel]]):
        if not parts:
            raise PureJumpError("mixture needs at least one part")
        for w, _ in parts:
            if w < 0:
                raise PureJumpError("mixture weights must be nonnegative")
        self.parts = [(float(w), k) for w, k in parts]
        self.has_atoms = any(k.has_atoms for _, k in self.parts)
        self.symmetric = all(k.symmetric for _, k in self.parts)
        self.support_hi = max(k.support_hi for _, k in self.parts)

    def moment(self, p, region, t, index=None):
        total = ExtReal.finite(0.0)
        for w, k in self.parts:
            if w > 0:
                total = total + k.moment(p, region, t, index).scaled(w)
        return total

    def moment_quadrature(self, p, region, t, index=None):
        total = ExtReal.finite(0.0)
        for w, k in self.parts:
            if w > 0:
                total = total + k.moment_quadrature(p, region, t, index).scaled(w)
        return total

    def signed_power(self, p, region, t, index=None):
        parts = [k.signed_power(p, region, t, index) for w, k in self.parts if w > 0]
        weights = [w for w, _ in self.parts if w > 0]
        abs_total = ExtReal.finite(0.0)
        for w, s in zip(weights, parts):
            abs_total = abs_total + s.abs_value.scaled(w)
        if all(s.flag == "absolute" for s in parts):
            return SignedIntegral(sum(w * s.value for w, s in zip(weights, parts)),
                                  "absolute", abs_total)
        if all(s.flag in ("absolute", "conditional") for s in parts):
            return SignedIntegral(sum(w * s.value for w, s in zip(weights, parts)),
                                  "conditional", abs_total)
        return SignedIntegral(None, "divergent", abs_total)

    def atom_xm_limsup(self, side, t, index=None):
        # atoms of distinct parts eventually separate; the mixture limsup is
        # the largest weighted part limsup
        vals = [w * k.atom_xm_limsup(side, t, index) for w, k in self.parts
                if w > 0 and k.has_atoms]
        return max(vals, default=0.0)

    def singular_exponent(self, t):
        return max(k.singular_exponent(t) for _, k in self.parts)

    def sample(self, region, t, rng, size=None, index=None):
        masses = []
        for w, k in self.parts:
            m = k.moment(0.0, region, t, index).scaled(w) if w > 0 else ExtReal.finite(0.0)
            if m.is_infinite:
                raise PureJumpError("sampling region has infinite mass")
            masses.append(m.value)
        tot = sum(masses)
        if tot <= 0:
            raise EmptyRegion("no mixture mass in region")
        probs = np.array(masses) / tot
        n = 1 if size is None else int(size)
        which = rng.choice(len(self.parts), size=n, p=probs)
        out = np.empty(n)
        for i, (_, k) in enumerate(self.parts):
            sel = which == i
            if np.any(sel):
                out[sel] = k.sample(region, t, rng, size=int(sel.sum()), index=index)
        return out[0] if size is None else out


# --------------------------------------------------------------------------
# shipped builtin families

def alpha_stable_kernel(alpha: float, cutoff: float = 1.0, scale: float = 1.0,
                        side: str = BOTH) -> PowerLawKernel:
    """Symmetric (or one-sided) stable-type kernel |x|^(-1-alpha) up to the cutoff."""
    if not 0.0 < alpha < 2.0:
        raise PureJumpError("stable exponent must lie in (0, 2)")
    return PowerLawKernel(alpha, cutoff=cutoff, scale=scale, side=side)


def t_modulated_kernel() -> PowerLawKernel:
    """Density |x|^(-2+t) on |x| < 1: exponent alpha(t) = 1 - t."""
    return PowerLawKernel(TimeParam(1.0, -1.0), cutoff=1.0, scale=1.0, side=BOTH)


def geometric_pinning_kernel(k_max: Optional[int] = None) -> AtomFamilyKernel:
    """Atoms at +/- 1/(k^2 3^k) with mass k^2 3^(2k): x_k m_k = 3^k grows.

    The achievable drift of any pure-jump process with this jump measure is
    pinned to zero, which the brute-force selection inequality certifies.
    """
    ln3 = math.log(3.0)

    def log_x(k):
        return -(2.0 * np.log(k) + k * ln3)

    def log_m(k):
        return 2.0 * np.log(k) + 2.0 * k * ln3

    return AtomFamilyKernel(log_x, log_m, side=BOTH, k_max=k_max,
                            xm_limsup=math.inf, label="geometric-pinning",
                            pinned_drift=0.0)
