"""Compensator specifications nu(dt, dx) = F_t(dx) dA_t and their queries.

A CompensatorSpec is a finite list of (kernel, clock) components plus the
big-jump cut level and a horizon; a single law may superpose an absolutely
continuous component and fixed-time components.  All queries are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .clocks import Clock, FixedTimesClock, LebesgueClock, TanChangeClock
from .errors import EmptyRegion, PureJumpError
from .kernels import Kernel, SliceAtomsKernel, SignedIntegral, TimeParam, PowerLawKernel
from .regions import Region
from .series import ExtReal
from .schemes import TruncationScheme


@dataclass
class Component:
    kernel: Kernel
    clock: Clock
    stream_id: Optional[int] = None   # stable RNG-stream key, preserved by splits

    @property
    def atomic(self) -> bool:
        return self.clock.is_atomic


class CompensatorSpec:
    """The single source of truth for a pure-jump process law."""

    def __init__(self, components: Sequence[Component | tuple[Kernel, Clock]],
                 horizon: float, big_jump_cut: float = 1.0, label: str = "",
                 config: Optional[dict] = None, validate: bool = True):
        comps = []
        for c in components:
            comps.append(c if isinstance(c, Component) else Component(*c))
        if not comps:
            raise PureJumpError("a compensator needs at least one component")
        if horizon <= 0:
            raise PureJumpError("horizon must be positive")
        self.components = comps
        self.horizon = float(horizon)
        self.big_jump_cut = float(big_jump_cut)
        self.label = label
        self.config = config   # round-trip source, when loaded from a file
        for comp in comps:
            if isinstance(comp.kernel, SliceAtomsKernel) and not comp.atomic:
                raise PureJumpError("per-slice atom kernels require a fixed-time clock")
        if validate:
            self._check_validity()

    @staticmethod
    def single(kernel: Kernel, clock: Clock, horizon: float, **kw) -> "CompensatorSpec":
        return CompensatorSpec([Component(kernel, clock)], horizon, **kw)

    # -- validity ----------------------------------------------------------

    def _probe_times(self, comp: Component, n: int = 5):
        if comp.atomic:
            clock: FixedTimesClock = comp.clock  # type: ignore[assignment]
            ns, ts, _, _ = clock.materialize(0.0, self.horizon, n)
            return list(zip(ns.tolist(), ts.tolist()))
        return [(None, t) for t in np.linspace(0.0, self.horizon, n + 2)[1:-1]]

    def _check_validity(self):
        """The defining requirement: int (x^2 ^ 1) F_t(dx) < inf slice-wise."""
        cut = self.big_jump_cut
        for comp in self.components:
            for idx, t in self._probe_times(comp):
                small = comp.kernel.moment(2.0, Region.small_jumps(cut), t, index=idx)
                large = comp.kernel.moment(0.0, Region.large_jumps(cut), t, index=idx)
                if small.is_infinite or large.is_infinite:
                    cert = (small if small.is_infinite else large).certificate
                    raise PureJumpError(
                        "invalid kernel: int(x^2 ^ 1) F_t(dx) diverges at "
                        f"t={t:g} ({cert.describe()})")

    # -- slice queries (the kernel-module operations) -----------------------

    def _atom_index_at(self, comp: Component, t: float):
        if not comp.atomic:
            return None
        clock: FixedTimesClock = comp.clock  # type: ignore[assignment]
        ns, ts, _, _ = clock.materialize(t - 1e-12, t + 1e-12, 4)
        for n, tn in zip(ns, ts):
            if abs(tn - t) <= 1e-12 * max(1.0, abs(t)):
                return int(n)
        return None

    def partial_moment(self, p: float, region: Region, t: float) -> ExtReal:
        """int_region |x|^p F_t(dx), closed form first, Infinite with certificate."""
        if region.is_empty():
            return ExtReal.finite(0.0)
        total = ExtReal.finite(0.0)
        for comp in self.components:
            idx = self._atom_index_at(comp, t)
            if comp.atomic and idx is None:
                continue    # the slice at a non-atom time carries no clock mass
            total = total + comp.kernel.moment(p, region, t, index=idx)
        return total

    def partial_moment_quadrature(self, p: float, region: Region, t: float) -> ExtReal:
        if region.is_empty():
            return ExtReal.finite(0.0)
        total = ExtReal.finite(0.0)
        for comp in self.components:
            idx = self._atom_index_at(comp, t)
            if comp.atomic and idx is None:
                continue
            total = total + comp.kernel.moment_quadrature(p, region, t, index=idx)
        return total

    def signed_truncated_mean(self, region: Region, t: float) -> SignedIntegral:
        """int_region x F_t(dx) with its absolute-convergence flag."""
        results = []
        for comp in self.components:
            idx = self._atom_index_at(comp, t)
            if comp.atomic and idx is None:
                continue
            results.append(comp.kernel.signed_power(1.0, region, t, index=idx))
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

    def shell_mass(self, scheme: TruncationScheme, k: int, t: float) -> float:
        m = self.partial_moment(0.0, scheme.shell_region(k), t)
        if m.is_infinite:
            raise PureJumpError("shell mass infinite: kernel violates validity")
        return m.value

    def atom_limsup_vanishes(self, side: str, t: float) -> bool:
        """Whether limsup_{x->0, side} |x| F_t({x}) = 0, decided analytically."""
        limsup = 0.0
        for comp in self.components:
            idx = self._atom_index_at(comp, t)
            if comp.atomic and idx is None:
                continue
            limsup = max(limsup, comp.kernel.atom_xm_limsup(side, t, index=idx))
        return limsup == 0.0

    def sample_jump_size(self, region: Region, t: float, rng: np.random.Generator,
                         size=None):
        """Draw from F_t restricted to the region and normalized.

        Components are weighted by clock rate x regional slice mass at t.
        """
        weights = []
        for comp in self.components:
            idx = self._atom_index_at(comp, t)
            if comp.atomic:
                w = 0.0 if idx is None else 1.0
            else:
                w = float(comp.clock.rate(t)) if isinstance(comp.clock, LebesgueClock) else 1.0
            if w > 0.0:
                m = comp.kernel.moment(0.0, region, t, index=idx)
                if m.is_infinite:
                    raise PureJumpError("sampling region has infinite slice mass")
                w *= m.value
            weights.append(w)
        total = sum(weights)
        if total <= 0.0:
            raise EmptyRegion(f"region {region} carries no slice mass at t={t:g}")
        probs = np.array(weights) / total
        n = 1 if size is None else int(size)
        which = rng.choice(len(self.components), size=n, p=probs)
        out = np.empty(n)
        for i, comp in enumerate(self.components):
            sel = which == i
            if np.any(sel):
                idx = self._atom_index_at(comp, t)
                out[sel] = comp.kernel.sample(region, t, rng, size=int(sel.sum()), index=idx)
        return out[0] if size is None else out

    # -- clock integrals of slice values ------------------------------------

    def _divergence_boundaries(self, comp: Component, p: float, region: Region):
        """Times where the slice p-moment switches between finite and infinite."""
        k = comp.kernel
        if not isinstance(k, PowerLawKernel) or min((b.lo for b in region.bands), default=1.0) > 0.0:
            return ()
        a = k.alpha
        if a.is_constant or a.b == 0.0:
            return ()
        t_star = (p - a.a) / a.b
        return (t_star,) if 0.0 <= t_star else ()

    def time_moment(self, p: float, region: Region, t1: Optional[float] = None,
                    t0: float = 0.0, description: str = "") -> ExtReal:
        """int_{t0}^{t1} (int_region |x|^p F_t(dx)) dA_t with certification."""
        t1 = self.horizon if t1 is None else t1
        total = ExtReal.finite(0.0)
        for comp in self.components:
            h_vec = self._vector_slice_moment(comp, p, region)

            def h(t, comp=comp):
                return float(comp.kernel.moment(p, region, t))

            sing = self._divergence_boundaries(comp, p, region)
            total = total + comp.clock.integrate_abs(
                h, t0, t1, singular=sing, h_vec=h_vec,
                description=description or f"time integral of |x|^{p:g} moment")
            if total.is_infinite:
                return total
        return total

    def _vector_slice_moment(self, comp: Component, p: float, region: Region):
        kern = comp.kernel
        if isinstance(kern, SliceAtomsKernel):
            if kern.vec_abs_moment is not None:
                return lambda ns, ts: kern.vec_abs_moment(p, region, ns)
            return lambda ns, ts: np.array(
                [kern.moment(p, region, t, index=int(n)).value
                 for n, t in zip(ns, ts)])
        # time-independent kernels: constant slice value
        if isinstance(kern, PowerLawKernel) and not kern.alpha.is_constant:
            return None
        from .kernels import MovingAtomKernel
        if isinstance(kern, MovingAtomKernel):
            return None
        val = kern.moment(p, region, 0.0)
        if val.is_infinite:
            return None
        return lambda ns, ts: np.full(len(np.atleast_1d(ts)), val.value)

    def activity(self, t1: Optional[float] = None) -> ExtReal:
        """Expected jump count on (0, t1]: int F_t(R) dA_t."""
        return self.time_moment(0.0, Region.all_jumps(), t1,
                                description="total activity")

    def restricted(self, region: Region, label_suffix: str = "|band") -> "CompensatorSpec":
        """The compensator restricted to a jump-size region."""
        restricted = []
        for comp in self.components:
            restricted.append(Component(_RestrictedKernel(comp.kernel, region), comp.clock))
        return CompensatorSpec(restricted, self.horizon, self.big_jump_cut,
                               label=self.label + label_suffix, validate=False)


class _RestrictedKernel(Kernel):
    """A kernel multiplied by the indicator of a jump-size region."""

    def __init__(self, base: Kernel, region: Region):
        self.base = base
        self.region = region
        self.has_atoms = base.has_atoms
        self.symmetric = base.symmetric and base._region_symmetric(region)
        self.support_hi = min(base.support_hi, region.bounded_by())
        self.pinned_drift = base.pinned_drift

    def _cut(self, region: Region) -> Region:
        from .regions import Band
        out = []
        for b in region.bands:
            for rb in self.region.bands:
                lo, hi = max(b.lo, rb.lo), min(b.hi, rb.hi)
                if lo >= hi:
                    continue
                if rb.side == "both":
                    side = b.side
                elif b.side == "both" or b.side == rb.side:
                    side = rb.side
                else:
                    continue
                out.append(Band(lo, hi, side))
        return Region(tuple(out))

    def moment(self, p, region, t, index=None):
        return self.base.moment(p, self._cut(region), t, index)

    def moment_quadrature(self, p, region, t, index=None):
        return self.base.moment_quadrature(p, self._cut(region), t, index)

    def atom_xm_limsup(self, side, t, index=None):
        if min((b.lo for b in self.region.bands), default=0.0) > 0.0:
            return 0.0  # bounded away from zero: nothing accumulates
        return self.base.atom_xm_limsup(side, t, index)

    def sample(self, region, t, rng, size=None, index=None):
        return self.base.sample(self._cut(region), t, rng, size=size, index=index)

    def singular_exponent(self, t):
        if min((b.lo for b in self.region.bands), default=0.0) > 0.0:
            return 0.0
        return self.base.singular_exponent(t)
