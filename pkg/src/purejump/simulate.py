"""Sample-path generation by shell-truncated compensated jump sums.

Paths follow the canonical representation: large jumps exactly and
uncompensated, small jumps shell by shell as Poisson point processes
against the clock with the shell compensator folded into the drift field,
plus the declared drift.  Fixed-time clock atoms produce at most one jump
each, drawn from the slice kernel.

A path's drift field has two components: ``b`` (the declared small-jump
drift, the canonical drift of the truncated process) and ``c`` (the
retained-shell compensator), so the path value is
x0 + sum of jumps + b(t) - c(t) and the martingale part is
(jump sum) - c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .classify import DriftSpec
from .clocks import FixedTimesClock, LebesgueClock, TanChangeClock
from .compensator import CompensatorSpec, Component
from .curves import Curve
from .errors import PureJumpError, SchemeMismatch, ShellOverflow
from .kernels import SliceAtomsKernel
from .regions import POS, Region
from .schemes import TruncationScheme

SHELL_EVENT_BUDGET = 10_000_000
GRID_POINTS = 256


@dataclass
class SamplePath:
    """Event list plus drift field; càdlàg evaluation by construction."""

    x0: float
    times: np.ndarray
    jumps: np.ndarray
    b: Curve                  # declared drift of the small-jump part
    c: Curve                  # retained-shell compensator
    T: float
    meta: dict = field(default_factory=dict)

    def value(self, t):
        t_arr = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t_arr, side="right")
        cum = np.concatenate([[0.0], np.cumsum(self.jumps)])
        out = self.x0 + cum[idx] + self.b(t_arr) - self.c(t_arr)
        return out if t_arr.shape else float(out)

    def left_value(self, t):
        """Value at t-: pre-jump (and pre-drift-atom) evaluation."""
        t_arr = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t_arr, side="left")
        cum = np.concatenate([[0.0], np.cumsum(self.jumps)])
        out = self.x0 + cum[idx] + self.b(t_arr) - self.c(t_arr)
        if len(self.b.atom_times) or len(self.c.atom_times):
            adj = np.array([self.b.atom_at(tt) - self.c.atom_at(tt)
                            for tt in np.atleast_1d(t_arr)])
            out = out - adj.reshape(np.shape(out))
        return out if t_arr.shape else float(out)

    def visible_drift(self, t):
        return self.b(t) - self.c(t)

    def n_events(self) -> int:
        return len(self.times)

    def quadratic_variation(self, t: Optional[float] = None) -> float:
        sel = self.times <= (self.T if t is None else t)
        return float(np.sum(self.jumps[sel] ** 2))

    def grid(self, n: int = GRID_POINTS) -> np.ndarray:
        return np.linspace(0.0, self.T, n + 1)


@dataclass
class Ensemble:
    """Independently streamed paths, reproducible from (seed, spec, scheme)."""

    paths: list[SamplePath]
    seed: int
    T: float
    comp: Optional[CompensatorSpec] = None
    scheme: Optional[TruncationScheme] = None
    meta: dict = field(default_factory=dict)

    @property
    def n_paths(self) -> int:
        return len(self.paths)

    def coupling_key(self):
        return (self.seed, self.n_paths, self.meta.get("family", ""))


def _assign_stream_ids(comp: CompensatorSpec):
    for i, c in enumerate(comp.components):
        if not hasattr(c, "stream_id") or c.stream_id is None:
            c.stream_id = i


def _rng(seed, *key) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


class PathSampler:
    """Per-(comp, scheme, drift, horizon) precomputation shared across paths."""

    def __init__(self, comp: CompensatorSpec, scheme: TruncationScheme,
                 drift: DriftSpec, T: float, n_max_atoms: int = 100_000,
                 grid_n: int = 512):
        if T <= 0 or T > comp.horizon + 1e-12:
            raise PureJumpError(f"horizon {T} outside the spec horizon {comp.horizon}")
        if scheme.eps[0] > comp.big_jump_cut + 1e-12:
            raise SchemeMismatch("shells must start at or below the big-jump cut")
        _assign_stream_ids(comp)
        self.comp = comp
        self.scheme = scheme
        self.drift = drift
        self.T = float(T)
        self.n_max_atoms = n_max_atoms
        self.grid_n = grid_n
        self._prepare()

    # -- shared curves and intensities --------------------------------------

    def _prepare(self):
        comp, scheme, T = self.comp, self.scheme, self.T
        self.lebesgue: list[dict] = []
        self.atomic: list[dict] = []
        self.c_parts: list[tuple[int, Curve]] = []   # (shell level, curve)
        shell_c: dict[int, Curve] = {}

        for c in comp.components:
            if isinstance(c.clock, FixedTimesClock):
                self.atomic.append(self._prepare_atomic(c))
                for k in range(scheme.n_shells):
                    cur = self._atomic_comp_curve(c, scheme.shell_region(k))
                    if cur is not None:
                        shell_c[k] = shell_c.get(k, Curve.zero(T)) + cur
            else:
                entry = self._prepare_lebesgue(c)
                self.lebesgue.append(entry)
                for k, cur in entry["shell_comp_curves"].items():
                    shell_c[k] = shell_c.get(k, Curve.zero(T)) + cur

        self.c_parts = sorted(shell_c.items())
        self.c_total = Curve.zero(T)
        for _, cur in self.c_parts:
            self.c_total = self.c_total + cur
        self.b_curve = self._drift_curve()

    def _inner_clock(self, clock):
        if isinstance(clock, TanChangeClock):
            return clock.inner, clock
        return clock, None

    def _prepare_lebesgue(self, c: Component):
        comp, scheme, T = self.comp, self.scheme, self.T
        clock, wrapper = self._inner_clock(c.clock)
        if not isinstance(clock, LebesgueClock):
            raise PureJumpError("only Lebesgue and tan-changed Lebesgue clocks generate "
                                "continuous-time events")
        S = float(wrapper.to_inner(T)) if wrapper is not None else T
        if math.isinf(S):
            raise PureJumpError("simulation horizon must stay below the time-change "
                                "accumulation point")
        bands = [("shell", k, scheme.shell_region(k)) for k in range(scheme.n_shells)]
        if c.kernel.support_hi > comp.big_jump_cut:
            bands.append(("large", -1, Region.abs_band(comp.big_jump_cut,
                                                       c.kernel.support_hi)))
        grid = np.linspace(0.0, S, self.grid_n + 1)
        time_dep = self._time_dependent(c.kernel)
        entries = []
        shell_comp_curves: dict[int, Curve] = {}
        for tag, k, region in bands:
            def mass(t, region=region):
                m = c.kernel.moment(0.0, region, self._outer_time(wrapper, t))
                if m.is_infinite:
                    raise ShellOverflow("infinite mass in a retained band")
                return m.value

            if not time_dep and clock.constant_rate is not None and wrapper is None:
                lam = mass(0.0) * clock.constant_rate * grid
            else:
                lam = clock.cumulative_grid(grid, mass)
            if lam[-1] > SHELL_EVENT_BUDGET:
                raise ShellOverflow(
                    f"expected {lam[-1]:.3g} events in band {region}")
            entries.append({"tag": tag, "level": k, "region": region,
                            "grid": grid, "lam": lam})
            if tag == "shell" and not c.kernel.symmetric:
                cur = self._lebesgue_mean_curve(c, region, wrapper, grid)
                if cur is not None:
                    shell_comp_curves[k] = cur
        return {"component": c, "wrapper": wrapper, "clock": clock, "bands": entries,
                "shell_comp_curves": shell_comp_curves, "inner_T": S}

    @staticmethod
    def _time_dependent(kern) -> bool:
        from .kernels import MovingAtomKernel, PowerLawKernel
        if isinstance(kern, PowerLawKernel):
            return not kern.alpha.is_constant
        return isinstance(kern, MovingAtomKernel)

    def _outer_time(self, wrapper, s):
        if wrapper is None:
            return s
        return float(wrapper.from_inner(s))

    def _lebesgue_mean_curve(self, c: Component, region: Region, wrapper, grid):
        small_region = region.intersect_abs(0.0, self.comp.big_jump_cut)
        if not small_region.bands:
            return None

        def mean(s):
            t = self._outer_time(wrapper, s)
            sp = c.kernel.signed_power(1.0, small_region, t)
            if sp.value is None:
                raise PureJumpError("shell mean diverges: invalid shell")
            return sp.value

        clock, _ = self._inner_clock(c.clock)
        if not self._time_dependent(c.kernel) and clock.constant_rate is not None \
                and wrapper is None:
            vals = mean(0.0) * clock.constant_rate * grid
        else:
            vals = clock.cumulative_grid(grid, mean)
        if np.allclose(vals, 0.0, atol=1e-300):
            return None
        to_inner = wrapper.to_inner if wrapper is not None else None
        from_inner = wrapper.from_inner if wrapper is not None else None
        return Curve(grid, vals, to_inner=to_inner, from_inner=from_inner)

    def _prepare_atomic(self, c: Component):
        clock: FixedTimesClock = c.clock   # type: ignore[assignment]
        ns, ts, ws, truncated = clock.materialize(0.0, self.T, self.n_max_atoms)
        kern = c.kernel
        if isinstance(kern, SliceAtomsKernel) and kern.vec_abs_moment is not None:
            masses = kern.vec_abs_moment(0.0, Region.all_jumps(), ns.astype(float))
        else:
            masses = np.empty(len(ns))
            for i, n in enumerate(ns):
                if isinstance(kern, SliceAtomsKernel):
                    masses[i] = kern.slice_total_mass(int(n))
                else:
                    masses[i] = kern.moment(0.0, Region.all_jumps(), ts[i],
                                            index=int(n)).value
        probs = ws * masses
        if np.any(probs > 1.0 + 1e-9):
            raise PureJumpError("fixed-time slice mass exceeds one: slice kernels "
                                "must be probability sub-measures per clock atom")
        return {"component": c, "indices": ns, "times": ts, "weights": ws,
                "probs": np.minimum(probs, 1.0), "truncated": truncated}

    def _atomic_comp_curve(self, c: Component, region: Region) -> Optional[Curve]:
        if c.kernel.symmetric:
            return None
        entry = next(e for e in self.atomic if e["component"] is c)
        small_region = region.intersect_abs(0.0, self.comp.big_jump_cut)
        if not small_region.bands or not len(entry["indices"]):
            return None
        kern = c.kernel
        if isinstance(kern, SliceAtomsKernel) and kern.vec_signed_mean is not None:
            sizes = entry["weights"] * kern.vec_signed_mean(
                small_region, entry["indices"].astype(float))
        else:
            sizes = np.array([
                entry["weights"][i]
                * c.kernel.signed_power(1.0, small_region, entry["times"][i],
                                        index=int(n)).value
                for i, n in enumerate(entry["indices"])])
        if np.allclose(sizes, 0.0, atol=1e-300):
            return None
        keep = sizes != 0.0
        return Curve.atoms_only(entry["times"][keep], sizes[keep], self.T)

    def _drift_curve(self) -> Curve:
        comp, T = self.comp, self.T
        total = Curve.zero(T)
        for c in comp.components:
            if isinstance(c.clock, FixedTimesClock):
                entry = next(e for e in self.atomic if e["component"] is c)
                ts, ws = entry["times"], entry["weights"]
                sizes = np.array([self.drift.rate(comp, t) for t in ts]) * ws
                keep = sizes != 0.0
                if keep.any():
                    total = total + Curve.atoms_only(ts[keep], sizes[keep], T)
            else:
                clock, wrapper = self._inner_clock(c.clock)
                S = float(wrapper.to_inner(T)) if wrapper is not None else T
                grid = np.linspace(0.0, S, self.grid_n + 1)
                beta_const = (not callable(self.drift.beta)
                              and self.drift.beta is not None)
                if beta_const and clock.constant_rate is not None and wrapper is None:
                    vals = float(self.drift.beta) * clock.constant_rate * grid
                else:
                    vals = clock.cumulative_grid(
                        grid, lambda s: self.drift.rate(comp, self._outer_time(wrapper, s)))
                if not np.allclose(vals, 0.0, atol=1e-300):
                    to_inner = wrapper.to_inner if wrapper is not None else None
                    from_inner = wrapper.from_inner if wrapper is not None else None
                    total = total + Curve(grid, vals, to_inner=to_inner,
                                          from_inner=from_inner)
        return total

    # -- path generation ------------------------------------------------------

    def sample(self, seed: int, path_index: int = 0, x0: float = 0.0) -> SamplePath:
        times_all, jumps_all, levels_all = [], [], []
        for entry in self.lebesgue:
            c: Component = entry["component"]
            wrapper = entry["wrapper"]
            for band in entry["bands"]:
                rng = _rng(seed, path_index, c.stream_id, band["level"] + 1)
                ev_inner = entry["clock"].sample_event_times(
                    band["grid"], band["lam"], rng)
                if not len(ev_inner):
                    continue
                ev_outer = (wrapper.from_inner(ev_inner) if wrapper is not None
                            else ev_inner)
                sizes = self._draw_sizes(c, band["region"], ev_outer, rng)
                times_all.append(np.asarray(ev_outer))
                jumps_all.append(sizes)
                levels_all.append(np.full(len(ev_inner), band["level"]))
        for entry in self.atomic:
            c = entry["component"]
            rng = _rng(seed, path_index, c.stream_id, 0)
            u = rng.random(len(entry["probs"]))
            hit = u < entry["probs"]
            if not hit.any():
                continue
            ts = entry["times"][hit]
            kern = c.kernel
            if isinstance(kern, SliceAtomsKernel) and kern.vec_sample is not None:
                sizes = kern.vec_sample(entry["indices"][hit].astype(float), rng)
            else:
                sizes = np.empty(len(ts))
                for j, i in enumerate(np.nonzero(hit)[0]):
                    n = int(entry["indices"][i])
                    sizes[j] = kern.sample(Region.all_jumps(), entry["times"][i],
                                           rng, index=n)
            times_all.append(ts)
            jumps_all.append(sizes)
            levels_all.append(self.scheme.shell_of(sizes))

        if times_all:
            times = np.concatenate(times_all)
            jumps = np.concatenate(jumps_all)
            levels = np.concatenate(levels_all)
            order = np.argsort(times, kind="stable")
            times, jumps, levels = times[order], jumps[order], levels[order]
            times = _dedupe_times(times)
        else:
            times = np.empty(0)
            jumps = np.empty(0)
            levels = np.empty(0, dtype=int)

        meta = {"seed": seed, "path_index": path_index,
                "scheme_eps": tuple(self.scheme.eps),
                "levels": levels,
                "comp": self.comp, "scheme": self.scheme, "drift": self.drift,
                "c_parts": self.c_parts,
                "truncated_atoms": any(e["truncated"] for e in self.atomic)}
        return SamplePath(x0, times, jumps, self.b_curve, self.c_total, self.T, meta)

    def _draw_sizes(self, c: Component, region: Region, times_outer, rng):
        kern = c.kernel
        time_dep = False
        from .kernels import PowerLawKernel, MovingAtomKernel
        if isinstance(kern, PowerLawKernel) and not kern.alpha.is_constant:
            time_dep = True
        if isinstance(kern, MovingAtomKernel):
            time_dep = True
        if not time_dep:
            return np.asarray(kern.sample(region, 0.0, rng, size=len(times_outer)))
        return np.array([kern.sample(region, float(t), rng) for t in times_outer])

    def ensemble(self, n_paths: int, seed: int, x0: float = 0.0,
                 family: str = "") -> Ensemble:
        paths = [self.sample(seed, i, x0) for i in range(n_paths)]
        return Ensemble(paths, seed, self.T, self.comp, self.scheme,
                        meta={"family": family or self.comp.label})


def _dedupe_times(times: np.ndarray) -> np.ndarray:
    # collisions have probability zero; nudge any float ties upward
    if len(times) < 2 or np.all(np.diff(times) > 0):
        return times
    for i in range(1, len(times)):
        if times[i] <= times[i - 1]:
            times[i] = np.nextafter(times[i - 1], math.inf)
    return times


def sample_path(comp: CompensatorSpec, scheme: TruncationScheme, drift: DriftSpec,
                T: float, seed: int, **kw) -> SamplePath:
    return PathSampler(comp, scheme, drift, T, **kw).sample(seed)


def generate_ensemble(comp: CompensatorSpec, scheme: TruncationScheme,
                      drift: DriftSpec, T: float, n_paths: int, seed: int,
                      x0: float = 0.0, family: str = "", **kw) -> Ensemble:
    return PathSampler(comp, scheme, drift, T, **kw).ensemble(n_paths, seed, x0, family)


def partial_sum_path(path: SamplePath, comp: CompensatorSpec,
                     scheme: TruncationScheme, n: int) -> SamplePath:
    """Retain jump levels above eps_n with the matching compensator truncation.

    The level-n path keeps jumps with |x| > eps_n (large jumps included) and
    the compensator parts of the retained shells only; the declared drift is
    untouched, so the residual against the full path is the compensated tail.
    """
    if tuple(scheme.eps) != tuple(path.meta.get("scheme_eps", ())):
        raise SchemeMismatch("path was generated under a different scheme")
    if not 0 <= n <= scheme.n_shells:
        raise SchemeMismatch(f"level {n} outside 0..{scheme.n_shells}")
    keep = np.abs(path.jumps) > scheme.eps[n]
    c_curve = Curve.zero(path.T)
    for k, cur in path.meta.get("c_parts", []):
        if k < n:
            c_curve = c_curve + cur
    meta = dict(path.meta)
    meta["levels"] = path.meta["levels"][keep] if len(path.meta.get("levels", [])) else []
    meta["partial_level"] = n
    return SamplePath(path.x0, path.times[keep], path.jumps[keep],
                      path.b, c_curve, path.T, meta)


def partial_sum_ensemble(ens: Ensemble, n: int) -> Ensemble:
    comp, scheme = ens.comp, ens.scheme
    paths = [partial_sum_path(p, comp, scheme, n) for p in ens.paths]
    out = Ensemble(paths, ens.seed, ens.T, comp, scheme, meta=dict(ens.meta))
    out.meta["partial_level"] = n
    return out


# --------------------------------------------------------------------------
# named constructions

def intro_process_spec() -> CompensatorSpec:
    """Independent +-1/n jumps at the fixed times 2 - 1/n, accumulating at 2."""

    def times_of(ns):
        return 2.0 - 1.0 / np.asarray(ns, dtype=float)

    def weights_of(ns):
        return np.ones_like(np.asarray(ns, dtype=float))

    clock = FixedTimesClock(times_of, weights_of, count=None,
                            time_order="increasing", accumulation=2.0,
                            label="times 2-1/n")

    def slice_of(n):
        return [(1.0 / n, 0.5), (-1.0 / n, 0.5)]

    def vec_abs_moment(p, region: Region, ns):
        ns = np.asarray(ns, dtype=float)
        x = 1.0 / ns
        vp = np.where(region.contains(x), 0.5 * x ** p, 0.0)
        vn = np.where(region.contains(-x), 0.5 * x ** p, 0.0)
        return vp + vn

    def vec_signed_mean(region: Region, ns):
        ns = np.asarray(ns, dtype=float)
        x = 1.0 / ns
        vp = np.where(region.contains(x), 0.5 * x, 0.0)
        vn = np.where(region.contains(-x), 0.5 * x, 0.0)
        return vp - vn

    def vec_sample(ns, rng):
        ns = np.asarray(ns, dtype=float)
        signs = rng.integers(0, 2, size=len(ns)) * 2 - 1
        return signs / ns

    kern = SliceAtomsKernel(slice_of, vec_abs_moment=vec_abs_moment,
                            vec_signed_mean=vec_signed_mean,
                            vec_sample=vec_sample,
                            symmetric=True, support_hi=1.0, label="pm-1/n")
    return CompensatorSpec.single(kern, clock, horizon=2.0,
                                  label="fixed-time pm-1/n process")


def intro_scheme(n_levels: int) -> TruncationScheme:
    """One jump level 1/k per shell, so partial-sum level n keeps k <= n."""
    return TruncationScheme.atom_aligned(
        lambda ks: 1.0 / np.asarray(ks, dtype=float), n_levels)


def intro_process(seed: int, n_max: int = 100_000, T: float = 2.0,
                  scheme: Optional[TruncationScheme] = None) -> SamplePath:
    comp = intro_process_spec()
    scheme = scheme or intro_scheme(n_max)
    sampler = PathSampler(comp, scheme, DriftSpec(0.0), T, n_max_atoms=n_max)
    return sampler.sample(seed)


def intro_ensemble(n_paths: int, seed: int, n_max: int = 2000,
                   T: float = 2.0) -> Ensemble:
    comp = intro_process_spec()
    sampler = PathSampler(comp, intro_scheme(n_max), DriftSpec(0.0), T,
                          n_max_atoms=n_max)
    return sampler.ensemble(n_paths, seed, family="intro")


def summable_staircase_spec(n_max: Optional[int] = None) -> CompensatorSpec:
    """Deterministic jumps of size 1/k^2 at times 1/k: summable but not
    piecewise constant (jump times accumulate at 0)."""

    def times_of(ns):
        return 1.0 / np.asarray(ns, dtype=float)

    def weights_of(ns):
        return np.ones_like(np.asarray(ns, dtype=float))

    clock = FixedTimesClock(times_of, weights_of, count=n_max,
                            time_order="decreasing", accumulation=0.0,
                            label="times 1/k")

    def slice_of(n):
        return [(1.0 / n ** 2, 1.0)]

    def vec_abs_moment(p, region: Region, ns):
        ns = np.asarray(ns, dtype=float)
        x = ns ** -2.0
        return np.where(region.contains(x), x ** p, 0.0)

    def vec_signed_mean(region: Region, ns):
        ns = np.asarray(ns, dtype=float)
        x = ns ** -2.0
        return np.where(region.contains(x), x, 0.0)

    def vec_sample(ns, rng):
        return np.asarray(ns, dtype=float) ** -2.0

    kern = SliceAtomsKernel(slice_of, vec_abs_moment=vec_abs_moment,
                            vec_signed_mean=vec_signed_mean,
                            vec_sample=vec_sample,
                            symmetric=False, support_hi=1.0, label="1/k^2 stairs")
    return CompensatorSpec.single(kern, clock, horizon=1.0,
                                  label="summable staircase")


def poisson_phi_process(power: int, T: float, seed: int,
                        time_change: bool = False) -> SamplePath:
    """Marks 1/ceil(u)^power at standard Poisson events, optionally run
    through the tan time change.  The drift field carries the cumulative
    compensator of the marks."""
    if power not in (1, 2):
        raise PureJumpError("mark power must be 1 or 2")
    if time_change and T >= math.pi / 2:
        raise PureJumpError("time-changed horizon must stay below pi/2")
    S = math.tan(T) if time_change else T
    rng = _rng(seed, 0, 0, 0)
    ev = []
    t = 0.0
    while True:
        t += rng.exponential()
        if t > S:
            break
        ev.append(t)
    ev_inner = np.asarray(ev)
    marks = 1.0 / np.ceil(ev_inner) ** power if len(ev_inner) else np.empty(0)

    # cumulative int phi^power du: piecewise linear with breaks at integers
    kmax = int(math.ceil(S)) + 1
    grid = np.unique(np.concatenate([np.arange(0.0, kmax + 1.0), [S]]))
    ks = np.arange(1, len(grid), dtype=float)
    rates = 1.0 / np.ceil(grid[1:]) ** power
    vals = np.concatenate([[0.0], np.cumsum(rates * np.diff(grid))])

    if time_change:
        tc = TanChangeClock(LebesgueClock(1.0))
        curve = Curve(grid, vals, to_inner=lambda tt: tc.to_inner(tt),
                      from_inner=lambda ss: tc.from_inner(ss))
        times = np.arctan(ev_inner)
    else:
        curve = Curve(grid, vals)
        times = ev_inner

    min_mark = 1.0 / math.ceil(S + 1.0) ** power
    meta = {"seed": seed, "power": power, "time_change": time_change,
            "inner_times": ev_inner, "comp": phi_marks_spec(power, T, time_change),
            "scheme_eps": (1.0, 0.5 * min_mark),
            "b_horizon_max": math.pi / 2 if time_change else T}
    return SamplePath(0.0, times, marks, curve, curve, T, meta)


def phi_marks_spec(power: int, T: float, time_change: bool) -> CompensatorSpec:
    from .kernels import MovingAtomKernel

    def loc(t):
        return 1.0 / math.ceil(max(t, 1e-12)) ** power

    def breaks(t0, t1):
        return np.arange(math.ceil(t0), math.floor(t1) + 1, dtype=float)

    inner_T = math.tan(T) if time_change else T
    kern = MovingAtomKernel(loc, lambda t: 1.0, breaks, support_hi=1.0,
                            label=f"phi^{power} marks")
    clock = TanChangeClock(LebesgueClock(1.0)) if time_change else LebesgueClock(1.0)
    horizon = T
    return CompensatorSpec.single(kern, clock, horizon=horizon,
                                  label=f"phi^{power} marked counting process",
                                  validate=False)
