"""Membership in the pure-jump hierarchy and the sigma-integrability classes.

The hierarchy, from largest class to smallest:

  1  quadratic pure-jump        ([X,X] carried entirely by jumps)
  2  pure-jump                  (limit of its jump sums in the semimartingale topology)
  3  strong pure-jump           (uniquely determined by its jump measure)
  4  sigma-locally finite-variation pure-jump
  5  finite-variation pure-jump (absolutely summable jumps)
  6  piecewise constant with finitely many jumps per compact

Classification is analytic, from the compensator and a drift declaration;
deterministic (time-only) compensators collapse the almost-everywhere
conditions to conditions in t.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .compensator import CompensatorSpec, Component
from .errors import PureJumpError, QuadratureFailure, UnknownAsymptotics
from .functions import JumpFunction, slice_abs_integral, slice_signed_integral, time_abs_integral
from .kernels import PowerLawKernel
from .regions import BOTH, NEG, POS, Region
from .series import ExtReal

DRIFT_MATCH_RTOL = 1e-9


class Flag(enum.Enum):
    MEMBER = "member"
    NON_MEMBER = "non-member"
    UNDECIDED = "undecided"


@dataclass
class Witness:
    condition: str
    value: object = None
    detail: str = ""

    def __str__(self):
        v = "" if self.value is None else f" = {self.value}"
        d = f" ({self.detail})" if self.detail else ""
        return f"{self.condition}{v}{d}"


@dataclass
class DriftSpec:
    """Drift rate of the small-jump part against dA.

    ``beta`` is a constant or a function of time; ``matching=True`` declares
    beta equal to the truncated mean of the kernel wherever that mean
    exists (None: decide numerically).
    """

    beta: float | Callable[[float], float] | None = 0.0
    matching: Optional[bool] = None

    def rate(self, comp: CompensatorSpec, t: float) -> float:
        if self.beta is None:
            s = comp.signed_truncated_mean(Region.small_jumps(comp.big_jump_cut), t)
            if s.value is None:
                raise PureJumpError("matching drift undefined where the truncated "
                                    "mean diverges asymmetrically")
            return s.value
        if callable(self.beta):
            return float(self.beta(t))
        return float(self.beta)

    @staticmethod
    def matching_drift() -> "DriftSpec":
        return DriftSpec(beta=None, matching=True)


@dataclass
class ClassReport:
    flags: dict[int, Flag] = field(default_factory=dict)
    witnesses: dict[int, Witness] = field(default_factory=dict)
    alpha_note: str = ""

    def set(self, level: int, flag: Flag, witness: Witness):
        self.flags[level] = flag
        self.witnesses[level] = witness

    def enforce_chain(self):
        # membership in a smaller class implies membership in every larger one
        for i in range(6, 1, -1):
            if self.flags.get(i) is Flag.MEMBER:
                for j in range(i - 1, 0, -1):
                    if self.flags.get(j) is not Flag.MEMBER:
                        self.set(j, Flag.MEMBER,
                                 Witness("chain", detail=f"member at level {i}"))
        for i in range(1, 6):
            if self.flags.get(i) is Flag.NON_MEMBER:
                for j in range(i + 1, 7):
                    if self.flags.get(j) is not Flag.NON_MEMBER:
                        self.set(j, Flag.NON_MEMBER,
                                 Witness("chain", detail=f"non-member at level {i}"))
        return self

    def member(self, level: int) -> Flag:
        return self.flags.get(level, Flag.UNDECIDED)

    def pattern(self) -> str:
        """E.g. 'J5\\J6' for the innermost member level and first non-member."""
        inner = max((i for i, f in self.flags.items() if f is Flag.MEMBER), default=0)
        return f"J{inner}" if inner else "none"

    def lines(self):
        for i in range(1, 7):
            f = self.flags.get(i, Flag.UNDECIDED)
            w = self.witnesses.get(i)
            yield f"J{i}: {f.value:<11} {w if w else ''}"


# --------------------------------------------------------------------------
# slice-level structure

SMALL = None  # placeholder, filled per-comp with the cut level


def _small(comp: CompensatorSpec) -> Region:
    return Region.small_jumps(comp.big_jump_cut)


def _probe_times(comp: CompensatorSpec, n: int = 7):
    times = set()
    for c in comp.components:
        for idx, t in comp._probe_times(c, n):
            times.add(float(t))
    return sorted(times)


@dataclass
class SliceStructure:
    """Where the small-jump slice integrals converge, per side, in t."""

    finite_ae: bool                  # |x|-slice finite for dA-a.e. t
    divergent_everywhere: bool       # |x|-slice infinite on (essentially) all of the support
    sides_coincide: bool             # {x+ integrable} and {x- integrable} agree a.e.
    witness: Witness


def slice_structure(comp: CompensatorSpec) -> SliceStructure:
    """Finiteness pattern of int |x| 1_{|x|<=cut} F_t(dx) across the horizon."""
    small = _small(comp)
    pos, neg = small.restrict_side(POS), small.restrict_side(NEG)
    verdicts = []
    for comp_c in comp.components:
        if comp_c.atomic:
            # per-slice atom lists and fixed finite kernels: finite at every atom
            verdicts.append(("finite", "finite"))
            continue
        k = comp_c.kernel
        if isinstance(k, PowerLawKernel) and not k.alpha.is_constant:
            # exponent affine in t: the divergence region is an interval
            a = k.alpha
            t_cross = (1.0 - a.a) / a.b if a.b != 0.0 else None
            diverges_at = lambda t: float(a(t)) >= 1.0
            lo_div = diverges_at(0.0)
            hi_div = diverges_at(comp.horizon)
            if not lo_div and not hi_div:
                verdicts.append(("finite", "finite"))
            elif lo_div and hi_div:
                verdicts.append(("infinite", "infinite"))
            else:
                # divergent on a sub-interval of positive length?
                length = t_cross if lo_div else comp.horizon - t_cross
                tag = "finite" if length <= 0.0 else "mixed"
                # a single boundary point has dA-measure zero
                if lo_div and t_cross is not None and t_cross <= 0.0:
                    tag = "finite"
                verdicts.append((tag, tag))
            continue
        vp = comp.partial_moment(1.0, pos, comp.horizon / 2.0)
        vn = comp.partial_moment(1.0, neg, comp.horizon / 2.0)
        verdicts.append(("infinite" if vp.is_infinite else "finite",
                         "infinite" if vn.is_infinite else "finite"))
    pos_states = {v[0] for v in verdicts}
    neg_states = {v[1] for v in verdicts}
    abs_div = "infinite" in pos_states or "infinite" in neg_states
    mixed = "mixed" in pos_states or "mixed" in neg_states
    finite_ae = not abs_div and not mixed
    divergent_everywhere = abs_div and not mixed
    # the sides coincide when each component's sides have the same state
    sides_coincide = all(v[0] == v[1] for v in verdicts)
    value = comp.partial_moment(1.0, small, comp.horizon / 2.0)
    w = Witness("int |x| 1(|x|<=1) F_t(dx)",
                "infinite" if value.is_infinite else f"{value.value:.6g}",
                value.certificate.describe() if value.is_infinite else "per-slice")
    if mixed:
        finite_ae = False
    return SliceStructure(finite_ae, divergent_everywhere, sides_coincide, w)


# --------------------------------------------------------------------------
# the single-criterion operations

def in_J6(comp: CompensatorSpec) -> tuple[Flag, Witness]:
    """Finitely many jumps on compacts: total activity finite up to the horizon."""
    try:
        act = comp.activity(comp.horizon)
    except QuadratureFailure as e:
        return Flag.UNDECIDED, Witness("total activity", detail=str(e))
    if act.is_infinite:
        return Flag.NON_MEMBER, Witness("total activity", "infinite",
                                        act.certificate.describe())
    return Flag.MEMBER, Witness("total activity", f"{act.value:.6g}", "finite")


def in_J5(comp: CompensatorSpec) -> tuple[Flag, Witness]:
    """Absolutely summable small jumps: int int |x| 1_{|x|<=1} F dA finite."""
    try:
        v = comp.time_moment(1.0, _small(comp), comp.horizon,
                             description="small-jump absolute mass")
    except QuadratureFailure as e:
        return Flag.UNDECIDED, Witness("int int |x| 1(|x|<=1) F dA", detail=str(e))
    if v.is_infinite:
        return Flag.NON_MEMBER, Witness("int int |x| 1(|x|<=1) F dA", "infinite",
                                        v.certificate.describe())
    return Flag.MEMBER, Witness("int int |x| 1(|x|<=1) F dA", f"{v.value:.6g}", "finite")


def in_J4(comp: CompensatorSpec) -> tuple[Flag, Witness]:
    """Slice integrability a.e.: int |x| 1_{|x|<=1} F_t(dx) < inf for dA-a.e. t.

    Decides membership in the sigma-locally finite-variation class for
    processes already known to be pure-jump (the caller's responsibility).
    """
    s = slice_structure(comp)
    if s.finite_ae:
        return Flag.MEMBER, s.witness
    return Flag.NON_MEMBER, s.witness


def j3_obstruction(comp: CompensatorSpec) -> tuple[bool, Witness]:
    """Whether the small-atom condition holds: one one-sided limsup of
    |x| F_t({x}) vanishes (the minimum of the two sides is zero)."""
    times = _probe_times(comp, 3)
    holds = True
    for t in times:
        v_pos = comp.atom_limsup_vanishes(POS, t)
        v_neg = comp.atom_limsup_vanishes(NEG, t)
        if not (v_pos or v_neg):
            holds = False
            break
    detail = "min over sides of limsup |x| F({x}) as x->0"
    return holds, Witness("small-atom condition", "holds" if holds else "fails", detail)


# --------------------------------------------------------------------------

def _drift_matches(comp: CompensatorSpec, drift: DriftSpec) -> tuple[bool, Witness]:
    """beta_t == int x 1_{|x|<=1} F_t(dx) wherever the mean exists (grid check)."""
    if drift.matching is True and drift.beta is None:
        return True, Witness("drift identity", "declared matching")
    small = _small(comp)
    worst = 0.0
    for t in _probe_times(comp, 9):
        s = comp.signed_truncated_mean(small, t)
        if s.flag != "absolute":
            continue    # the mean does not exist there: the identity is vacuous
        mean = s.value
        beta = drift.rate(comp, t)
        err = abs(beta - mean) / (1.0 + abs(beta))
        worst = max(worst, err)
        if err > DRIFT_MATCH_RTOL:
            return False, Witness("drift identity",
                                  f"|beta - mean| = {abs(beta - mean):.3g} at t={t:g}")
    return True, Witness("drift identity", f"max residual {worst:.3g}")


def _beta_zero_on_divergent(comp: CompensatorSpec, drift: DriftSpec,
                            pinned: float) -> bool:
    for t in _probe_times(comp, 9):
        if abs(drift.rate(comp, t) - pinned) > DRIFT_MATCH_RTOL:
            return False
    return True


def classify(comp: CompensatorSpec, drift: DriftSpec) -> ClassReport:
    """Full hierarchy report for the process with compensator ``comp`` and
    small-jump drift rate ``drift``."""
    report = ClassReport()
    report.set(1, Flag.MEMBER,
               Witness("quadratic variation", detail="no continuous component "
                       "by construction: [X,X] is the sum of squared jumps"))

    s = slice_structure(comp)
    matches, match_w = _drift_matches(comp, drift)
    cond14, w14 = j3_obstruction(comp)

    # level 2: pure jump
    if s.finite_ae:
        if matches:
            mean_int = _mean_time_integral(comp)
            if mean_int is not None and mean_int.is_infinite:
                report.set(2, Flag.NON_MEMBER,
                           Witness("truncated-mean drift",
                                   "not dA-integrable",
                                   mean_int.certificate.describe()))
            else:
                report.set(2, Flag.MEMBER, match_w)
        else:
            report.set(2, Flag.NON_MEMBER, Witness(
                "drift identity", "fails",
                "every pure-jump process with this jump measure has the "
                "truncated-mean drift: " + str(match_w)))
    else:
        if not s.sides_coincide:
            report.set(2, Flag.NON_MEMBER, Witness(
                "one-sided integrability sets differ",
                detail="for a pure-jump process the x+ and x- small-jump "
                       "integrability sets coincide a.e."))
        elif cond14:
            report.set(2, Flag.MEMBER, Witness(
                "drift steerable", detail="two-sided divergent small jumps with "
                "vanishing atom limsup: any dA-integrable drift is attainable"))
        else:
            pinned = _pinned_drift(comp)
            if pinned is not None:
                if _beta_zero_on_divergent(comp, drift, pinned):
                    report.set(2, Flag.MEMBER, Witness(
                        "pinned drift", pinned,
                        "geometric atom growth pins every jump-sum drift"))
                else:
                    report.set(2, Flag.NON_MEMBER, Witness(
                        "pinned drift", pinned,
                        "declared drift differs from the pinned value"))
            else:
                report.set(2, Flag.UNDECIDED, Witness(
                    "undecided-by-criterion",
                    detail="small-atom condition fails and small jumps are "
                           "not integrable: outside the analytic criteria"))

    # level 4: sigma-locally finite variation (given pure-jump)
    if report.member(2) is Flag.MEMBER and s.finite_ae:
        report.set(4, Flag.MEMBER, s.witness)
    elif not s.finite_ae:
        report.set(4, Flag.NON_MEMBER, s.witness)
    elif report.member(2) is Flag.NON_MEMBER:
        report.set(4, Flag.NON_MEMBER, Witness("chain", detail="not pure-jump"))
    else:
        report.set(4, Flag.UNDECIDED, s.witness)

    # level 3: strong pure jump
    if report.member(4) is Flag.MEMBER:
        report.set(3, Flag.MEMBER, Witness(
            "chain", detail="sigma-locally finite variation processes are strong"))
    elif report.member(2) is Flag.NON_MEMBER:
        report.set(3, Flag.NON_MEMBER, Witness("chain", detail="not pure-jump"))
    elif cond14 and report.member(4) is Flag.NON_MEMBER:
        report.set(3, Flag.NON_MEMBER, Witness(
            "small-atom condition", "holds",
            "with the small-atom condition, strong pure-jump implies "
            "sigma-locally finite variation, which fails"))
    elif not cond14 and _pinned_drift(comp) is not None \
            and report.member(2) is Flag.MEMBER:
        report.set(3, Flag.MEMBER, Witness(
            "pinned drift", _pinned_drift(comp),
            "shipped strong pure-jump family: the selection inequality pins "
            "every approximating drift"))
    else:
        report.set(3, Flag.UNDECIDED, w14)

    # level 5: absolutely summable jumps
    if report.member(4) is Flag.MEMBER:
        f5, w5 = in_J5(comp)
        report.set(5, f5, w5)
    else:
        report.set(5, Flag.NON_MEMBER, Witness("chain", detail="outside level 4"))

    # level 6: piecewise constant
    if report.member(5) is Flag.MEMBER:
        f6, w6 = in_J6(comp)
        report.set(6, f6, w6)
    else:
        report.set(6, Flag.NON_MEMBER, Witness("chain", detail="outside level 5"))

    report.enforce_chain()
    report.alpha_note = _stable_note(comp, drift, report)
    return report


def _pinned_drift(comp: CompensatorSpec) -> Optional[float]:
    vals = [c.kernel.pinned_drift for c in comp.components
            if c.kernel.pinned_drift is not None]
    if not vals:
        return None
    if len(set(vals)) > 1:
        return None
    return vals[0]


def _mean_time_integral(comp: CompensatorSpec) -> Optional[ExtReal]:
    """int |int x 1_{|x|<=1} F_t(dx)| dA_t when the slice means exist."""
    small = _small(comp)

    def h(t):
        v = comp.signed_truncated_mean(small, t)
        if v.value is None:
            return math.inf
        return abs(v.value)

    total = ExtReal.finite(0.0)
    for c in comp.components:
        h_vec = None
        kern = c.kernel
        from .kernels import SliceAtomsKernel
        if isinstance(kern, SliceAtomsKernel) and kern.vec_signed_mean is not None:
            h_vec = lambda ns, ts: np.abs(kern.vec_signed_mean(small, ns))
        try:
            total = total + c.clock.integrate_abs(
                h, 0.0, comp.horizon, h_vec=h_vec,
                description="truncated-mean total variation")
        except QuadratureFailure:
            return None
        if total.is_infinite:
            return total
    return total


def _stable_note(comp: CompensatorSpec, drift: DriftSpec, report: ClassReport) -> str:
    if len(comp.components) != 1:
        return ""
    c = comp.components[0]
    k = c.kernel
    from .clocks import LebesgueClock
    if not isinstance(k, PowerLawKernel) or not isinstance(c.clock, LebesgueClock):
        return ""
    if not k.alpha.is_constant or k.side != BOTH:
        return ""
    alpha = k.alpha.const_value()
    beta = drift.rate(comp, comp.horizon / 2.0)
    if alpha < 1.0:
        kind = "J5\\J6" if report.member(5) is Flag.MEMBER else "J1\\J2"
        note = (f"stable-type exponent {alpha:g} < 1, drift "
                f"{'matching' if report.member(2) is Flag.MEMBER else 'non-matching'}"
                f": {kind}")
    else:
        note = f"stable-type exponent {alpha:g} >= 1, any drift: J2\\J3"
    return note + f" (beta = {beta:g})"


# --------------------------------------------------------------------------
# sigma-integrability classes

def l_sigma_nu_member(eta: JumpFunction, comp: CompensatorSpec) \
        -> tuple[Flag, list[Witness]]:
    """Both conditions for eta to integrate sigma-locally against nu:
    (a) slice absolute integrals finite a.e.; (b) the absolute cumulative
    of the signed slice values finite on the horizon."""
    witnesses = []
    # (a): per-monomial slice finiteness, via the same slice analysis as level 4
    for m in eta.monomials:
        region = m.band if m.band is not None else Region.all_jumps()
        sub = comp.restricted(region) if m.band is not None else comp
        s_ok = _slice_power_finite_ae(sub, m.power)
        if s_ok is False:
            v = slice_abs_integral(eta, comp, comp.horizon / 2.0)
            witnesses.append(Witness("slice integral int |eta| F_t(dx)", "infinite",
                                     v.certificate.describe() if v.is_infinite else ""))
            return Flag.NON_MEMBER, witnesses
        if s_ok is None:
            witnesses.append(Witness("slice integral", "undecided"))
            return Flag.UNDECIDED, witnesses
    witnesses.append(Witness("slice integral int |eta| F_t(dx)", "finite a.e."))

    # (b): int |int eta F_t dx| dA_t < inf
    def h(t):
        v, flag = slice_signed_integral(eta, comp, t)
        if flag == "divergent":
            return math.inf
        return abs(v)

    total = ExtReal.finite(0.0)
    for c in comp.components:
        try:
            total = total + c.clock.integrate_abs(
                h, 0.0, comp.horizon, description="signed slice cumulative")
        except QuadratureFailure as e:
            witnesses.append(Witness("cumulative |int eta F| dA", detail=str(e)))
            return Flag.UNDECIDED, witnesses
        if total.is_infinite:
            witnesses.append(Witness("cumulative |int eta F| dA", "infinite",
                                     total.certificate.describe()))
            return Flag.NON_MEMBER, witnesses
    witnesses.append(Witness("cumulative |int eta F| dA", f"{total.value:.6g}"))
    return Flag.MEMBER, witnesses


def _slice_power_finite_ae(comp: CompensatorSpec, p: float) -> Optional[bool]:
    """Whether int |x|^p F_t(dx) over the small region is finite dA-a.e."""
    small = _small(comp)
    for c in comp.components:
        if c.atomic:
            continue
        k = c.kernel
        if isinstance(k, PowerLawKernel) and not k.alpha.is_constant:
            a = k.alpha
            div_lo = float(a(0.0)) >= p
            div_hi = float(a(comp.horizon)) >= p
            if div_lo and div_hi:
                return False
            if div_lo != div_hi:
                t_cross = (p - a.a) / a.b
                length = t_cross if div_lo else comp.horizon - t_cross
                if length > 1e-12:
                    return False
            continue
        v = comp.partial_moment(p, small, comp.horizon / 2.0)
        if v.is_infinite:
            return False
    return True


def l_sigma_mu_member(eta: JumpFunction, comp: CompensatorSpec) \
        -> tuple[Flag, list[Witness]]:
    """eta integrates sigma-locally against the jump measure itself:
    (a) the expected squared total is finite (certificate for the pathwise
    squared sum); (b) the small part of eta integrates against nu."""
    witnesses = []
    eta_sq = JumpFunction(
        [type(m)(m.coef ** 2, 2.0 * m.power, False, m.band, m.window)
         for m in eta.monomials], name=f"({eta.name})^2")
    try:
        sq = time_abs_integral(eta_sq, comp, comp.horizon)
    except QuadratureFailure as e:
        witnesses.append(Witness("int int eta^2 F dA", detail=str(e)))
        return Flag.UNDECIDED, witnesses
    if sq.is_infinite:
        witnesses.append(Witness("int int eta^2 F dA", "infinite",
                                 "pathwise squared sums may still be finite: undecided, "
                                 "never non-member on this evidence"))
        return Flag.UNDECIDED, witnesses
    witnesses.append(Witness("int int eta^2 F dA", f"{sq.value:.6g}"))
    small_eta = eta.truncate(1.0, small=True)
    flag, nu_w = l_sigma_nu_member(small_eta, comp)
    witnesses.extend(nu_w)
    return flag, witnesses


def l_mu_plain_member(eta: JumpFunction, comp: CompensatorSpec) \
        -> tuple[Flag, list[Witness]]:
    """Plain absolute integrability against the jump measure, a.s.:
    certified by int (|eta| ^ 1) d nu < inf (exponential-formula criterion
    for independent-jump frameworks)."""
    witnesses = []
    small_part = eta.truncate(1.0, small=True)
    big_part = eta.truncate(1.0, small=False)
    big_ind = JumpFunction(
        [type(m)(1.0 if m.coef != 0 else 0.0, 0.0, False, m.band, m.window)
         for m in big_part.monomials], name="1(|eta|>1)")
    try:
        v = time_abs_integral(small_part, comp, comp.horizon) \
            + time_abs_integral(big_ind, comp, comp.horizon)
    except QuadratureFailure as e:
        witnesses.append(Witness("int (|eta| ^ 1) d nu", detail=str(e)))
        return Flag.UNDECIDED, witnesses
    if v.is_infinite:
        witnesses.append(Witness("int (|eta| ^ 1) d nu", "infinite",
                                 v.certificate.describe()))
        return Flag.NON_MEMBER, witnesses
    witnesses.append(Witness("int (|eta| ^ 1) d nu", f"{v.value:.6g}"))
    return Flag.MEMBER, witnesses
