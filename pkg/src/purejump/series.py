"""Certified summation of nonnegative series.

Every potentially-infinite integral in the package reduces to a walk over
nonnegative increments: jump-size shell masses, clock-atom contributions,
dyadic time blocks.  The walkers here return either a finite value with a
tail bound, or an ``ExtReal`` flagged infinite carrying a divergence
certificate.

Divergence is declared only when the monotone partial sums exceed the cap,
either literally or provably: when a trailing window of *dyadic-scale*
block increments is non-decreasing or bounded below by a positive floor
without geometric decay, the partial sums cross the cap at a computable
future index, which the certificate records.  Convergent walks terminate
early once a geometric-ratio bound or a power-decay tail fit pushes the
estimated remainder under tolerance.  Genuinely borderline walks (e.g.
exponents within ~0.05 of the harmonic boundary) end in QuadratureFailure
rather than a guess.

``sum_blocks`` consumes increments that are already at dyadic scale (shell
walks over geometric bands, dyadic time blocks).  ``sum_chunks`` consumes
natural enumerations (atom index k = 1, 2, ...) as numpy chunks and does
the dyadic aggregation itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import QuadratureFailure

CAP_DEFAULT = 1e12
WINDOW_DEFAULT = 20
FLOOR_DEFAULT = 1e-9


@dataclass
class DivergenceCertificate:
    """Evidence for declaring a monotone sum infinite."""

    reason: str                 # "cap-exceeded" or "window-bounded-below"
    block_index: int            # dyadic block index at certification
    partial_sum: float          # evaluated partial sum at certification
    window_min: float           # smallest block increment in the trailing window
    projected_cap_index: int    # block index by which the sum provably exceeds the cap
    description: str = ""

    def describe(self) -> str:
        tag = f" [{self.description}]" if self.description else ""
        return (
            f"{self.reason}{tag}: partial sum {self.partial_sum:.6g} after "
            f"block {self.block_index}, trailing increments >= "
            f"{self.window_min:.3g}, cap crossed by block {self.projected_cap_index}"
        )


@dataclass
class ExtReal:
    """A nonnegative extended real: a value, or Infinite with a certificate."""

    value: float
    is_infinite: bool = False
    certificate: Optional[DivergenceCertificate] = None
    tail_bound: float = 0.0     # bound on the unexplored remainder (finite case)

    @staticmethod
    def finite(value: float, tail_bound: float = 0.0) -> "ExtReal":
        return ExtReal(float(value), False, None, float(tail_bound))

    @staticmethod
    def infinite(cert: DivergenceCertificate) -> "ExtReal":
        return ExtReal(math.inf, True, cert, math.inf)

    def __float__(self) -> float:
        return math.inf if self.is_infinite else self.value

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = ExtReal.finite(float(other))
        if self.is_infinite:
            return self
        if other.is_infinite:
            return other
        return ExtReal.finite(self.value + other.value,
                              self.tail_bound + other.tail_bound)

    __radd__ = __add__

    def scaled(self, c: float) -> "ExtReal":
        if c == 0.0:
            return ExtReal.finite(0.0)
        if self.is_infinite:
            return self
        return ExtReal.finite(c * self.value, abs(c) * self.tail_bound)

    def __repr__(self):
        if self.is_infinite:
            return f"ExtReal(inf; {self.certificate.reason})"
        return f"ExtReal({self.value!r})"


def _kahan_add(total, comp, x):
    y = x - comp
    t = total + y
    comp = (t - total) - y
    return t, comp


def _window_certificate(blocks, total, cap, window, floor, description):
    """Divergence verdict from the trailing window of dyadic block sums."""
    if len(blocks) < window:
        return None
    tail = blocks[-window:]
    wmin = min(tail)
    if wmin <= 0.0:
        return None
    nondecreasing = all(b >= a * (1.0 - 1e-9) for a, b in zip(tail, tail[1:]))
    no_decay = wmin >= floor and tail[-1] >= 0.5 * tail[0]
    if nondecreasing or no_decay:
        idx = len(blocks) - 1
        projected = idx + int(math.ceil(max(cap - total, 0.0) / wmin)) + 1
        return DivergenceCertificate(
            "window-bounded-below" if not (total > cap) else "cap-exceeded",
            idx, total, wmin, projected, description)
    return None


def sum_blocks(
    increments: Iterable[float],
    *,
    cap: float = CAP_DEFAULT,
    window: int = WINDOW_DEFAULT,
    floor: float = FLOOR_DEFAULT,
    tail_tol: float = 1e-12,
    rel_tail_tol: float = 1e-10,
    max_blocks: int = 2000,
    description: str = "",
) -> ExtReal:
    """Sum dyadic-scale block increments with a convergence/divergence verdict.

    The caller guarantees the increments are block sums at dyadic scale
    (consecutive blocks cover geometrically comparable mass for the walk's
    natural parametrization); shell masses over bands (2^-k-1, 2^-k] and
    dyadic time-block integrals qualify.
    """
    total, comp = 0.0, 0.0
    blocks: list[float] = []
    for inc in increments:
        if inc < 0:
            raise ValueError("sum_blocks expects nonnegative increments")
        total, comp = _kahan_add(total, comp, inc)
        blocks.append(inc)
        if total > cap:
            cert = DivergenceCertificate(
                "cap-exceeded", len(blocks) - 1, total,
                min(blocks[-window:]), len(blocks) - 1, description)
            return ExtReal.infinite(cert)
        cert = _window_certificate(blocks, total, cap, window, floor, description)
        if cert is not None:
            return ExtReal.infinite(cert)
        if len(blocks) >= window:
            tail_w = blocks[-window:]
            if max(tail_w) == 0.0:
                return ExtReal.finite(total, 0.0)
            if min(tail_w) > 0.0:
                r = max(b / a for a, b in zip(tail_w, tail_w[1:]))
                if r < 0.95:
                    bound = tail_w[-1] * r / (1.0 - r)
                    if bound <= tail_tol + rel_tail_tol * abs(total):
                        return ExtReal.finite(total, bound)
        if len(blocks) >= max_blocks:
            raise QuadratureFailure(
                f"no series verdict within {max_blocks} blocks"
                + (f" ({description})" if description else ""))
    return ExtReal.finite(total, 0.0)


def _power_tail(a_lo, k_lo, a_hi, k_hi):
    """Tail estimate past index k_hi assuming a_k ~ c k^-p.

    Euler-Maclaurin: sum_{k>K} a_k = a_K (K/(p-1) - 1/2) + O(a_K/K).
    Returns (estimate, error_bound); error infinite when the fit does not
    indicate safe convergence (p <= 1.05).
    """
    if a_hi <= 0.0 or a_lo <= a_hi or k_lo < 1 or k_hi <= k_lo:
        return 0.0, math.inf    # no safe conclusion from this window
    p = math.log(a_lo / a_hi) / math.log(k_hi / k_lo)
    if p <= 1.05:
        return 0.0, math.inf
    est = a_hi * (k_hi / (p - 1.0) - 0.5)
    err = a_hi * (1.0 + 1.0 / (p - 1.0))
    return est, err


def sum_chunks(
    chunks: Iterable[np.ndarray],
    *,
    cap: float = CAP_DEFAULT,
    window: int = WINDOW_DEFAULT,
    floor: float = FLOOR_DEFAULT,
    tail_tol: float = 1e-12,
    rel_tail_tol: float = 1e-10,
    max_terms: int = 8_000_000,
    description: str = "",
) -> ExtReal:
    """Sum a natural enumeration a_1, a_2, ... supplied as numpy chunks.

    The provider yields consecutive nonnegative values in index order; the
    recommended chunking is dyadic (``dyadic_ranges``), which lets the
    power-decay tail fit read its two samples off a single chunk.  The
    divergence window operates on the dyadic block sums.
    """
    total, comp = 0.0, 0.0
    blocks: list[float] = []
    n = 0
    for arr in chunks:
        arr = np.asarray(arr, dtype=float)
        if arr.size == 0:
            continue
        if np.any(arr < 0):
            raise ValueError("sum_chunks expects nonnegative values")
        lo = n + 1                      # 1-based index of arr[0]
        n += arr.size
        total, comp = _kahan_add(total, comp, float(np.sum(arr)))
        blocks.append(float(np.sum(arr)))
        if total > cap:
            cert = DivergenceCertificate(
                "cap-exceeded", len(blocks) - 1, total,
                min(blocks[-window:]), len(blocks) - 1, description)
            return ExtReal.infinite(cert)
        cert = _window_certificate(blocks, total, cap, window, floor, description)
        if cert is not None:
            return ExtReal.infinite(cert)
        if len(blocks) >= window and max(blocks[-window:]) == 0.0:
            return ExtReal.finite(total, 0.0)   # no mass in a long trailing window
        if arr.size >= 2 and len(blocks) >= 6:
            est, err = _power_tail(float(arr[0]), lo, float(arr[-1]), n)
            if err <= tail_tol + rel_tail_tol * abs(total):
                return ExtReal.finite(total + est, err)
        if n >= max_terms:
            est, err = (0.0, math.inf)
            if arr.size >= 2:
                est, err = _power_tail(float(arr[0]), lo, float(arr[-1]), n)
            if math.isfinite(err):
                return ExtReal.finite(total + est, err)
            raise QuadratureFailure(
                f"no series verdict within {max_terms} terms"
                + (f" ({description})" if description else ""))
    return ExtReal.finite(total, 0.0)


def dyadic_ranges(start: int = 1, max_terms: int = 8_000_000):
    """Yield 1-based dyadic index ranges (lo, hi] starting at ``start``."""
    lo = start
    width = 1
    while lo <= max_terms:
        hi = min(lo + width - 1, max_terms)
        yield lo, hi
        lo = hi + 1
        width *= 2


def chunks_from_term(term_fn: Callable[[np.ndarray], np.ndarray],
                     start: int = 1, max_terms: int = 8_000_000,
                     chunk_cap: int = 1 << 21):
    """Vectorized dyadic chunks of ``term_fn(k)`` for k = start, start+1, ...

    Individual chunks are capped at ``chunk_cap`` entries to bound memory.
    """
    for lo, hi in dyadic_ranges(start, max_terms):
        a = lo
        while a <= hi:
            b = min(a + chunk_cap - 1, hi)
            yield term_fn(np.arange(a, b + 1, dtype=float))
            a = b + 1
