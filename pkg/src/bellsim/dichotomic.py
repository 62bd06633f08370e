"""Exact correlation machinery for periodic two-valued step functions.

A dichotomic function here is a T-periodic signal taking only the values
+1 and -1, switching at a finite set of breakpoints.  Correlating two of
them against a relative shift gives a piecewise-linear curve whose slope
is a finite weighted sum of point evaluations -- an (even integer)/T at
every non-kink shift, never a harmonic function.  Everything in this
module is computed from the breakpoint geometry, with no sampling error.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi

# Breakpoints or kinks closer than this (relative to the period) are
# treated as coincident; their sign flips cancel pairwise.
MERGE_RTOL = 1e-12

# Slope queries closer than this (relative to the period) to a kink are
# rejected: only one-sided derivatives exist there.
KINK_RTOL = 1e-9


class PeriodMismatchError(ValueError):
    """Correlation of two functions with different periods."""


class KinkError(ValueError):
    """Slope requested at a kink, where the derivative is one-sided."""


def _wrap(x: float, period: float) -> float:
    # x % period can round up to period itself for tiny negative x
    r = x % period
    return r if r < period else 0.0


def _check_same_period(f: "DichotomicFunction", g: "DichotomicFunction") -> None:
    if abs(f.period - g.period) > MERGE_RTOL * max(f.period, g.period):
        raise PeriodMismatchError(
            f"periods differ: {f.period!r} vs {g.period!r}"
        )


@dataclass(frozen=True)
class DichotomicFunction:
    """T-periodic +-1 step function, right-continuous at its breakpoints.

    ``initial_sign`` is the value on the interval starting at
    ``breakpoints[0]``.  The breakpoint count must be even so the signal
    closes up over one period.
    """

    period: float
    breakpoints: tuple[float, ...]
    initial_sign: int = 1

    def __post_init__(self) -> None:
        if not (math.isfinite(self.period) and self.period > 0.0):
            raise ValueError(f"period must be positive and finite, got {self.period!r}")
        if self.initial_sign not in (1, -1):
            raise ValueError(f"initial_sign must be +1 or -1, got {self.initial_sign!r}")
        bps = tuple(float(b) for b in self.breakpoints)
        n = len(bps)
        if n < 2 or n % 2:
            raise ValueError(f"breakpoint count must be even and >= 2, got {n}")
        for b in bps:
            if not (0.0 <= b < self.period) or not math.isfinite(b):
                raise ValueError(f"breakpoint {b!r} outside [0, period)")
        gap = MERGE_RTOL * self.period
        for lo, hi in zip(bps, bps[1:]):
            if hi - lo <= gap:
                raise ValueError(f"breakpoints {lo!r} and {hi!r} coincide at tolerance {gap!r}")
        if (bps[0] + self.period) - bps[-1] <= gap:
            raise ValueError("first and last breakpoints coincide modulo the period")
        object.__setattr__(self, "breakpoints", bps)

    def eval(self, x: float) -> int:
        """Value at any real x; right-continuous, flips at each breakpoint."""
        k = bisect_right(self.breakpoints, _wrap(x, self.period))
        return self.initial_sign if k % 2 == 1 else -self.initial_sign

    def __call__(self, x: float) -> int:
        return self.eval(x)


@dataclass(frozen=True)
class ImpulseTrain:
    """Dirac-impulse representation of a dichotomic function's derivative.

    One impulse per breakpoint, weight +2 on a -1 -> +1 jump and -2 on the
    reverse; weights alternate in location order.
    """

    period: float
    impulses: tuple[tuple[float, int], ...]

    def __post_init__(self) -> None:
        if not (math.isfinite(self.period) and self.period > 0.0):
            raise ValueError(f"period must be positive and finite, got {self.period!r}")
        imps = tuple((float(x), int(w)) for x, w in self.impulses)
        for (x, w) in imps:
            if not (0.0 <= x < self.period):
                raise ValueError(f"impulse location {x!r} outside [0, period)")
            if abs(w) != 2:
                raise ValueError(f"impulse weight must be +-2, got {w!r}")
        for (_, w0), (_, w1) in zip(imps, imps[1:]):
            if w0 * w1 != -4:
                raise ValueError("impulse weights must alternate in sign")
        object.__setattr__(self, "impulses", imps)


@dataclass(frozen=True)
class CorrelationCurve:
    """Sampled correlation-vs-shift curve plus its slope-change locations."""

    shifts: tuple[float, ...]
    values: tuple[float, ...]
    kinks: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.shifts) != len(self.values):
            raise ValueError("shifts and values must have equal length")
        for v in self.values:
            if abs(v) > 1.0:
                raise ValueError(f"correlation value {v!r} outside [-1, 1]")


def make_square_wave(period: float, phase: float) -> DichotomicFunction:
    """Balanced square wave: +1 on [phase, phase + period/2), -1 on the rest."""
    if not (math.isfinite(period) and period > 0.0):
        raise ValueError(f"period must be positive and finite, got {period!r}")
    up = _wrap(phase, period)
    down = _wrap(phase + period / 2.0, period)
    if up < down:
        return DichotomicFunction(period, (up, down), initial_sign=1)
    return DichotomicFunction(period, (down, up), initial_sign=-1)


def correlate_exact(f: DichotomicFunction, g: DichotomicFunction, tau: float) -> float:
    """(1/T) * integral over one period of f(x - tau) g(x) dx, exactly.

    The integrand is piecewise constant between the merged breakpoints of
    the shifted f and of g, so the integral is a finite sum of
    sign-product * interval-length terms.  Accumulating only the mismatch
    length (where the product is -1) makes perfect correlation come out
    as exactly 1.0.
    """
    _check_same_period(f, g)
    period = g.period
    cuts = sorted({_wrap(b + tau, period) for b in f.breakpoints} | set(g.breakpoints))
    mismatch = 0.0
    for i, lo in enumerate(cuts):
        hi = cuts[i + 1] if i + 1 < len(cuts) else cuts[0] + period
        if hi <= lo:
            continue
        mid = 0.5 * (lo + hi)
        if f.eval(mid - tau) != g.eval(mid):
            mismatch += hi - lo
    value = 1.0 - 2.0 * (mismatch / period)
    return -1.0 if value < -1.0 else value


def pair_kinks(f: DichotomicFunction, g: DichotomicFunction) -> tuple[float, ...]:
    """Shifts where the correlation's slope changes.

    A kink occurs wherever a shifted breakpoint of f meets a breakpoint of
    g, i.e. at every (x_g - x_f) mod period, deduplicated at the merge
    tolerance.
    """
    _check_same_period(f, g)
    period = g.period
    diffs = sorted(_wrap(xg - xf, period) for xf in f.breakpoints for xg in g.breakpoints)
    tol = MERGE_RTOL * period
    kinks: list[float] = []
    for d in diffs:
        if not kinks or d - kinks[-1] > tol:
            kinks.append(d)
    if len(kinks) > 1 and (kinks[0] + period) - kinks[-1] <= tol:
        kinks.pop()
    return tuple(kinks)


def correlation_curve(
    f: DichotomicFunction, g: DichotomicFunction, n_samples: int
) -> CorrelationCurve:
    """Sample the exact correlation on a uniform shift grid over [0, period)."""
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    _check_same_period(f, g)
    period = g.period
    shifts = tuple(i * period / n_samples for i in range(n_samples))
    values = tuple(correlate_exact(f, g, t) for t in shifts)
    return CorrelationCurve(shifts=shifts, values=values, kinks=pair_kinks(f, g))


def derivative_impulses(f: DichotomicFunction) -> ImpulseTrain:
    """Distributional derivative of f as a train of +-2 Dirac impulses."""
    w0 = 2 * f.initial_sign
    impulses = tuple(
        (b, w0 if k % 2 == 0 else -w0) for k, b in enumerate(f.breakpoints)
    )
    return ImpulseTrain(period=f.period, impulses=impulses)


def correlation_slope(f: DichotomicFunction, g: DichotomicFunction, tau: float) -> float:
    """d/dtau of correlate_exact(f, g, tau) at a non-kink shift.

    Shifting moves f's jumps to b + tau, and the chain rule on the -tau
    argument contributes a factor of -1, so

        slope = -(1/T) * sum_k w_k * g(b_k + tau)

    with w_k the +-2 jump weights of f.  The sum is an even integer, so the
    slope is always (even integer)/T.  At a kink the two one-sided slopes
    differ and the query is rejected.
    """
    _check_same_period(f, g)
    period = g.period
    tol = KINK_RTOL * period
    for kink in pair_kinks(f, g):
        d = (tau - kink) % period
        if min(d, period - d) < tol:
            raise KinkError(
                f"shift {tau!r} is within {tol!r} of the kink at {kink!r}; "
                "only one-sided slopes exist there"
            )
    total = 0
    for b, w in derivative_impulses(f).impulses:
        total += w * g.eval(b + tau)
    return -total / period


def cosine_gap(f: DichotomicFunction, g: DichotomicFunction, n_samples: int) -> float:
    """Sup-norm distance, on a shift grid, between the exact correlation
    and the -cos reference curve.

    Strictly positive for every pair of balanced square waves: a
    piecewise-linear correlation cannot coincide with a harmonic one.
    Requires period 2*pi, where the reference is defined.
    """
    if n_samples < 100:
        raise ValueError(f"n_samples must be >= 100, got {n_samples}")
    for h in (f, g):
        if abs(h.period - TWO_PI) > 1e-12 * TWO_PI:
            raise ValueError(
                f"the -cos reference needs period 2*pi, got {h.period!r}"
            )
    _check_same_period(f, g)
    gap = 0.0
    for i in range(n_samples):
        tau = i * TWO_PI / n_samples
        gap = max(gap, abs(correlate_exact(f, g, tau) + math.cos(tau)))
    return gap
