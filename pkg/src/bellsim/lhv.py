"""Hidden-variable correlation experiments and the CHSH combination.

The central object is the correlation of two +-1 responses over a shared
hidden variable lambda, uniform notation

    E(a, b) = integral of rho(lambda) A(a, lambda) B(b, lambda) dlambda

over lambda in [0, 2*pi), evaluated either by quadrature or by seeded
Monte Carlo.  The quantum reference curve to compare against is
-cos(a - b); the canonical local model family here (``bell_sgn_model``)
instead yields a correlation linear in the wrapped setting difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .montecarlo import map_chunks

TWO_PI = 2.0 * math.pi

#: lambda lives on this half-open interval for every model.
LAMBDA_DOMAIN = (0.0, TWO_PI)

_NORM_CHECK_PANELS = 1 << 15
_FALLBACK_PANELS = 100_000
_GAUSS_ORDER = 64


def _as_density_values(density, lam: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.asarray(density(lam), dtype=float), lam.shape)


def _density_integral(density) -> float:
    # composite Simpson; exact for the uniform density, ~1e-15 for smooth ones
    lo, hi = LAMBDA_DOMAIN
    xs = np.linspace(lo, hi, 2 * _NORM_CHECK_PANELS + 1)
    ys = _as_density_values(density, xs)
    h = (hi - lo) / (xs.size - 1)
    w = np.ones_like(xs)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float(np.sum(w * ys) * h / 3.0)


@lru_cache(maxsize=None)
def _gauss_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


@dataclass(frozen=True)
class HiddenVariableModel:
    """Local model (rho(lambda), A(a, lambda), B(b, lambda)) on [0, 2*pi).

    All callables are numpy-vectorized: they receive lambda arrays and
    broadcast over them.  Responses must return exactly +-1 (checked on a
    probe grid at construction; the density must integrate to 1 within
    1e-9).  ``sign_changes(a, b)``, when provided, lists the lambda values
    where either response flips, letting the exact quadrature subdivide
    there.  ``inverse_cdf`` maps uniforms on [0, 1) to lambda samples;
    models without one are sampled by rejection under ``density_bound``.
    """

    name: str
    density: Callable[[np.ndarray], np.ndarray]
    response_a: Callable[[float, np.ndarray], np.ndarray]
    response_b: Callable[[float, np.ndarray], np.ndarray]
    sign_changes: Callable[[float, float], Sequence[float]] | None = None
    inverse_cdf: Callable[[np.ndarray], np.ndarray] | None = None
    density_bound: float | None = None

    def __post_init__(self) -> None:
        total = _density_integral(self.density)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(
                f"density of {self.name!r} integrates to {total!r}, not 1"
            )
        probe = np.linspace(*LAMBDA_DOMAIN, num=257, endpoint=False)
        for setting in (0.0, 0.7, 2.3):
            for resp in (self.response_a, self.response_b):
                vals = np.asarray(resp(setting, probe))
                if not np.all(np.abs(vals) == 1):
                    raise ValueError(
                        f"responses of {self.name!r} must return exactly +-1"
                    )


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo estimate of a +-1-product mean.

    The standard error is the closed form sqrt((1 - value^2)/n) of a
    +-1-valued estimator, not a second-pass sample variance.
    """

    value: float
    std_error: float
    n_samples: int
    seed: int

    def __post_init__(self) -> None:
        if not -1.0 <= self.value <= 1.0:
            raise ValueError(f"estimate {self.value!r} outside [-1, 1]")
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        expected = math.sqrt(max(0.0, 1.0 - self.value**2) / self.n_samples)
        if abs(self.std_error - expected) > 1e-12:
            raise ValueError(
                f"std_error {self.std_error!r} inconsistent with value/n "
                f"(expected {expected!r})"
            )


def qm_correlation(a: float, b: float) -> float:
    """Quantum singlet correlation at analyzer settings a, b: -cos(a - b)."""
    return -math.cos(a - b)


def bell_sgn_model(phase_a: float = 0.0, phase_b: float = 0.0) -> HiddenVariableModel:
    """Canonical sign-readout local model.

    lambda is uniform on [0, 2*pi); A(a, lambda) = sgn cos(lambda - a) and
    B(b, lambda) = -sgn cos(lambda - b), with sgn(0) := +1.  Its exact
    correlation is piecewise linear in the setting difference,
    E(delta) = -1 + 2|wrap(delta)|/pi -- the classic straight-line
    contrast to the -cos quantum curve.  The optional phases offset each
    response, giving a family of equivalent models for tests.
    """

    def density(lam):
        return np.broadcast_to(1.0 / TWO_PI, np.shape(lam))

    def response_a(a, lam):
        return np.where(np.cos(np.asarray(lam) - a - phase_a) >= 0.0, 1, -1)

    def response_b(b, lam):
        return np.where(np.cos(np.asarray(lam) - b - phase_b) >= 0.0, -1, 1)

    def sign_changes(a, b):
        pts = []
        for centre in (a + phase_a, b + phase_b):
            pts.append((centre + 0.5 * math.pi) % TWO_PI)
            pts.append((centre + 1.5 * math.pi) % TWO_PI)
        return sorted(pts)

    def inverse_cdf(u):
        return TWO_PI * np.asarray(u)

    return HiddenVariableModel(
        name="bell_sgn",
        density=density,
        response_a=response_a,
        response_b=response_b,
        sign_changes=sign_changes,
        inverse_cdf=inverse_cdf,
        density_bound=1.0 / TWO_PI,
    )


def lhv_correlation_exact(model: HiddenVariableModel, a: float, b: float) -> float:
    """Quadrature value of the rho * A * B integral over the lambda domain.

    With published sign-change points the integrand is a smooth density
    times a constant sign on each subinterval; each gets 64-point
    Gauss-Legendre (absolute target 1e-7, exact for uniform densities).
    Without them, composite midpoint with 100000 panels; accuracy is then
    limited to O(1/panels) at response discontinuities.
    """
    lo, hi = LAMBDA_DOMAIN
    if model.sign_changes is None:
        n = _FALLBACK_PANELS
        mids = lo + (np.arange(n) + 0.5) * ((hi - lo) / n)
        vals = (
            _as_density_values(model.density, mids)
            * np.asarray(model.response_a(a, mids))
            * np.asarray(model.response_b(b, mids))
        )
        total = float(np.sum(vals) * ((hi - lo) / n))
    else:
        cuts = sorted(float(c) % TWO_PI for c in model.sign_changes(a, b))
        if not cuts:
            segments = [(lo, hi)]
        else:
            segments = list(zip(cuts, cuts[1:])) + [(cuts[-1], cuts[0] + TWO_PI)]
        nodes, weights = _gauss_nodes(_GAUSS_ORDER)
        total = 0.0
        for seg_lo, seg_hi in segments:
            if seg_hi - seg_lo <= 0.0:
                continue
            mid = np.asarray([(0.5 * (seg_lo + seg_hi)) % TWO_PI])
            sign = float(model.response_a(a, mid)[0] * model.response_b(b, mid)[0])
            half = 0.5 * (seg_hi - seg_lo)
            lam = (half * nodes + 0.5 * (seg_lo + seg_hi)) % TWO_PI
            rho = _as_density_values(model.density, lam)
            total += sign * half * float(np.sum(weights * rho))
    return min(1.0, max(-1.0, total))


def _draw_lambda(model: HiddenVariableModel, rng: np.random.Generator, count: int) -> np.ndarray:
    if model.inverse_cdf is not None:
        return np.asarray(model.inverse_cdf(rng.random(count)), dtype=float)
    if model.density_bound is None:
        raise ValueError(
            f"model {model.name!r} needs an inverse_cdf or a density_bound to sample"
        )
    lo, hi = LAMBDA_DOMAIN
    out = np.empty(count)
    filled = 0
    while filled < count:
        m = max(1024, 2 * (count - filled))
        lam = lo + (hi - lo) * rng.random(m)
        y = model.density_bound * rng.random(m)
        accepted = lam[y < _as_density_values(model.density, lam)]
        take = min(accepted.size, count - filled)
        out[filled : filled + take] = accepted[:take]
        filled += take
    return out


def lhv_correlation_mc(
    model: HiddenVariableModel,
    a: float,
    b: float,
    n: int,
    seed: int,
    workers: int = 1,
) -> Estimate:
    """Seeded Monte Carlo mean of A(a, lambda) * B(b, lambda).

    Deterministic for fixed (seed, n): lambda samples come from fixed
    chunks with one Philox stream per (seed, chunk index) and the chunk
    sums combine in chunk order, so the estimate never depends on
    ``workers``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")

    def one_chunk(rng: np.random.Generator, count: int) -> int:
        lam = _draw_lambda(model, rng, count)
        prod = np.asarray(model.response_a(a, lam)) * np.asarray(model.response_b(b, lam))
        return int(np.sum(prod, dtype=np.int64))

    total = 0
    for chunk_sum in map_chunks(n, seed, one_chunk, workers=workers):
        total += chunk_sum
    value = total / n
    return Estimate(
        value=value,
        std_error=math.sqrt(max(0.0, 1.0 - value * value) / n),
        n_samples=n,
        seed=seed,
    )


def chsh(
    evaluator: Callable[[float, float], float],
    a: float,
    a2: float,
    b: float,
    b2: float,
) -> float:
    """CHSH combination S = E(a,b) + E(a,b2) + E(a2,b) - E(a2,b2).

    |S| <= 2 for any correlation produced by a local hidden-variable model;
    the -cos quantum curve reaches 2*sqrt(2).
    """
    return evaluator(a, b) + evaluator(a, b2) + evaluator(a2, b) - evaluator(a2, b2)
