"""Polarization coincidence probabilities and classical Malus-law sources.

The correlation coefficient E = P++ + P-- - P+- - P-+ evaluated on the
textbook coincidence probabilities gives cos 2(a - b).  The same
coefficient evaluated on an explicit classical source -- a hidden
polarization axis shared by both photons, each side clicking
independently with Malus probability cos^2(axis - analyzer) -- gives
cos(2 delta)/2: the same shape at half the amplitude.  This module
computes both sides exactly and simulates the click experiments so the
factor-of-two gap is a measured number, not an assertion.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .lhv import Estimate
from .montecarlo import map_chunks

#: Polarization axes are identified modulo pi (axes, not directions).
AXIS_PERIOD = math.pi


@dataclass(frozen=True)
class CoincidenceProbabilities:
    """The four joint click probabilities; they must sum to 1."""

    p_pp: float
    p_mm: float
    p_pm: float
    p_mp: float

    def __post_init__(self) -> None:
        for name, p in self.as_dict().items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} = {p!r} outside [0, 1]")
        total = self.p_pp + self.p_mm + self.p_pm + self.p_mp
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    def as_dict(self) -> dict[str, float]:
        return {
            "p_pp": self.p_pp,
            "p_mm": self.p_mm,
            "p_pm": self.p_pm,
            "p_mp": self.p_mp,
        }


@dataclass(frozen=True)
class CoincidenceCounts:
    """Empirical joint click tallies from a simulated run."""

    n_pp: int
    n_mm: int
    n_pm: int
    n_mp: int
    n_total: int
    seed: int
    model: str

    def __post_init__(self) -> None:
        counts = (self.n_pp, self.n_mm, self.n_pm, self.n_mp)
        if any(c < 0 for c in counts):
            raise ValueError(f"counts must be non-negative, got {counts}")
        if sum(counts) != self.n_total:
            raise ValueError(
                f"counts {counts} sum to {sum(counts)}, not n_total = {self.n_total}"
            )

    def to_json(self) -> str:
        doc = {
            "n_pp": self.n_pp,
            "n_mm": self.n_mm,
            "n_pm": self.n_pm,
            "n_mp": self.n_mp,
            "n_total": self.n_total,
            "seed": self.seed,
            "model": self.model,
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "CoincidenceCounts":
        doc = json.loads(text)
        try:
            return cls(
                n_pp=int(doc["n_pp"]),
                n_mm=int(doc["n_mm"]),
                n_pm=int(doc["n_pm"]),
                n_mp=int(doc["n_mp"]),
                n_total=int(doc["n_total"]),
                seed=int(doc["seed"]),
                model=str(doc["model"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed coincidence-counts document: {exc}") from exc


@dataclass(frozen=True)
class SourceModel:
    """Classical pair source: a hidden axis lambda, uniform on [0, pi),
    fixes both photons' polarization axes through ``pair_law``.

    ``pair_law`` is numpy-vectorized and must return axes in [0, pi).
    """

    name: str
    pair_law: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def shared_axis_source() -> SourceModel:
    """Both photons polarized along the hidden axis itself."""

    def law(lam):
        axis = np.asarray(lam, dtype=float) % AXIS_PERIOD
        return axis, axis

    return SourceModel(name="shared_axis", pair_law=law)


def anticorrelated_source() -> SourceModel:
    """Second photon polarized at right angles to the first."""

    def law(lam):
        axis = np.asarray(lam, dtype=float) % AXIS_PERIOD
        return axis, (axis + 0.5 * math.pi) % AXIS_PERIOD

    return SourceModel(name="anticorrelated", pair_law=law)


def coincidence_probabilities(a: float, b: float) -> CoincidenceProbabilities:
    """Joint click probabilities at analyzer settings a and b:
    P++ = P-- = cos^2(a - b)/2 and P+- = P-+ = sin^2(a - b)/2."""
    concordant = 0.5 * math.cos(a - b) ** 2
    discordant = 0.5 * math.sin(a - b) ** 2
    return CoincidenceProbabilities(
        p_pp=concordant, p_mm=concordant, p_pm=discordant, p_mp=discordant
    )


def correlation_coefficient(p: CoincidenceProbabilities) -> float:
    """E = P++ + P-- - P+- - P-+ (equals cos 2(a-b) on the probabilities
    above)."""
    return p.p_pp + p.p_mm - p.p_pm - p.p_mp


def optical_correlation(a: float, b: float) -> float:
    """Closed form of the optical correlation coefficient: cos 2(a - b)."""
    return math.cos(2.0 * (a - b))


def malus_click_probability(axis: float, analyzer: float) -> float:
    """Malus transmission cos^2(axis - analyzer), read as a "+" click
    probability at minimal intensity."""
    return math.cos(axis - analyzer) ** 2


def classical_shared_lambda_E(delta: float) -> float:
    """Exact correlation of the shared-axis source at setting difference
    delta: the uniform-axis average of cos 2(lambda - a) * cos 2(lambda - b),
    which is cos(2 delta)/2 -- half the optical coefficient.

    The anticorrelated source gives the negative of this value.
    """
    return 0.5 * math.cos(2.0 * delta)


def simulate_coincidences(
    model: SourceModel,
    a: float,
    b: float,
    n: int,
    seed: int,
    workers: int = 1,
) -> CoincidenceCounts:
    """Click-level simulation of n photon pairs at analyzers (a, b).

    Per pair: a hidden axis uniform on [0, pi) fixes both polarization
    axes; each side then clicks "+" independently with its Malus
    probability.  Sampling follows the chunked Philox contract, so counts
    are deterministic for fixed (seed, n) and independent of ``workers``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")

    def one_chunk(rng: np.random.Generator, count: int) -> np.ndarray:
        lam = AXIS_PERIOD * rng.random(count)
        axis1, axis2 = model.pair_law(lam)
        u1 = rng.random(count)
        u2 = rng.random(count)
        plus1 = u1 < np.cos(axis1 - a) ** 2
        plus2 = u2 < np.cos(axis2 - b) ** 2
        return np.array(
            [
                int(np.sum(plus1 & plus2)),
                int(np.sum(~plus1 & ~plus2)),
                int(np.sum(plus1 & ~plus2)),
                int(np.sum(~plus1 & plus2)),
            ],
            dtype=np.int64,
        )

    totals = np.zeros(4, dtype=np.int64)
    for chunk_counts in map_chunks(n, seed, one_chunk, workers=workers):
        totals += chunk_counts
    return CoincidenceCounts(
        n_pp=int(totals[0]),
        n_mm=int(totals[1]),
        n_pm=int(totals[2]),
        n_mp=int(totals[3]),
        n_total=n,
        seed=seed,
        model=model.name,
    )


def estimate_E_from_counts(counts: CoincidenceCounts) -> Estimate:
    """Empirical correlation coefficient with its +-1-estimator standard
    error sqrt((1 - E^2)/n)."""
    if counts.n_total < 1:
        raise ValueError("cannot estimate a correlation from zero counts")
    value = (counts.n_pp + counts.n_mm - counts.n_pm - counts.n_mp) / counts.n_total
    return Estimate(
        value=value,
        std_error=math.sqrt(max(0.0, 1.0 - value * value) / counts.n_total),
        n_samples=counts.n_total,
        seed=counts.seed,
    )
