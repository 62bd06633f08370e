"""Numerics for correlations of two-valued functions: exact dichotomic
correlation curves, local hidden-variable experiments with CHSH, n-party
product-correlation parity analysis, and classical Malus-law coincidence
models."""

from .dichotomic import (
    CorrelationCurve,
    DichotomicFunction,
    ImpulseTrain,
    KinkError,
    PeriodMismatchError,
    correlate_exact,
    correlation_curve,
    correlation_slope,
    cosine_gap,
    derivative_impulses,
    make_square_wave,
    pair_kinks,
)
from .lhv import (
    Estimate,
    HiddenVariableModel,
    bell_sgn_model,
    chsh,
    lhv_correlation_exact,
    lhv_correlation_mc,
    qm_correlation,
)
from .multiparty import (
    OutcomeArray,
    ParitySystem,
    ParityVerdict,
    PerfectCorrelationReport,
    achievable_values,
    build_ghz_parity_system,
    enumerate_parity,
    nearest_achievable,
    perfect_correlation_witness,
    solve_parity,
    triple_mean,
    verify_certificate,
    verify_witness,
)
from .optical import (
    CoincidenceCounts,
    CoincidenceProbabilities,
    SourceModel,
    anticorrelated_source,
    classical_shared_lambda_E,
    coincidence_probabilities,
    correlation_coefficient,
    estimate_E_from_counts,
    malus_click_probability,
    optical_correlation,
    shared_axis_source,
    simulate_coincidences,
)

__version__ = "0.1.0"

__all__ = [
    "CorrelationCurve",
    "DichotomicFunction",
    "ImpulseTrain",
    "KinkError",
    "PeriodMismatchError",
    "correlate_exact",
    "correlation_curve",
    "correlation_slope",
    "cosine_gap",
    "derivative_impulses",
    "make_square_wave",
    "pair_kinks",
    "Estimate",
    "HiddenVariableModel",
    "bell_sgn_model",
    "chsh",
    "lhv_correlation_exact",
    "lhv_correlation_mc",
    "qm_correlation",
    "OutcomeArray",
    "ParitySystem",
    "ParityVerdict",
    "PerfectCorrelationReport",
    "achievable_values",
    "build_ghz_parity_system",
    "enumerate_parity",
    "nearest_achievable",
    "perfect_correlation_witness",
    "solve_parity",
    "triple_mean",
    "verify_certificate",
    "verify_witness",
    "CoincidenceCounts",
    "CoincidenceProbabilities",
    "SourceModel",
    "anticorrelated_source",
    "classical_shared_lambda_E",
    "coincidence_probabilities",
    "correlation_coefficient",
    "estimate_E_from_counts",
    "malus_click_probability",
    "optical_correlation",
    "shared_axis_source",
    "simulate_coincidences",
]
