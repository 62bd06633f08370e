"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
report; every tolerance and runtime budget is pinned here.
"""

import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np

from bellsim import (
    OutcomeArray,
    achievable_values,
    bell_sgn_model,
    build_ghz_parity_system,
    chsh,
    correlate_exact,
    correlation_slope,
    cosine_gap,
    enumerate_parity,
    lhv_correlation_exact,
    lhv_correlation_mc,
    make_square_wave,
    pair_kinks,
    perfect_correlation_witness,
    qm_correlation,
    simulate_coincidences,
    solve_parity,
    triple_mean,
    verify_certificate,
    verify_witness,
    estimate_E_from_counts,
    classical_shared_lambda_E,
    optical_correlation,
    coincidence_probabilities,
    correlation_coefficient,
    anticorrelated_source,
    shared_axis_source,
)
from oracles import bell_sgn_closed_form, random_dichotomic, triangle

TWO_PI = 2.0 * math.pi


@contextmanager
def criterion(number, label, budget_s=None):
    start = time.perf_counter()
    try:
        yield
    except Exception:
        print(f"criterion {number} ({label}): FAIL")
        raise
    elapsed = time.perf_counter() - start
    print(f"criterion {number} ({label}): PASS ({elapsed:.2f}s)")
    if budget_s is not None:
        assert elapsed < budget_s, f"criterion {number} took {elapsed:.2f}s (budget {budget_s}s)"


def test_criterion_1_triangle_vs_cosine():
    with criterion(1, "triangle vs cosine", budget_s=1.0):
        f = make_square_wave(TWO_PI, 0.0)
        for k in range(1000):
            tau = k * TWO_PI / 1000.0
            assert abs(correlate_exact(f, f, tau) - triangle(tau)) <= 1e-12
        g = make_square_wave(TWO_PI, math.pi)
        assert cosine_gap(f, g, 1000) >= 0.2


def test_criterion_2_piecewise_linearity_and_slope():
    with criterion(2, "piecewise linearity + slope", budget_s=5.0):
        rng = np.random.default_rng(101)
        pairs = [(random_dichotomic(rng), random_dichotomic(rng)) for _ in range(20)]
        for f, g in pairs:
            kinks = list(pair_kinks(f, g))
            kinks.append(kinks[0] + TWO_PI)
            for lo, hi in zip(kinks, kinks[1:]):
                ts = [lo + (hi - lo) * q for q in (0.25, 0.5, 0.75)]
                second = (
                    correlate_exact(f, g, ts[0])
                    - 2.0 * correlate_exact(f, g, ts[1])
                    + correlate_exact(f, g, ts[2])
                )
                assert abs(second) <= 1e-9

        step = 1e-6
        checked = 0
        while checked < 100:
            f, g = pairs[checked % len(pairs)]
            tau = rng.uniform(0.0, TWO_PI)
            kinks = pair_kinks(f, g)
            if min(min((tau - k) % TWO_PI, (k - tau) % TWO_PI) for k in kinks) < 1e-4:
                continue
            slope = correlation_slope(f, g, tau)
            fd = (
                correlate_exact(f, g, tau + step) - correlate_exact(f, g, tau - step)
            ) / (2.0 * step)
            assert abs(slope - fd) <= 1e-4
            checked += 1


def test_criterion_3_lhv_correlation_and_chsh():
    with criterion(3, "hidden-variable correlation + CHSH", budget_s=30.0):
        model = bell_sgn_model()
        rng = np.random.default_rng(103)

        for _ in range(100):
            a, b = rng.uniform(0.0, TWO_PI, size=2)
            exact = lhv_correlation_exact(model, a, b)
            assert abs(exact - bell_sgn_closed_form(a - b)) <= 1e-6

        # 20 random (model, a, b) triples; half of them use phased variants
        for seed in range(20):
            a, b = rng.uniform(0.0, TWO_PI, size=2)
            if seed % 2:
                triple_model = bell_sgn_model(*rng.uniform(0.0, TWO_PI, size=2))
            else:
                triple_model = model
            est = lhv_correlation_mc(triple_model, a, b, 10**6, seed=seed)
            exact = lhv_correlation_exact(triple_model, a, b)
            assert abs(est.value - exact) <= 5.0 * max(est.std_error, 1e-12)

        def local_E(x, y):
            return lhv_correlation_exact(model, x, y)

        for _ in range(100):
            a, a2, b, b2 = rng.uniform(0.0, TWO_PI, size=4)
            assert abs(chsh(local_E, a, a2, b, b2)) <= 2.0 + 1e-6

        s_qm = chsh(qm_correlation, 0.0, math.pi / 2, math.pi / 4, -math.pi / 4)
        assert abs(abs(s_qm) - 2.0 * math.sqrt(2.0)) <= 1e-12


def test_criterion_4_lattice_and_perfect_correlation():
    with criterion(4, "product-mean lattice + perfect correlation", budget_s=1.0):
        rng = np.random.default_rng(107)
        for _ in range(200):
            parties = int(rng.integers(2, 5))
            n, m = int(rng.integers(1, 7)), int(rng.integers(1, 7))
            arr = OutcomeArray(rng.choice((-1, 1), size=(parties, n, m)))
            assert triple_mean(arr) in set(achievable_values(n, m))

        for target in (-1, 1):
            outcomes = rng.choice((-1, 1), size=(3, 4, 4))
            outcomes[2] = target * outcomes[0] * outcomes[1]
            arr = OutcomeArray(outcomes)
            assert triple_mean(arr) == Fraction(target)
            assert perfect_correlation_witness(arr, target).holds

            flipped = outcomes.copy()
            flipped[2, 1, 2] *= -1
            report = perfect_correlation_witness(OutcomeArray(flipped), target)
            assert not report.holds
            assert report.mean != Fraction(target)
            assert (1, 2) in report.violating_cells


def test_criterion_5_parity_solving():
    with criterion(5, "parity-system verdicts", budget_s=5.0):
        system = build_ghz_parity_system()
        solved = solve_parity(system)
        brute = enumerate_parity(system)
        assert not solved.satisfiable
        assert not brute.satisfiable
        assert solved.certificate == (0, 1, 2, 3)
        assert verify_certificate(system, solved.certificate)

        rng = np.random.default_rng(109)
        from bellsim import ParitySystem

        for i in range(100):
            n_vars = int(rng.integers(3, 17))
            variables = tuple(f"v{j}" for j in range(n_vars))
            planted = {v: int(rng.choice((-1, 1))) for v in variables}
            constraints = []
            for _ in range(int(rng.integers(1, 21))):
                size = int(rng.integers(1, n_vars + 1))
                vs = tuple(rng.choice(variables, size=size, replace=False))
                if i % 2 == 0:
                    product = 1
                    for v in vs:
                        product *= planted[v]
                else:
                    product = int(rng.choice((-1, 1)))
                constraints.append((vs, product))
            sys_i = ParitySystem(variables=variables, constraints=tuple(constraints))
            solved = solve_parity(sys_i)
            brute = enumerate_parity(sys_i)
            assert solved.satisfiable == brute.satisfiable
            if solved.satisfiable:
                assert verify_witness(sys_i, solved.witness)
                assert verify_witness(sys_i, brute.witness)
            else:
                assert verify_certificate(sys_i, solved.certificate)


def test_criterion_6_coincidence_probabilities():
    with criterion(6, "coincidence probabilities -> cos 2 delta"):
        for k in range(1000):
            delta = -math.pi + k * TWO_PI / 1000.0
            probs = coincidence_probabilities(delta, 0.0)
            total = probs.p_pp + probs.p_mm + probs.p_pm + probs.p_mp
            assert abs(total - 1.0) <= 1e-12
            combined = correlation_coefficient(probs)
            assert abs(combined - math.cos(2.0 * delta)) <= 1e-12


def test_criterion_7_classical_model_gap():
    with criterion(7, "classical Malus-model gap", budget_s=30.0):
        deltas = np.linspace(0.0, TWO_PI, 10001)
        gap = max(
            abs(optical_correlation(d, 0.0) - classical_shared_lambda_E(d))
            for d in deltas
        )
        assert abs(gap - 0.5) <= 1e-9

        rng = np.random.default_rng(113)
        for source, sign in ((shared_axis_source(), 1.0), (anticorrelated_source(), -1.0)):
            for seed in range(5):
                a, b = rng.uniform(0.0, math.pi, size=2)
                counts = simulate_coincidences(source, a, b, 10**6, seed=seed)
                est = estimate_E_from_counts(counts)
                expected = sign * classical_shared_lambda_E(a - b)
                assert abs(est.value - expected) <= 5.0 * est.std_error


def test_criterion_8_determinism():
    with criterion(8, "seeded operations are bit-identical"):
        model = bell_sgn_model()
        estimates = [
            lhv_correlation_mc(model, 0.8, 0.2, 200_000, seed=4242, workers=w)
            for w in (1, 4, 1, 4)
        ]
        assert all(e == estimates[0] for e in estimates)

        source = shared_axis_source()
        counts = [
            simulate_coincidences(source, 0.3, 1.0, 200_000, seed=4242, workers=w)
            for w in (1, 4, 1, 4)
        ]
        assert all(c == counts[0] for c in counts)
