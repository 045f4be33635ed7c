"""Acceptance criteria 1-8, each at its stated tolerance and time budget.

Every test prints one ``PASS``/``FAIL`` line; run with ``-s`` (or read the
``-v`` summary) to see them.
"""

import itertools
import math
import time

import numpy as np
import pytest

from bellcert.model import (
    check_determinism,
    check_locality,
    reproduces,
    single_lambda_model,
)
from bellcert.montecarlo import chsh_estimate, estimate_phenomenon, signalling_test
from bellcert.polytope import enumerate_strategies, local_bound, local_membership
from bellcert.scenario import (
    CHSH_SCENARIO,
    Phenomenon,
    best_chsh_variant,
    check_signal_locality,
    chsh_functional,
    chsh_variants,
    evaluate_functional,
)
from bellcert.theorem import (
    certify_unpredictability,
    random_predictable_sl_model,
    verify_theorem_instance,
)
from bellcert.zoo import (
    OPTIMAL_CHSH_ANGLES,
    deterministic_nonlocal_model,
    planted_signalling_model,
    pr_box,
    predictable_model,
    random_no_signalling_table,
    rationalize,
    singlet_phenomenon,
)

from oracles import brute_force_local_bound, fine_local, two_qubit_probability


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail
    return emit


def test_criterion_1_local_bound(report):
    t0 = time.perf_counter()
    n_strategies = len(enumerate_strategies(CHSH_SCENARIO))
    bound = local_bound(chsh_functional())
    elapsed = time.perf_counter() - t0
    oracle = brute_force_local_bound(chsh_functional())
    ok = bound == 2 == oracle and n_strategies == 16 and elapsed < 1.0
    report(1, ok, f"local_bound(CHSH)={bound} (oracle {oracle}, {n_strategies} strategies) "
                  f"in {elapsed:.3f}s")


def test_criterion_2_pr_box(report):
    t0 = time.perf_counter()
    p = pr_box()
    sl = check_signal_locality(p).holds
    value = evaluate_functional(p, chsh_functional())
    membership = local_membership(p)
    cert = certify_unpredictability(p)
    elapsed = time.perf_counter() - t0
    ok = sl and value == 4 and membership is None and cert.observed_value == 4 and elapsed < 1.0
    report(2, ok, f"signal-local={sl}, CHSH={value}, membership="
                  f"{'none' if membership is None else 'some'}, certificate issued, "
                  f"{elapsed:.3f}s")


def test_criterion_3_singlet(report):
    value = evaluate_functional(singlet_phenomenon(*OPTIMAL_CHSH_ANGLES), chsh_functional())
    err = abs(abs(value) - 2 * math.sqrt(2))
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for ta, tb in rng.uniform(-math.pi, math.pi, size=(100, 2)):
        p = singlet_phenomenon([ta], [tb])
        for A in range(2):
            for B in range(2):
                worst = max(worst, abs(p[0, 0, A, B] - two_qubit_probability(ta, tb, A, B)))
    ok = err <= 1e-12 and worst <= 1e-12
    report(3, ok, f"|CHSH|={abs(value):.15f} (error {err:.1e}); "
                  f"max deviation from two-qubit oracle over 100 pairs {worst:.1e}")


def test_criterion_4_universal_determinization(report):
    tables = [pr_box()] + [random_no_signalling_table(np.random.default_rng(seed))
                           for seed in range(100)]
    failures, violating = [], 0
    for i, p in enumerate(tables):
        m = deterministic_nonlocal_model(p)
        if not (reproduces(m, p) and check_determinism(m)):
            failures.append(i)
        if best_chsh_variant(p)[1] > 2:
            violating += 1
            if check_locality(m):
                failures.append(i)
    report(4, not failures, f"{len(tables)} tables reproduced by deterministic models, "
                            f"{violating} Bell-violating ones all non-local; failures {failures}")


def test_criterion_5_theorem_property(report):
    t0 = time.perf_counter()
    counterexamples = [seed for seed in range(1000)
                       if not verify_theorem_instance(
                           random_predictable_sl_model(CHSH_SCENARIO, seed)).passed]
    elapsed = time.perf_counter() - t0
    ok = not counterexamples and elapsed < 30
    report(5, ok, f"1000 predictable signal-local models, counterexamples {counterexamples}, "
                  f"{elapsed:.2f}s")


def test_criterion_6_fine_cross_check(report):
    disagreements, nonlocal_count = [], 0
    for seed in range(500):
        p = random_no_signalling_table(np.random.default_rng(10_000 + seed))
        member = local_membership(p) is not None
        chsh_ok = all(evaluate_functional(p, F) <= 2 for F in chsh_variants())
        nonlocal_count += not member
        if member != chsh_ok or member != fine_local(p):
            disagreements.append(seed)
    report(6, not disagreements,
           f"500 tables ({nonlocal_count} non-local), disagreements {disagreements}")


def test_criterion_7_predictability_exhaustion(report):
    checked, bad = 0, []
    for cells in itertools.product(range(4), repeat=4):
        p = Phenomenon(CHSH_SCENARIO, tuple(int(i == cell) for cell in cells for i in range(4)))
        if not check_signal_locality(p).holds:
            continue
        checked += 1
        if predictable_model(p) is None:
            bad.append(cells)
        if any(abs(evaluate_functional(p, F)) > 2 for F in chsh_variants()):
            bad.append(cells)
    # a non-0/1 table has no predictable model
    if predictable_model(pr_box()) is not None:
        bad.append("pr-box")
    report(7, not bad and checked == 16,
           f"{checked} 0/1 no-signalling tables, all predictable with |CHSH| <= 2; "
           f"failures {bad}")


def test_criterion_8_monte_carlo(report):
    t0 = time.perf_counter()
    singlet = single_lambda_model(rationalize(singlet_phenomenon(*OPTIMAL_CHSH_ANGLES)))
    est = chsh_estimate(estimate_phenomenon(singlet, n_trials=10**6, seed=0))
    z = (est.value + 2 * math.sqrt(2)) / est.standard_error
    chsh_ok = abs(z) <= 3

    false_positives = sum(
        signalling_test(estimate_phenomenon(singlet, n_trials=10**6, seed=seed), 0.05).reject
        for seed in range(200))
    fpr = false_positives / 200
    fpr_ok = 0.02 <= fpr <= 0.08

    planted = planted_signalling_model()
    power = sum(signalling_test(estimate_phenomenon(planted, n_trials=1000, seed=seed), 0.05).reject
                for seed in range(200)) / 200
    power_ok = power >= 0.99
    elapsed = time.perf_counter() - t0
    ok = chsh_ok and fpr_ok and power_ok and elapsed < 120
    report(8, ok, f"CHSH estimate {est.value:.5f} +/- {est.standard_error:.5f} (z={z:.2f}); "
                  f"false-positive rate {fpr:.3f}; planted-signal power {power:.3f}; "
                  f"{elapsed:.1f}s")
