import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bellcert.polytope import enumerate_strategies, strategy_phenomenon
from bellcert.scenario import (
    CHSH_SCENARIO,
    BellFunctional,
    Phenomenon,
    Scenario,
    ScenarioMismatch,
    best_chsh_variant,
    check_signal_locality,
    chsh_functional,
    chsh_variants,
    correlator,
    evaluate_functional,
    marginal_alice,
    marginal_bob,
    mix,
    relabel_phenomenon,
    relabellings,
    uniform_phenomenon,
    validate_phenomenon,
)
from bellcert.zoo import OPTIMAL_CHSH_ANGLES, pr_box, signalling_table, singlet_phenomenon

from oracles import two_qubit_probability
from strategies import no_signalling_tables, rational_tables

HALF = Fraction(1, 2)


def point_mass_table():
    return Phenomenon.from_mapping(
        CHSH_SCENARIO, {(a, b, 0, 0): 1 for a in range(2) for b in range(2)})


class TestScenario:
    def test_rejects_single_outcome(self):
        with pytest.raises(ValueError):
            Scenario(2, 2, 1, 2)

    def test_rejects_zero_settings(self):
        with pytest.raises(ValueError):
            Scenario(0, 2, 2, 2)

    def test_index_is_lexicographic(self):
        s = Scenario(2, 3, 2, 2)
        assert [s.index(*k) for k in s.keys()] == list(range(s.size))

    def test_table_length_checked(self):
        with pytest.raises(ValueError):
            Phenomenon(CHSH_SCENARIO, (Fraction(1, 4),) * 15)


class TestValidate:
    def test_uniform_is_valid(self):
        assert validate_phenomenon(uniform_phenomenon()) == []

    def test_negative_entry(self):
        table = list(uniform_phenomenon().table)
        table[0] = Fraction(-1, 4)
        table[1] = Fraction(3, 4)
        problems = validate_phenomenon(Phenomenon(CHSH_SCENARIO, tuple(table)))
        assert any(p.startswith("nonnegative") for p in problems)
        assert not any(p.startswith("normalization") for p in problems)

    def test_row_sum_three_quarters(self):
        table = list(uniform_phenomenon().table)
        table[0] = Fraction(0)
        problems = validate_phenomenon(Phenomenon(CHSH_SCENARIO, tuple(table)))
        assert problems == ["normalization: settings (0, 0) sum to 3/4"]

    def test_float_within_tolerance(self):
        p = uniform_phenomenon().to_float()
        table = list(p.table)
        table[0] += 1e-12
        assert validate_phenomenon(Phenomenon(CHSH_SCENARIO, tuple(table))) == []

    def test_does_not_mutate(self):
        p = pr_box()
        before = p.table
        validate_phenomenon(p)
        assert p.table == before


class TestMarginals:
    def test_pr_box(self):
        p = pr_box()
        for a in range(2):
            for b in range(2):
                # sum the defining relation by hand: one B per A carries 1/2
                expected = tuple(sum(HALF for B in range(2) if (A ^ B) == a * b)
                                 for A in range(2))
                assert marginal_alice(p, a, b) == expected == (HALF, HALF)
                assert marginal_bob(p, a, b) == (HALF, HALF)

    def test_point_mass(self):
        assert marginal_alice(point_mass_table(), 0, 1) == (1, 0)

    def test_singlet(self):
        p = singlet_phenomenon(*OPTIMAL_CHSH_ANGLES)
        for a in range(2):
            for b in range(2):
                assert marginal_alice(p, a, b) == pytest.approx((0.5, 0.5), abs=1e-15)
                assert marginal_bob(p, a, b) == pytest.approx((0.5, 0.5), abs=1e-15)

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            marginal_alice(pr_box(), 2, 0)

    @given(rational_tables())
    def test_marginals_sum_to_one(self, p):
        for a, b in p.scenario.setting_pairs():
            assert sum(marginal_alice(p, a, b)) == 1
            assert sum(marginal_bob(p, a, b)) == 1


class TestSignalLocality:
    def test_pr_box(self):
        report = check_signal_locality(pr_box())
        assert report.holds and report.max_discrepancy == 0 and report.witness is None

    def test_maximal_signalling(self):
        report = check_signal_locality(signalling_table(1))
        assert not report.holds
        assert report.max_discrepancy == 1
        assert report.witness.party == "alice"
        assert report.witness.as_tuple() == (0, 0, 1, 0)

    def test_half_shift(self):
        report = check_signal_locality(signalling_table(HALF))
        assert report.max_discrepancy == HALF

    def test_bob_side_witness(self):
        # transpose of the signalling table: Bob's marginal follows Alice's setting
        src = signalling_table(1)
        p = Phenomenon.from_function(CHSH_SCENARIO, lambda a, b, A, B: src[b, a, B, A])
        report = check_signal_locality(p)
        assert report.witness.party == "bob"

    def test_singlet(self):
        assert check_signal_locality(singlet_phenomenon(*OPTIMAL_CHSH_ANGLES)).holds

    @settings(max_examples=50)
    @given(rational_tables(scenario=CHSH_SCENARIO), st.integers(0, 63))
    def test_invariant_under_relabelling(self, p, k):
        r = list(relabellings(CHSH_SCENARIO))[k]
        a, b = check_signal_locality(p), check_signal_locality(relabel_phenomenon(p, r))
        assert (a.holds, a.max_discrepancy) == (b.holds, b.max_discrepancy)


class TestFunctionals:
    def test_chsh_coefficients(self):
        F = chsh_functional()
        assert F[0, 0, 0, 0] == 1
        assert F[1, 1, 0, 0] == -1
        assert sum(1 for c in F.coefficients if c) == 16

    def test_chsh_pr_box(self):
        assert evaluate_functional(pr_box(), chsh_functional()) == 4

    def test_chsh_uniform(self):
        assert evaluate_functional(uniform_phenomenon(), chsh_functional()) == 0

    def test_chsh_singlet_matches_two_qubit_oracle(self):
        angles_a, angles_b = OPTIMAL_CHSH_ANGLES
        value = evaluate_functional(singlet_phenomenon(angles_a, angles_b), chsh_functional())
        oracle = Phenomenon.from_function(
            CHSH_SCENARIO,
            lambda a, b, A, B: two_qubit_probability(angles_a[a], angles_b[b], A, B))
        assert value == pytest.approx(-2 * math.sqrt(2), abs=1e-12)
        assert value == pytest.approx(evaluate_functional(oracle, chsh_functional()), abs=1e-12)

    def test_correlators_of_chsh(self):
        p = pr_box()
        E = {(a, b): correlator(p, a, b) for a in range(2) for b in range(2)}
        assert E[0, 0] + E[0, 1] + E[1, 0] - E[1, 1] == evaluate_functional(p, chsh_functional())

    def test_scenario_mismatch(self):
        with pytest.raises(ScenarioMismatch):
            evaluate_functional(uniform_phenomenon(Scenario(3, 2, 2, 2)), chsh_functional())

    def test_variants(self):
        variants = chsh_variants()
        assert len(variants) == 8
        assert len({F.coefficients for F in variants}) == 8
        assert variants[0].coefficients == chsh_functional().coefficients
        assert variants[0].name == "+chsh[11]"
        negated = (-chsh_functional()).coefficients
        assert negated in {F.coefficients for F in variants}

    def test_best_variant_on_singlet(self):
        F, value = best_chsh_variant(singlet_phenomenon(*OPTIMAL_CHSH_ANGLES))
        assert value == pytest.approx(2 * math.sqrt(2), abs=1e-12)

    def test_best_variant_tie_break(self):
        F, value = best_chsh_variant(uniform_phenomenon())
        assert value == 0 and F is chsh_variants()[0]

    @given(rational_tables(scenario=CHSH_SCENARIO), rational_tables(scenario=CHSH_SCENARIO),
           st.fractions(0, 1))
    def test_linear(self, p, q, mu):
        F = chsh_functional()
        lhs = evaluate_functional(mix(p, q, mu), F)
        assert lhs == mu * evaluate_functional(p, F) + (1 - mu) * evaluate_functional(q, F)

    def test_deterministic_strategies_bounded_by_two(self):
        values = {evaluate_functional(strategy_phenomenon(st_, CHSH_SCENARIO), F)
                  for F in chsh_variants() for st_ in enumerate_strategies(CHSH_SCENARIO)}
        assert max(abs(v) for v in values) == 2
        assert values <= {-2, 2}

    @given(no_signalling_tables())
    def test_no_signalling_generator(self, p):
        assert validate_phenomenon(p) == []
        assert check_signal_locality(p).holds

    def test_zero_functional(self):
        assert evaluate_functional(pr_box(), BellFunctional.zero(CHSH_SCENARIO)) == 0
