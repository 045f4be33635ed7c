from fractions import Fraction

import pytest
from hypothesis import given

from bellcert.model import (
    InvalidModel,
    OntologicalModel,
    PropertyReport,
    check_determinism,
    check_factorisability,
    check_locality,
    check_predictability,
    check_signal_locality_model,
    full_report,
    predicted_phenomenon,
    reproduces,
    single_lambda_model,
)
from bellcert.polytope import (
    DeterministicStrategy,
    LocalDecomposition,
    decomposition_to_model,
)
from bellcert.scenario import CHSH_SCENARIO, ScenarioMismatch, uniform_phenomenon
from bellcert.zoo import (
    constant_outcome_model,
    deterministic_nonlocal_model,
    planted_signalling_model,
    pr_box,
    uniform_kernel_model,
)

from strategies import decompositions, models

HALF = Fraction(1, 2)


@pytest.fixture
def pr_model():
    return deterministic_nonlocal_model(pr_box())


@pytest.fixture
def plus_minus_model():
    """Equal mixture of the all-(+) and all-(-) strategies."""
    d = LocalDecomposition(CHSH_SCENARIO,
                           (DeterministicStrategy((0, 0), (0, 0)),
                            DeterministicStrategy((1, 1), (1, 1))),
                           (HALF, HALF))
    return decomposition_to_model(d)


class TestConstruction:
    def test_prior_must_normalize(self):
        with pytest.raises(InvalidModel):
            OntologicalModel(CHSH_SCENARIO, 1, {"c0": (HALF,)}, {})

    def test_kernel_must_be_complete(self):
        with pytest.raises(InvalidModel, match="missing"):
            OntologicalModel(CHSH_SCENARIO, 1, {"c0": (1,)}, {(0, 0, "c0", 0): (1, 0, 0, 0)})

    def test_float_rejected(self):
        kernel = {(a, b, "c0", 0): (0.25,) * 4 for a in range(2) for b in range(2)}
        with pytest.raises(InvalidModel, match="exact"):
            OntologicalModel(CHSH_SCENARIO, 1, {"c0": (1,)}, kernel)

    def test_kernel_rows_normalized(self):
        kernel = {(a, b, "c0", 0): (HALF, 0, 0, 0) for a in range(2) for b in range(2)}
        with pytest.raises(InvalidModel, match="normalized"):
            OntologicalModel(CHSH_SCENARIO, 1, {"c0": (1,)}, kernel)

    def test_nested_kernel_rows_accepted(self):
        kernel = {(a, b, "c0", 0): ((1, 0), (0, 0)) for a in range(2) for b in range(2)}
        m = OntologicalModel(CHSH_SCENARIO, 1, {"c0": (1,)}, kernel)
        assert m == constant_outcome_model()


class TestPredictedPhenomenon:
    def test_single_lambda_uniform(self):
        assert predicted_phenomenon(uniform_kernel_model()) == uniform_phenomenon()

    def test_pr_model(self, pr_model):
        assert predicted_phenomenon(pr_model, "c0").table == pr_box().table

    def test_mixture_of_point_masses(self, plus_minus_model):
        p = predicted_phenomenon(plus_minus_model)
        for a in range(2):
            for b in range(2):
                assert p.row(a, b) == (HALF, 0, 0, HALF)

    def test_unknown_preparation(self, pr_model):
        with pytest.raises(KeyError):
            predicted_phenomenon(pr_model, "elsewhere")


class TestReproduces:
    def test_pr_model(self, pr_model):
        assert reproduces(pr_model, pr_box())
        assert not reproduces(pr_model, uniform_phenomenon())

    def test_float_target(self, pr_model):
        assert reproduces(pr_model, pr_box().to_float())

    def test_scenario_mismatch(self, pr_model):
        from bellcert.scenario import Scenario
        with pytest.raises(ScenarioMismatch):
            reproduces(pr_model, uniform_phenomenon(Scenario(3, 2, 2, 2)))

    @given(models())
    def test_reflexive(self, m):
        assert reproduces(m, predicted_phenomenon(m, "c0"))


class TestLocality:
    @given(decompositions())
    def test_local_decomposition_model(self, d):
        assert check_locality(decomposition_to_model(d))

    def test_pr_model_fails_at_lambda_zero(self, pr_model):
        result = check_locality(pr_model)
        assert not result
        w = result.witness
        assert (w["party"], w["lambda"], w["b"], w["a"], w["a_alt"]) == ("bob", 0, 1, 0, 1)
        # Bob's outcome at lambda=0, b=1 flips with Alice's setting
        assert pr_model.bob_given_lambda(0, 1, "c0", 0) != pr_model.bob_given_lambda(1, 1, "c0", 0)

    def test_single_lambda_signalling(self):
        assert not check_locality(planted_signalling_model())


class TestSignalLocalityModel:
    def test_pr_model(self, pr_model):
        assert check_signal_locality_model(pr_model)

    def test_signalling_model(self):
        result = check_signal_locality_model(planted_signalling_model())
        assert not result and result.witness["discrepancy"] == "1/2"

    @given(decompositions())
    def test_local_models(self, d):
        assert check_signal_locality_model(decomposition_to_model(d))


class TestDeterminism:
    def test_pr_model(self, pr_model):
        assert check_determinism(pr_model)

    def test_uniform_kernel(self):
        result = check_determinism(uniform_kernel_model())
        assert not result and result.witness["value"] == "1/4"

    @given(decompositions())
    def test_strategy_mixtures(self, d):
        assert check_determinism(decomposition_to_model(d))


class TestPredictability:
    def test_constant(self):
        assert check_predictability(constant_outcome_model())

    def test_pr_model(self, pr_model):
        result = check_predictability(pr_model)
        assert not result and result.witness["kind"] == "lambda-dependence"

    def test_uniform_kernel(self):
        result = check_predictability(uniform_kernel_model())
        assert not result and result.witness["kind"] == "fractional"

    def test_zero_prior_states_ignored(self):
        kernel = {}
        for a in range(2):
            for b in range(2):
                kernel[a, b, "c0", 0] = (1, 0, 0, 0)
                kernel[a, b, "c0", 1] = (0, 0, 0, 1)
        m = OntologicalModel(CHSH_SCENARIO, 2, {"c0": (1, 0)}, kernel)
        assert check_predictability(m)
        assert check_determinism(m)


class TestFactorisability:
    @given(decompositions())
    def test_local_decomposition(self, d):
        assert check_factorisability(decomposition_to_model(d))

    def test_single_lambda_pr_kernel(self):
        result = check_factorisability(single_lambda_model(pr_box()))
        assert not result
        w = result.witness
        assert (w["a"], w["b"], w["joint"], w["product"]) == (0, 0, "1/2", "1/4")

    def test_constant(self):
        assert check_factorisability(constant_outcome_model())

    def test_pr_model_products_need_local_marginals(self, pr_model):
        result = check_factorisability(pr_model)
        assert not result and result.witness["kind"] == "remote-dependence"


class TestFullReport:
    def test_pr_model(self, pr_model):
        r = full_report(pr_model, pr_box())
        assert (r.locality, r.signal_locality, r.determinism, r.predictability,
                r.factorisability) == (False, True, True, False, False)
        assert r.reproduces_target is True
        assert set(r.witnesses) == {"locality", "predictability", "factorisability"}

    def test_local_decomposition(self, plus_minus_model):
        r = full_report(plus_minus_model)
        assert (r.locality, r.signal_locality, r.determinism, r.predictability,
                r.factorisability) == (True, True, True, False, True)
        assert r.reproduces_target is None

    def test_constant(self):
        r = full_report(constant_outcome_model())
        assert all((r.locality, r.signal_locality, r.determinism, r.predictability,
                    r.factorisability))
        assert r.witnesses == {}

    def test_report_invariant(self):
        with pytest.raises(AssertionError):
            PropertyReport(True, True, False, True, True)

    def test_target_scenario_mismatch(self, pr_model):
        from bellcert.scenario import Scenario
        with pytest.raises(ScenarioMismatch):
            full_report(pr_model, uniform_phenomenon(Scenario(2, 3, 2, 2)))


class TestImplications:
    @given(models())
    def test_predictability_implies_determinism(self, m):
        if check_predictability(m):
            assert check_determinism(m)

    @given(models(deterministic=True))
    def test_locality_and_determinism_imply_factorisability(self, m):
        if check_locality(m) and check_determinism(m):
            assert check_factorisability(m)

    @given(decompositions())
    def test_locality_and_determinism_imply_factorisability_on_local_models(self, d):
        m = decomposition_to_model(d)
        assert check_locality(m) and check_determinism(m)
        assert check_factorisability(m)

    @given(models())
    def test_locality_implies_signal_locality(self, m):
        if check_locality(m):
            assert check_signal_locality_model(m)

    @given(models(max_lambdas=1))
    def test_single_lambda_collapse(self, m):
        assert bool(check_locality(m)) == bool(check_signal_locality_model(m))

    @given(models())
    def test_report_never_contradicts_itself(self, m):
        full_report(m)
