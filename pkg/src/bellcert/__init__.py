"""Exact tools for hidden-variable models, Bell inequalities and
certified unpredictability."""

from ._config import VERSION as __version__
from .estimators import FrequencyEstimator, LocalPolytopeClassifier
from .model import (
    Check,
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
from .montecarlo import (
    EmpiricalPhenomenon,
    RunRecord,
    chsh_estimate,
    estimate_phenomenon,
    sample_run,
    signalling_test,
    simulate_runs,
)
from .polytope import (
    DeterministicStrategy,
    LocalDecomposition,
    decomposition_to_model,
    enumerate_strategies,
    local_bound,
    local_membership,
    strategy_phenomenon,
)
from .scenario import (
    BellFunctional,
    Phenomenon,
    Scenario,
    check_signal_locality,
    chsh_functional,
    chsh_variants,
    evaluate_functional,
    marginal_alice,
    marginal_bob,
    validate_phenomenon,
)
from .theorem import (
    UnpredictabilityCertificate,
    certify_unpredictability,
    factorise_from_sl_predictability,
    random_predictable_sl_model,
    verify_theorem_instance,
)
from .zoo import (
    deterministic_nonlocal_model,
    pr_box,
    predictable_model,
    singlet_phenomenon,
)

__all__ = [
    "__version__",
    "FrequencyEstimator",
    "LocalPolytopeClassifier",
    "Check",
    "OntologicalModel",
    "PropertyReport",
    "check_determinism",
    "check_factorisability",
    "check_locality",
    "check_predictability",
    "check_signal_locality_model",
    "full_report",
    "predicted_phenomenon",
    "reproduces",
    "single_lambda_model",
    "EmpiricalPhenomenon",
    "RunRecord",
    "chsh_estimate",
    "estimate_phenomenon",
    "sample_run",
    "signalling_test",
    "simulate_runs",
    "DeterministicStrategy",
    "LocalDecomposition",
    "decomposition_to_model",
    "enumerate_strategies",
    "local_bound",
    "local_membership",
    "strategy_phenomenon",
    "BellFunctional",
    "Phenomenon",
    "Scenario",
    "check_signal_locality",
    "chsh_functional",
    "chsh_variants",
    "evaluate_functional",
    "marginal_alice",
    "marginal_bob",
    "validate_phenomenon",
    "UnpredictabilityCertificate",
    "certify_unpredictability",
    "factorise_from_sl_predictability",
    "random_predictable_sl_model",
    "verify_theorem_instance",
    "deterministic_nonlocal_model",
    "pr_box",
    "predictable_model",
    "singlet_phenomenon",
]
