"""Proof replay for "signal locality + predictability => Bell inequalities",
and unpredictability certificates for Bell-violating, non-signalling data.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from ._config import VERSION, resolve_tolerance
from .model import (
    OntologicalModel,
    check_predictability,
    check_signal_locality_model,
    predicted_phenomenon,
    single_lambda_model,
)
from .polytope import (
    DeterministicStrategy,
    local_bound,
    local_membership,
    strategy_phenomenon,
)
from .scenario import (
    BellFunctional,
    Phenomenon,
    Scenario,
    SignalLocalityReport,
    best_chsh_variant,
    check_signal_locality,
    chsh_variants,
    evaluate_functional,
    marginal_alice,
    marginal_bob,
    validate_phenomenon,
)

NO_PREDICTABLE_SIGNAL_LOCAL_MODEL = "NoPredictableSignalLocalModel"


class HypothesisFailed(ValueError):
    """A precondition of the factorisation argument does not hold."""

    def __init__(self, hypothesis: str, witness: Optional[dict]):
        super().__init__(f"{hypothesis} fails: {witness}")
        self.hypothesis = hypothesis
        self.witness = witness


class ProofStepFailed(AssertionError):
    """A step of the replayed argument does not hold on the concrete numbers."""


class SignalLocalityFails(ValueError):
    def __init__(self, report: SignalLocalityReport):
        super().__init__(f"phenomenon signals (discrepancy {report.max_discrepancy})")
        self.report = report


class NoViolation(ValueError):
    def __init__(self, value, bound):
        super().__init__(f"value {value} does not exceed the local bound {bound}")
        self.value = value
        self.bound = bound


@dataclass(frozen=True)
class Factorisation:
    """``P(A, B | a, b, c) = P(A | a, c) * P(B | b, c)`` for one preparation.

    ``alice[a]`` and ``bob[b]`` are the outcome distributions.
    """

    preparation: str
    alice: tuple
    bob: tuple
    trace: tuple = ()

    def product(self, s: Scenario) -> Phenomenon:
        return Phenomenon.from_function(
            s, lambda a, b, A, B: self.alice[a][A] * self.bob[b][B], self.preparation)


def factorise_from_sl_predictability(m: OntologicalModel) -> dict[str, Factorisation]:
    """Replay the factorisation argument on every preparation of ``m``.

    1. Predictability makes each outcome a function of ``(a, b, c)``, so
       the joint table equals the product of its two marginals.
    2. Signal locality removes the remote setting from each marginal.
    3. The product of the remote-free marginals rebuilds the table.

    Each step is asserted exactly; :class:`ProofStepFailed` would signal a
    bug, since the hypotheses are checked first.
    """
    sl = check_signal_locality_model(m)
    if not sl:
        raise HypothesisFailed("signal locality", sl.witness)
    pred = check_predictability(m)
    if not pred:
        raise HypothesisFailed("predictability", pred.witness)

    s = m.scenario
    result = {}
    for c in m.preparations:
        f = predicted_phenomenon(m, c)
        trace = []
        for a, b in s.setting_pairs():
            pa, pb = marginal_alice(f, a, b), marginal_bob(f, a, b)
            for A in range(s.ka):
                for B in range(s.kb):
                    if f[a, b, A, B] != pa[A] * pb[B]:
                        raise ProofStepFailed(
                            f"outcome independence fails at {(a, b, A, B)} for {c!r}")
        trace.append("predictability: P(A,B|a,b,c) = P(A|a,b,c) P(B|a,b,c)")

        alice = tuple(marginal_alice(f, a, 0) for a in range(s.na))
        bob = tuple(marginal_bob(f, 0, b) for b in range(s.nb))
        for a, b in s.setting_pairs():
            if marginal_alice(f, a, b) != alice[a] or marginal_bob(f, a, b) != bob[b]:
                raise ProofStepFailed(f"remote setting changes a marginal at {(a, b)} for {c!r}")
        trace.append("signal locality: P(A|a,b,c) = P(A|a,c), P(B|a,b,c) = P(B|b,c)")

        fac = Factorisation(c, alice, bob)
        if fac.product(s).table != f.table:
            raise ProofStepFailed(f"product of marginals differs from the table for {c!r}")
        trace.append("factorisable: P(A,B|a,b,c) = P(A|a,c) P(B|b,c)")
        result[c] = Factorisation(c, alice, bob, tuple(trace))
    return result


@dataclass
class Verdict:
    """Outcome of checking one instance of the theorem.

    ``status`` is ``"pass"``, ``"fail"`` or ``"hypotheses-not-met"``.
    """

    status: str
    signal_locality: bool
    predictability: bool
    trace: list = field(default_factory=list)
    membership: dict = field(default_factory=dict)
    chsh: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "hypotheses": {"signal_locality": self.signal_locality,
                           "predictability": self.predictability},
            "trace": list(self.trace),
            "membership": self.membership,
            "chsh": self.chsh,
        }


def verify_theorem_instance(m: OntologicalModel) -> Verdict:
    """Check the theorem's conclusion on ``m`` by two independent routes.

    When both hypotheses hold, the factorisation replay must succeed, the
    predicted phenomenon must lie in the local polytope, and on 2-2-2-2
    every CHSH variant must stay within its local bound. A failing
    hypothesis yields ``"hypotheses-not-met"`` with no judgement.
    """
    sl = bool(check_signal_locality_model(m))
    pred = bool(check_predictability(m))
    verdict = Verdict("pass", sl, pred)
    if not (sl and pred):
        verdict.status = "hypotheses-not-met"
        verdict.trace.append(
            "hypothesis failed: " + ", ".join(
                name for name, ok in (("signal locality", sl), ("predictability", pred))
                if not ok))
        return verdict

    ok = True
    try:
        factors = factorise_from_sl_predictability(m)
        verdict.trace.append("factorisation replay: ok")
    except ProofStepFailed as exc:
        factors = {}
        ok = False
        verdict.trace.append(f"factorisation replay: FAILED ({exc})")

    s = m.scenario
    for c in m.preparations:
        f = predicted_phenomenon(m, c)
        decomposition = local_membership(f)
        member = decomposition is not None
        verdict.membership[c] = member
        if member and c in factors:
            # both routes must agree on the same table
            ok &= factors[c].product(s).table == decomposition.mixture(c).table
        ok &= member
        verdict.trace.append(f"local polytope membership [{c}]: {'some' if member else 'none'}")
        if s.is_chsh:
            values = {F.name: evaluate_functional(f, F) for F in chsh_variants()}
            bound = local_bound(chsh_variants()[0])
            within = all(abs(v) <= bound for v in values.values())
            ok &= within
            verdict.chsh[c] = {name: str(v) for name, v in values.items()}
            verdict.trace.append(
                f"|CHSH| <= {bound} [{c}]: {'ok' if within else 'VIOLATED'}")
    verdict.status = "pass" if ok else "fail"
    return verdict


def random_predictable_sl_model(s: Scenario, seed, c: str = "c0") -> OntologicalModel:
    """One-state model running a uniformly random deterministic local strategy."""
    rng = np.random.default_rng(seed)
    alpha = rng.integers(0, s.ka, size=s.na)
    beta = rng.integers(0, s.kb, size=s.nb)
    st = DeterministicStrategy(tuple(alpha), tuple(beta))
    return single_lambda_model(strategy_phenomenon(st, s, c))


def _encode(v) -> object:
    return str(v) if isinstance(v, Fraction) else float(v)


def phenomenon_digest(p: Phenomenon) -> str:
    """SHA-256 over a canonical JSON rendering of the scenario and table."""
    payload = {
        "scenario": p.scenario.to_dict(),
        "preparation": p.preparation,
        "table": [_encode(v) for v in p.table],
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class UnpredictabilityCertificate:
    phenomenon_digest: str
    functional: BellFunctional
    local_bound: Fraction
    observed_value: object
    signal_locality_report: SignalLocalityReport
    tolerance: Optional[float] = None
    conclusion: str = NO_PREDICTABLE_SIGNAL_LOCAL_MODEL
    artifact_version: str = VERSION
    citation: tuple = (
        "predictability implies determinism and outcome independence",
        "signal locality removes the remote setting from each marginal",
        "predictable and signal-local models are factorisable",
        "factorisable models obey every Bell inequality",
        "observed value exceeds the local bound, so no predictable signal-local model exists",
    )

    def __post_init__(self):
        if not self.signal_locality_report.holds:
            raise ValueError("a certificate needs a non-signalling phenomenon")
        if isinstance(self.observed_value, Fraction):
            if not self.observed_value > self.local_bound:
                raise ValueError("observed value must exceed the local bound")
        elif not self.observed_value - float(self.local_bound) > 10 * (self.tolerance or 0.0):
            raise ValueError("observed value must exceed the local bound by 10 tolerances")


def certify_unpredictability(p: Phenomenon, F: Optional[BellFunctional] = None,
                             tol: Optional[float] = None) -> UnpredictabilityCertificate:
    """Certify that no predictable, signal-local model reproduces ``p``.

    Raises :class:`SignalLocalityFails` when ``p`` itself signals and
    :class:`NoViolation` when ``F`` (default: the best CHSH variant) does
    not exceed its local bound. Float tables need a margin above ten
    times the tolerance.
    """
    problems = validate_phenomenon(p, tol)
    if problems:
        raise ValueError(f"invalid phenomenon: {problems}")
    tol = resolve_tolerance(tol)
    report = check_signal_locality(p, tol)
    if not report.holds:
        raise SignalLocalityFails(report)
    if F is None:
        F, value = best_chsh_variant(p)
    else:
        value = evaluate_functional(p, F)
    bound = local_bound(F)
    if p.is_exact:
        if not value > bound:
            raise NoViolation(value, bound)
        cert_tol = None
    else:
        if not value - float(bound) > 10 * tol:
            raise NoViolation(value, bound)
        cert_tol = tol
    return UnpredictabilityCertificate(phenomenon_digest(p), F, bound, value, report, cert_tol)


def recheck_certificate(cert: UnpredictabilityCertificate, p: Phenomenon) -> bool:
    """Recompute every certificate field from ``p`` and compare."""
    if phenomenon_digest(p) != cert.phenomenon_digest:
        return False
    tol = cert.tolerance if cert.tolerance is not None else resolve_tolerance(None)
    report = check_signal_locality(p, tol)
    if not report.holds or report != cert.signal_locality_report:
        return False
    if local_bound(cert.functional) != cert.local_bound:
        return False
    value = evaluate_functional(p, cert.functional)
    if value != cert.observed_value:
        return False
    if p.is_exact:
        return value > cert.local_bound
    return value - float(cert.local_bound) > 10 * tol
