"""Discrete hidden-variable (ontological) models and their property checkers.

A model fixes a finite set of hidden states ``0 .. n_lambdas - 1``, a prior
over them for each preparation label, and a kernel giving the joint outcome
distribution for every ``(a, b, c, lambda)``. The prior takes no setting
arguments, so settings are independent of the hidden state by construction.
All probabilities are exact fractions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Optional

from .scenario import (
    Phenomenon,
    Scenario,
    ScenarioMismatch,
    check_signal_locality,
)
from ._config import parse_number, resolve_tolerance


class InvalidModel(ValueError):
    pass


def _frac(v) -> Fraction:
    if isinstance(v, str):
        return parse_number(v)
    if isinstance(v, float):
        raise InvalidModel(f"model probabilities must be exact, got float {v!r}")
    return Fraction(v)


@dataclass(frozen=True, eq=True)
class OntologicalModel:
    """Hidden-variable model with exact prior and kernel.

    ``prior[c]`` is a sequence of ``n_lambdas`` probabilities;
    ``kernel[a, b, c, lam]`` is the flattened ``(A, B)`` distribution in
    lexicographic order (length ``ka * kb``).
    """

    scenario: Scenario
    n_lambdas: int
    prior: Mapping[str, tuple]
    kernel: Mapping[tuple, tuple]

    __hash__ = None

    def __post_init__(self):
        s = self.scenario
        if self.n_lambdas < 1:
            raise InvalidModel("a model needs at least one hidden state")
        prior = {}
        for c, weights in self.prior.items():
            weights = tuple(_frac(w) for w in weights)
            if len(weights) != self.n_lambdas:
                raise InvalidModel(f"prior for {c!r} has {len(weights)} weights, "
                                   f"expected {self.n_lambdas}")
            if any(w < 0 for w in weights) or sum(weights) != 1:
                raise InvalidModel(f"prior for {c!r} is not a probability distribution")
            prior[str(c)] = weights
        if not prior:
            raise InvalidModel("a model needs at least one preparation")

        kernel = {}
        width = s.ka * s.kb
        for c in prior:
            for a, b in s.setting_pairs():
                for lam in range(self.n_lambdas):
                    try:
                        row = self.kernel[a, b, c, lam]
                    except KeyError:
                        raise InvalidModel(f"kernel missing entry {(a, b, c, lam)}") from None
                    row = tuple(_frac(v) for v in _flatten(row))
                    if len(row) != width:
                        raise InvalidModel(f"kernel row {(a, b, c, lam)} has {len(row)} "
                                           f"entries, expected {width}")
                    if any(v < 0 for v in row) or sum(row) != 1:
                        raise InvalidModel(f"kernel row {(a, b, c, lam)} is not normalized")
                    kernel[a, b, c, lam] = row
        object.__setattr__(self, "prior", MappingProxyType(prior))
        object.__setattr__(self, "kernel", MappingProxyType(kernel))

    @property
    def preparations(self) -> tuple[str, ...]:
        return tuple(self.prior)

    def support(self, c: str) -> tuple[int, ...]:
        return tuple(lam for lam, w in enumerate(self.prior[c]) if w)

    def entry(self, a, b, c, lam, A, B) -> Fraction:
        return self.kernel[a, b, c, lam][A * self.scenario.kb + B]

    def alice_given_lambda(self, a, b, c, lam) -> tuple:
        s = self.scenario
        row = self.kernel[a, b, c, lam]
        return tuple(sum(row[A * s.kb:(A + 1) * s.kb]) for A in range(s.ka))

    def bob_given_lambda(self, a, b, c, lam) -> tuple:
        s = self.scenario
        row = self.kernel[a, b, c, lam]
        return tuple(sum(row[A * s.kb + B] for A in range(s.ka)) for B in range(s.kb))

    def __eq__(self, other):
        if not isinstance(other, OntologicalModel):
            return NotImplemented
        return (self.scenario == other.scenario and self.n_lambdas == other.n_lambdas
                and dict(self.prior) == dict(other.prior)
                and dict(self.kernel) == dict(other.kernel))


def _flatten(row):
    out = []
    for v in row:
        if isinstance(v, (list, tuple)):
            out.extend(v)
        else:
            out.append(v)
    return out


def single_lambda_model(kernel_table: Phenomenon) -> OntologicalModel:
    """A model with one hidden state whose kernel is the given table."""
    if not kernel_table.is_exact:
        raise InvalidModel("single-state models need an exact table")
    s = kernel_table.scenario
    c = kernel_table.preparation
    kernel = {(a, b, c, 0): kernel_table.row(a, b) for a, b in s.setting_pairs()}
    return OntologicalModel(s, 1, {c: (1,)}, kernel)


@dataclass(frozen=True)
class Check:
    """Outcome of a property checker; truthy when the property holds."""

    holds: bool
    witness: Optional[dict] = None

    def __bool__(self):
        return self.holds


def predicted_phenomenon(m: OntologicalModel, c: Optional[str] = None) -> Phenomenon:
    """Average the kernel over the prior for preparation ``c``."""
    if c is None:
        c = m.preparations[0]
    if c not in m.prior:
        raise KeyError(f"unknown preparation {c!r}")
    s = m.scenario
    width = s.ka * s.kb
    support = m.support(c)
    table = []
    for a, b in s.setting_pairs():
        acc = [Fraction(0)] * width
        for lam in support:
            w = m.prior[c][lam]
            for i, v in enumerate(m.kernel[a, b, c, lam]):
                if v:
                    acc[i] += w * v
        table.extend(acc)
    return Phenomenon(s, tuple(table), c)


def reproduces(m: OntologicalModel, p: Phenomenon, tol: Optional[float] = None) -> bool:
    if m.scenario != p.scenario:
        raise ScenarioMismatch(f"model on {m.scenario}, phenomenon on {p.scenario}")
    predicted = predicted_phenomenon(m, p.preparation)
    if p.is_exact:
        return predicted.table == p.table
    tol = resolve_tolerance(tol)
    return all(abs(float(x) - y) <= tol for x, y in zip(predicted.table, p.table))


def check_locality(m: OntologicalModel) -> Check:
    """Outcome distributions at fixed hidden state ignore the remote setting."""
    for c in m.preparations:
        for lam in range(m.n_lambdas):
            w = _remote_dependence(m, c, lam)
            if w is not None:
                return Check(False, w)
    return Check(True)


def _remote_dependence(m: OntologicalModel, c: str, lam: int) -> Optional[dict]:
    s = m.scenario
    for a in range(s.na):
        ref = m.alice_given_lambda(a, 0, c, lam)
        for b in range(1, s.nb):
            cur = m.alice_given_lambda(a, b, c, lam)
            for A in range(s.ka):
                if cur[A] != ref[A]:
                    return {"party": "alice", "preparation": c, "lambda": lam,
                            "a": a, "b": 0, "b_alt": b, "A": A}
    for b in range(s.nb):
        ref = m.bob_given_lambda(0, b, c, lam)
        for a in range(1, s.na):
            cur = m.bob_given_lambda(a, b, c, lam)
            for B in range(s.kb):
                if cur[B] != ref[B]:
                    return {"party": "bob", "preparation": c, "lambda": lam,
                            "b": b, "a": 0, "a_alt": a, "B": B}
    return None


def check_signal_locality_model(m: OntologicalModel) -> Check:
    """Signal locality of the model, i.e. of every phenomenon it predicts."""
    for c in m.preparations:
        report = check_signal_locality(predicted_phenomenon(m, c))
        if not report.holds:
            w = report.witness
            return Check(False, {"party": w.party, "preparation": c,
                                 "local_setting": w.local_setting,
                                 "remote_setting": w.remote_setting,
                                 "remote_setting_alt": w.remote_setting_alt,
                                 "outcome": w.outcome,
                                 "discrepancy": str(report.max_discrepancy)})
    return Check(True)


def _entries(m: OntologicalModel, c: str, lambdas):
    s = m.scenario
    for a, b in s.setting_pairs():
        for lam in lambdas:
            yield a, b, lam, m.kernel[a, b, c, lam]


def check_determinism(m: OntologicalModel) -> Check:
    """Every kernel entry is 0 or 1."""
    s = m.scenario
    for c in m.preparations:
        for a, b, lam, row in _entries(m, c, range(m.n_lambdas)):
            for i, v in enumerate(row):
                if v not in (0, 1):
                    A, B = divmod(i, s.kb)
                    return Check(False, {"preparation": c, "lambda": lam, "a": a, "b": b,
                                         "A": A, "B": B, "value": str(v)})
    return Check(True)


def check_predictability(m: OntologicalModel) -> Check:
    """Kernel is 0/1 and the same for every hidden state the prior can produce.

    Hidden states with zero prior weight under ``c`` are ignored for ``c``.
    """
    s = m.scenario
    for c in m.preparations:
        support = m.support(c)
        for a, b in s.setting_pairs():
            ref_lam = support[0]
            ref = m.kernel[a, b, c, ref_lam]
            for lam in support:
                row = m.kernel[a, b, c, lam]
                for i, v in enumerate(row):
                    if v not in (0, 1):
                        A, B = divmod(i, s.kb)
                        return Check(False, {"kind": "fractional", "preparation": c,
                                             "lambda": lam, "a": a, "b": b,
                                             "A": A, "B": B, "value": str(v)})
                if row != ref:
                    return Check(False, {"kind": "lambda-dependence", "preparation": c,
                                         "lambda": ref_lam, "lambda_alt": lam,
                                         "a": a, "b": b})
    return Check(True)


def check_factorisability(m: OntologicalModel) -> Check:
    """Kernel equals ``P(A | a, c, lam) * P(B | b, c, lam)``.

    This needs both a product form at each ``(a, b)`` and local marginals
    that do not depend on the remote setting.
    """
    s = m.scenario
    for c in m.preparations:
        for lam in range(m.n_lambdas):
            for a, b in s.setting_pairs():
                pa = m.alice_given_lambda(a, b, c, lam)
                pb = m.bob_given_lambda(a, b, c, lam)
                row = m.kernel[a, b, c, lam]
                for A, B in itertools.product(range(s.ka), range(s.kb)):
                    if row[A * s.kb + B] != pa[A] * pb[B]:
                        return Check(False, {"kind": "correlation", "preparation": c,
                                             "lambda": lam, "a": a, "b": b, "A": A, "B": B,
                                             "joint": str(row[A * s.kb + B]),
                                             "product": str(pa[A] * pb[B])})
            w = _remote_dependence(m, c, lam)
            if w is not None:
                return Check(False, {"kind": "remote-dependence", **w})
    return Check(True)


@dataclass(frozen=True)
class PropertyReport:
    locality: bool
    signal_locality: bool
    determinism: bool
    predictability: bool
    factorisability: bool
    reproduces_target: Optional[bool] = None
    witnesses: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.predictability and not self.determinism:
            raise AssertionError("predictability without determinism is impossible")

    def to_dict(self) -> dict:
        return {
            "locality": self.locality,
            "signal_locality": self.signal_locality,
            "determinism": self.determinism,
            "predictability": self.predictability,
            "factorisability": self.factorisability,
            "reproduces_target": self.reproduces_target,
            "witnesses": self.witnesses,
        }


def full_report(m: OntologicalModel, target: Optional[Phenomenon] = None,
                tol: Optional[float] = None) -> PropertyReport:
    checks = {
        "locality": check_locality(m),
        "signal_locality": check_signal_locality_model(m),
        "determinism": check_determinism(m),
        "predictability": check_predictability(m),
        "factorisability": check_factorisability(m),
    }
    target_ok = None if target is None else reproduces(m, target, tol)
    witnesses = {name: chk.witness for name, chk in checks.items() if not chk.holds}
    return PropertyReport(**{k: v.holds for k, v in checks.items()},
                          reproduces_target=target_ok, witnesses=witnesses)
