"""JSON readers and writers for phenomena, models, decompositions,
certificates and empirical tables.

Exact numbers are written as ``"p/q"`` strings and floats as JSON numbers.
Readers raise :class:`SchemaError` naming the offending field.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import numpy as np

from ._config import parse_number
from .model import InvalidModel, OntologicalModel, PropertyReport
from .montecarlo import EmpiricalPhenomenon
from .polytope import DeterministicStrategy, LocalDecomposition
from .scenario import BellFunctional, Phenomenon, Scenario, SignalLocalityReport
from .theorem import UnpredictabilityCertificate


class SchemaError(ValueError):
    """Input does not conform to a JSON schema; ``field`` locates the problem."""

    def __init__(self, message: str, field: str = ""):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2)


def number_to_json(v):
    if isinstance(v, Fraction):
        return str(v)
    return float(v)


def number_from_json(v, field: str):
    if isinstance(v, bool):
        raise SchemaError("expected a number, got a boolean", field)
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        try:
            return parse_number(v)
        except ValueError as exc:
            raise SchemaError(str(exc), field) from exc
    raise SchemaError(f"expected a number or \"p/q\" string, got {type(v).__name__}", field)


def _require(obj, key, field_prefix=""):
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", field_prefix or "<root>")
    if key not in obj:
        raise SchemaError("missing field", f"{field_prefix}.{key}" if field_prefix else key)
    return obj[key]


def scenario_from_json(obj, field="scenario") -> Scenario:
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", field)
    values = {}
    for key in ("na", "nb", "ka", "kb"):
        v = _require(obj, key, field)
        if not isinstance(v, int) or isinstance(v, bool):
            raise SchemaError("expected an integer", f"{field}.{key}")
        values[key] = v
    try:
        return Scenario(**values)
    except (TypeError, ValueError) as exc:
        raise SchemaError(str(exc), field) from exc


def _parse_key(key: str, n: int, field: str) -> tuple:
    try:
        parts = tuple(int(x) for x in key.split(","))
    except ValueError:
        raise SchemaError(f"bad key {key!r}", field) from None
    if len(parts) != n:
        raise SchemaError(f"key {key!r} needs {n} comma-separated indices", field)
    return parts


def _checked_index(s: Scenario, idx: tuple, field: str) -> int:
    try:
        return s.index(*idx)
    except IndexError as exc:
        raise SchemaError(str(exc), field) from None


def phenomenon_to_json(p: Phenomenon) -> dict:
    return {
        "scenario": p.scenario.to_dict(),
        "preparation": p.preparation,
        "table": {",".join(map(str, k)): number_to_json(p[k]) for k in p.scenario.keys()},
    }


def phenomenon_from_json(obj) -> Phenomenon:
    s = scenario_from_json(_require(obj, "scenario"))
    table = _require(obj, "table")
    if not isinstance(table, dict):
        raise SchemaError("expected an object keyed by \"a,b,A,B\"", "table")
    values = {}
    for key, v in table.items():
        idx = _parse_key(key, 4, f"table[{key!r}]")
        _checked_index(s, idx, f"table[{key!r}]")
        values[idx] = number_from_json(v, f"table[{key!r}]")
    missing = [k for k in s.keys() if k not in values]
    if missing:
        raise SchemaError(f"missing entries, e.g. {','.join(map(str, missing[0]))}", "table")
    preparation = obj.get("preparation", "c0")
    if not isinstance(preparation, str):
        raise SchemaError("expected a string", "preparation")
    return Phenomenon.from_mapping(s, values, preparation)


def model_to_json(m: OntologicalModel) -> dict:
    s = m.scenario
    kernel = {}
    for (a, b, c, lam), row in m.kernel.items():
        kernel[f"{a},{b},{c},{lam}"] = [[str(row[A * s.kb + B]) for B in range(s.kb)]
                                        for A in range(s.ka)]
    return {
        "scenario": s.to_dict(),
        "lambdas": m.n_lambdas,
        "prior": {c: [str(w) for w in weights] for c, weights in m.prior.items()},
        "kernel": kernel,
    }


def model_from_json(obj) -> OntologicalModel:
    s = scenario_from_json(_require(obj, "scenario"))
    n = _require(obj, "lambdas")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError("expected a positive integer", "lambdas")
    prior_obj = _require(obj, "prior")
    if not isinstance(prior_obj, dict):
        raise SchemaError("expected an object keyed by preparation", "prior")
    prior = {}
    for c, weights in prior_obj.items():
        if not isinstance(weights, list):
            raise SchemaError("expected a list", f"prior[{c!r}]")
        prior[c] = [_exact(w, f"prior[{c!r}][{i}]") for i, w in enumerate(weights)]
    kernel_obj = _require(obj, "kernel")
    if not isinstance(kernel_obj, dict):
        raise SchemaError("expected an object keyed by \"a,b,c,lambda\"", "kernel")
    kernel = {}
    for key, rows in kernel_obj.items():
        parts = key.split(",")
        if len(parts) != 4:
            raise SchemaError("key needs a,b,c,lambda", f"kernel[{key!r}]")
        try:
            a, b, lam = int(parts[0]), int(parts[1]), int(parts[3])
        except ValueError:
            raise SchemaError("setting and lambda indices must be integers",
                              f"kernel[{key!r}]") from None
        if not isinstance(rows, list):
            raise SchemaError("expected a list", f"kernel[{key!r}]")
        flat = []
        for r in rows:
            flat.extend(r if isinstance(r, list) else [r])
        kernel[a, b, parts[2], lam] = [_exact(v, f"kernel[{key!r}]") for v in flat]
    try:
        return OntologicalModel(s, n, prior, kernel)
    except InvalidModel as exc:
        raise SchemaError(str(exc), "kernel" if "kernel" in str(exc) else "prior") from exc


def _exact(v, field):
    value = number_from_json(v, field)
    if not isinstance(value, Fraction):
        raise SchemaError("model probabilities must be exact \"p/q\" strings", field)
    return value


def decomposition_to_json(d: LocalDecomposition) -> dict:
    return {
        "scenario": d.scenario.to_dict(),
        "strategies": [{"alpha": list(st.alpha), "beta": list(st.beta)} for st in d.strategies],
        "weights": [str(w) for w in d.weights],
    }


def decomposition_from_json(obj) -> LocalDecomposition:
    s = scenario_from_json(_require(obj, "scenario"))
    strategies = []
    for i, st in enumerate(_require(obj, "strategies")):
        strategies.append(DeterministicStrategy(_require(st, "alpha", f"strategies[{i}]"),
                                                _require(st, "beta", f"strategies[{i}]")))
    weights = [_exact(w, f"weights[{i}]") for i, w in enumerate(_require(obj, "weights"))]
    try:
        return LocalDecomposition(s, tuple(strategies), tuple(weights))
    except ValueError as exc:
        raise SchemaError(str(exc), "weights") from exc


def functional_to_json(F: BellFunctional) -> dict:
    return {
        "name": F.name,
        "scenario": F.scenario.to_dict(),
        "coefficients": {",".join(map(str, k)): str(F[k]) for k in F.scenario.keys()},
    }


def functional_from_json(obj) -> BellFunctional:
    s = scenario_from_json(_require(obj, "scenario"))
    coeffs = _require(obj, "coefficients")
    values = [Fraction(0)] * s.size
    for key, v in coeffs.items():
        idx = _parse_key(key, 4, f"coefficients[{key!r}]")
        values[_checked_index(s, idx, f"coefficients[{key!r}]")] = _exact(v, f"coefficients[{key!r}]")
    return BellFunctional(s, tuple(values), obj.get("name", ""))


def signal_locality_to_json(r: SignalLocalityReport) -> dict:
    w = r.witness
    return {
        "holds": r.holds,
        "max_discrepancy": number_to_json(r.max_discrepancy),
        "witness": None if w is None else {
            "party": w.party, "local_setting": w.local_setting,
            "remote_setting": w.remote_setting, "remote_setting_alt": w.remote_setting_alt,
            "outcome": w.outcome},
    }


def certificate_to_json(cert: UnpredictabilityCertificate) -> dict:
    # field order is fixed so that the serialized form can be hashed
    return {
        "artifact_version": cert.artifact_version,
        "conclusion": cert.conclusion,
        "phenomenon_digest": cert.phenomenon_digest,
        "functional": functional_to_json(cert.functional),
        "local_bound": str(cert.local_bound),
        "observed_value": number_to_json(cert.observed_value),
        "tolerance": cert.tolerance,
        "signal_locality_report": signal_locality_to_json(cert.signal_locality_report),
        "citation": list(cert.citation),
    }


def certificate_from_json(obj) -> UnpredictabilityCertificate:
    sl = _require(obj, "signal_locality_report")
    report = SignalLocalityReport(bool(_require(sl, "holds", "signal_locality_report")),
                                  number_from_json(sl.get("max_discrepancy", "0"),
                                                   "signal_locality_report.max_discrepancy"),
                                  None)
    return UnpredictabilityCertificate(
        phenomenon_digest=_require(obj, "phenomenon_digest"),
        functional=functional_from_json(_require(obj, "functional")),
        local_bound=_exact(_require(obj, "local_bound"), "local_bound"),
        observed_value=number_from_json(_require(obj, "observed_value"), "observed_value"),
        signal_locality_report=report,
        tolerance=obj.get("tolerance"),
        conclusion=_require(obj, "conclusion"),
        artifact_version=obj.get("artifact_version", ""),
    )


def report_to_json(r: PropertyReport) -> dict:
    return r.to_dict()


def empirical_to_json(e: EmpiricalPhenomenon) -> dict:
    """Phenomenon schema with float frequencies plus ``counts`` and ``metadata``."""
    s = e.scenario
    out = phenomenon_to_json(e.frequencies()) if (e.totals > 0).all() else {
        "scenario": s.to_dict(), "preparation": e.preparation, "table": None}
    out["counts"] = {",".join(map(str, k)): int(e.counts[k]) for k in s.keys()}
    out["metadata"] = dict(e.metadata)
    return out


def empirical_from_json(obj) -> EmpiricalPhenomenon:
    s = scenario_from_json(_require(obj, "scenario"))
    counts_obj = _require(obj, "counts")
    counts = np.zeros((s.na, s.nb, s.ka, s.kb), dtype=np.int64)
    for key, v in counts_obj.items():
        idx = _parse_key(key, 4, f"counts[{key!r}]")
        _checked_index(s, idx, f"counts[{key!r}]")
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise SchemaError("expected a nonnegative integer", f"counts[{key!r}]")
        counts[idx] = v
    return EmpiricalPhenomenon(s, counts, obj.get("preparation", "c0"), obj.get("metadata", {}))
