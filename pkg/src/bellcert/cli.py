"""Command-line interface: ``bellcert <verb> ...`` with JSON on standard output.

Exit status is 0 on success, 1 on a domain outcome (no violation, a
signalling phenomenon, an infeasible decomposition, an invalid table, a
failed theorem instance) and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import io, model, montecarlo, polytope, scenario, theorem, zoo
from ._config import ENV_TOLERANCE, VERSION, default_tolerance, parse_number

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_MALFORMED = 2


def _read_json(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise io.SchemaError(f"cannot read {path}: {exc.strerror}") from exc
    return io.loads(text)


def _load_phenomenon(path):
    return io.phenomenon_from_json(_read_json(path))


def _load_model(path):
    return io.model_from_json(_read_json(path))


def _angle(text: str) -> float:
    """Radians, optionally written as a multiple of pi such as ``7pi/4``."""
    t = text.strip().replace(" ", "")
    if "pi" in t:
        head, _, tail = t.partition("pi")
        coeff = Fraction(1) if head in ("", "+") else Fraction(-1) if head == "-" else parse_number(head)
        if tail:
            if not tail.startswith("/"):
                raise argparse.ArgumentTypeError(f"bad angle {text!r}")
            coeff /= parse_number(tail[1:])
        return float(coeff) * math.pi
    try:
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad angle {text!r}") from None


def _rational(text: str) -> Fraction:
    try:
        return parse_number(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_validate(args):
    p = _load_phenomenon(args.phenomenon)
    problems = scenario.validate_phenomenon(p, args.tolerance)
    return (EXIT_OK if not problems else EXIT_DOMAIN), {"valid": not problems,
                                                        "violations": problems}


def cmd_analyze(args):
    m = _load_model(args.model)
    target = _load_phenomenon(args.target) if args.target else None
    report = model.full_report(m, target, args.tolerance)
    return EXIT_OK, io.report_to_json(report)


def cmd_chsh(args):
    p = _load_phenomenon(args.phenomenon)
    if not p.scenario.is_chsh:
        return EXIT_DOMAIN, {"error": "ScenarioMismatch",
                             "message": "CHSH needs the 2-2-2-2 scenario"}
    F, value = scenario.best_chsh_variant(p)
    values = {G.name: io.number_to_json(scenario.evaluate_functional(p, G))
              for G in scenario.chsh_variants()}
    return EXIT_OK, {
        "value": io.number_to_json(scenario.evaluate_functional(p, scenario.chsh_functional())),
        "best_variant": F.name,
        "best_value": io.number_to_json(value),
        "local_bound": str(polytope.local_bound(F)),
        "variants": values,
    }


def cmd_decompose(args):
    p = _load_phenomenon(args.phenomenon)
    if not p.is_exact:
        return EXIT_DOMAIN, {"error": "NonRationalInput",
                             "message": "decomposition needs \"p/q\" entries"}
    problems = scenario.validate_phenomenon(p)
    if problems:
        return EXIT_DOMAIN, {"error": "InvalidPhenomenon", "violations": problems}
    try:
        d = polytope.local_membership(p, args.cap)
    except polytope.CapExceeded as exc:
        return EXIT_DOMAIN, {"error": "CapExceeded", "message": str(exc)}
    if d is None:
        return EXIT_DOMAIN, {"infeasible": True,
                             "message": "no convex combination of deterministic local "
                                        "strategies reproduces the table (exact)"}
    return EXIT_OK, {"infeasible": False, "decomposition": io.decomposition_to_json(d)}


def cmd_certify(args):
    p = _load_phenomenon(args.phenomenon)
    F = None
    if args.functional:
        F = io.functional_from_json(_read_json(args.functional))
    elif args.variant:
        names = {G.name: G for G in scenario.chsh_variants()}
        if args.variant not in names:
            raise io.SchemaError(f"unknown variant; choose from {sorted(names)}", "--variant")
        F = names[args.variant]
    problems = scenario.validate_phenomenon(p, args.tolerance)
    if problems:
        return EXIT_DOMAIN, {"error": "InvalidPhenomenon", "violations": problems}
    try:
        cert = theorem.certify_unpredictability(p, F, args.tolerance)
    except theorem.SignalLocalityFails as exc:
        return EXIT_DOMAIN, {"error": "SignalLocalityFails",
                             "signal_locality_report": io.signal_locality_to_json(exc.report)}
    except theorem.NoViolation as exc:
        return EXIT_DOMAIN, {"error": "NoViolation",
                             "observed_value": io.number_to_json(exc.value),
                             "local_bound": str(exc.bound)}
    return EXIT_OK, io.certificate_to_json(cert)


ZOO_NAMES = (
    "pr-box", "singlet", "uniform", "signalling", "pr-model", "constant-model",
    "uniform-model", "planted-signalling-model", "random-predictable-model",
    "deterministic-model", "predictable-model",
)


def cmd_zoo(args):
    name = args.name
    if name == "pr-box":
        return EXIT_OK, io.phenomenon_to_json(zoo.pr_box(args.preparation))
    if name == "singlet":
        angles_a = args.angles_a or list(zoo.OPTIMAL_CHSH_ANGLES[0])
        angles_b = args.angles_b or list(zoo.OPTIMAL_CHSH_ANGLES[1])
        build = zoo.singlet_phenomenon_exact if args.exact else zoo.singlet_phenomenon
        try:
            p = build(angles_a, angles_b, args.preparation)
        except ValueError as exc:
            return EXIT_DOMAIN, {"error": "IrrationalCosine", "message": str(exc)}
        return EXIT_OK, io.phenomenon_to_json(p)
    if name == "uniform":
        return EXIT_OK, io.phenomenon_to_json(scenario.uniform_phenomenon(preparation=args.preparation))
    if name == "signalling":
        return EXIT_OK, io.phenomenon_to_json(zoo.signalling_table(args.shift, args.preparation))
    if name == "pr-model":
        m = zoo.deterministic_nonlocal_model(zoo.pr_box(args.preparation))
    elif name == "constant-model":
        m = zoo.constant_outcome_model(c=args.preparation)
    elif name == "uniform-model":
        m = zoo.uniform_kernel_model(c=args.preparation)
    elif name == "planted-signalling-model":
        m = zoo.planted_signalling_model(args.shift, args.preparation)
    elif name == "random-predictable-model":
        m = theorem.random_predictable_sl_model(scenario.CHSH_SCENARIO, args.seed, args.preparation)
    else:
        if not args.input:
            raise io.SchemaError(f"zoo {name} needs --input PHENOMENON", "--input")
        p = _load_phenomenon(args.input)
        if not p.is_exact:
            return EXIT_DOMAIN, {"error": "NonRationalInput",
                                 "message": f"zoo {name} needs \"p/q\" entries"}
        problems = scenario.validate_phenomenon(p)
        if problems:
            return EXIT_DOMAIN, {"error": "InvalidPhenomenon", "violations": problems}
        if name == "deterministic-model":
            m = zoo.deterministic_nonlocal_model(p)
        else:
            m = zoo.predictable_model(p)
            if m is None:
                return EXIT_DOMAIN, {"error": "NotPredictable",
                                     "message": "some entry is neither 0 nor 1"}
    return EXIT_OK, io.model_to_json(m)


def cmd_simulate(args):
    m = _load_model(args.model)
    c = args.preparation or m.preparations[0]
    if c not in m.prior:
        raise io.SchemaError(f"model has no preparation {c!r}", "--preparation")
    log = montecarlo.simulate_runs(m, c, args.policy, args.trials, args.seed, args.workers)
    e = montecarlo.EmpiricalPhenomenon(m.scenario, montecarlo.counts_from_log(log), c,
                                       log.metadata)
    if args.log:
        with open(args.log, "w") as fh:
            log.write(fh)
    out = {"empirical": io.empirical_to_json(e)}
    if (e.totals > 0).all():
        test = montecarlo.signalling_test(e, args.alpha)
        out["signalling_test"] = {
            "statistic": test.statistic, "threshold": test.threshold,
            "p_value": test.p_value, "reject": test.reject, "tests": list(test.tests)}
        if m.scenario.is_chsh:
            est = montecarlo.chsh_estimate(e)
            out["chsh"] = {"value": est.value, "standard_error": est.standard_error}
    return EXIT_OK, out


def cmd_verify_theorem(args):
    m = _load_model(args.model)
    verdict = theorem.verify_theorem_instance(m)
    return (EXIT_DOMAIN if verdict.status == "fail" else EXIT_OK), verdict.to_dict()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellcert",
        description="Exact checks of locality, predictability and Bell violations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    parser.add_argument("--tolerance", type=_rational, default=None,
                        help=f"float-path tolerance, e.g. 1/1000000000 "
                             f"(default from ${ENV_TOLERANCE} or 1e-9)")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("validate", help="check a phenomenon's invariants")
    p.add_argument("phenomenon")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="property report for a model")
    p.add_argument("model")
    p.add_argument("--target", help="phenomenon the model should reproduce")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("chsh", help="CHSH value and best variant")
    p.add_argument("phenomenon")
    p.set_defaults(func=cmd_chsh)

    p = sub.add_parser("decompose", help="exact local-polytope decomposition")
    p.add_argument("phenomenon")
    p.add_argument("--cap", type=int, default=polytope.DEFAULT_CAP)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("certify", help="issue an unpredictability certificate")
    p.add_argument("phenomenon")
    p.add_argument("--variant", help="CHSH variant name, e.g. +chsh[11]")
    p.add_argument("--functional", help="Bell functional JSON file")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("zoo", help="generate a named phenomenon or model")
    p.add_argument("name", choices=ZOO_NAMES)
    p.add_argument("--preparation", default="c0")
    p.add_argument("--angles-a", nargs="+", type=_angle)
    p.add_argument("--angles-b", nargs="+", type=_angle)
    p.add_argument("--exact", action="store_true",
                   help="exact singlet table (angle differences with rational cosine)")
    p.add_argument("--shift", type=_rational, default=Fraction(1, 2))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", help="phenomenon file for deterministic-/predictable-model")
    p.set_defaults(func=cmd_zoo)

    p = sub.add_parser("simulate", help="Monte Carlo run of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--preparation")
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", choices=montecarlo.POLICIES, default="uniform-random")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--log", help="write trial,a,b,A,B lines to this file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-theorem", help="check the theorem on a model")
    p.add_argument("model")
    p.set_defaults(func=cmd_verify_theorem)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tolerance is None:
        args.tolerance = default_tolerance()
    else:
        args.tolerance = float(args.tolerance)
    if getattr(args, "trials", 1) < 1:
        print(io.dumps({"error": "MalformedInput", "field": "--trials",
                        "message": "must be at least 1"}))
        return EXIT_MALFORMED
    try:
        status, payload = args.func(args)
    except io.SchemaError as exc:
        print(io.dumps({"error": "MalformedInput", "field": exc.field, "message": str(exc)}))
        return EXIT_MALFORMED
    print(io.dumps(payload))
    return status


if __name__ == "__main__":
    sys.exit(main())
