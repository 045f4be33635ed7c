"""Global numeric settings shared by every module."""

import os
from fractions import Fraction

VERSION = "0.1.0"

ENV_TOLERANCE = "BELLCERT_TOLERANCE"

_DEFAULT_TOLERANCE = 1e-9


def parse_number(text):
    """Parse ``"p/q"``, an integer, or a decimal string into a Fraction.

    Decimal strings such as ``"1e-9"`` are converted exactly from their
    decimal expansion, not from a binary float.
    """
    text = str(text).strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def default_tolerance():
    """Comparison tolerance for the float path.

    Reads ``BELLCERT_TOLERANCE`` on every call so the CLI and tests can
    override it without re-importing.
    """
    raw = os.environ.get(ENV_TOLERANCE)
    if raw:
        return float(parse_number(raw))
    return _DEFAULT_TOLERANCE


def resolve_tolerance(tol):
    return default_tolerance() if tol is None else float(tol)
