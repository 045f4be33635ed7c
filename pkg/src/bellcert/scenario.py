"""Scenarios, phenomenon tables, marginals and Bell functionals.

A phenomenon is stored as a flat tuple indexed by ``(a, b, A, B)`` in
lexicographic order. Entries are either all :class:`fractions.Fraction`
(the exact path) or all ``float`` (the float path, compared with a
tolerance). Outcome index 0 is valued +1 and index 1 is valued -1 when
correlators are formed.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterator, Mapping, Optional, Sequence

from ._config import parse_number, resolve_tolerance


class ScenarioMismatch(ValueError):
    """Two objects built on different scenarios were combined."""


@dataclass(frozen=True)
class Scenario:
    """Numbers of settings (``na``, ``nb``) and outcomes (``ka``, ``kb``)."""

    na: int = 2
    nb: int = 2
    ka: int = 2
    kb: int = 2

    def __post_init__(self):
        for name in ("na", "nb", "ka", "kb"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise TypeError(f"{name} must be an int, got {value!r}")
        if self.na < 1 or self.nb < 1:
            raise ValueError("each party needs at least one setting")
        if self.ka < 2 or self.kb < 2:
            raise ValueError("each party needs at least two outcomes")

    @property
    def size(self) -> int:
        return self.na * self.nb * self.ka * self.kb

    @property
    def is_chsh(self) -> bool:
        return (self.na, self.nb, self.ka, self.kb) == (2, 2, 2, 2)

    def index(self, a: int, b: int, A: int, B: int) -> int:
        if not (0 <= a < self.na and 0 <= b < self.nb
                and 0 <= A < self.ka and 0 <= B < self.kb):
            raise IndexError(f"index {(a, b, A, B)} outside scenario {self}")
        return ((a * self.nb + b) * self.ka + A) * self.kb + B

    def keys(self) -> Iterator[tuple[int, int, int, int]]:
        return itertools.product(range(self.na), range(self.nb),
                                 range(self.ka), range(self.kb))

    def setting_pairs(self) -> Iterator[tuple[int, int]]:
        return itertools.product(range(self.na), range(self.nb))

    def to_dict(self) -> dict:
        return {"na": self.na, "nb": self.nb, "ka": self.ka, "kb": self.kb}


CHSH_SCENARIO = Scenario(2, 2, 2, 2)


def _coerce_entries(values: Sequence) -> tuple:
    """Return all-Fraction entries when every value is rational, else floats."""
    converted = []
    exact = True
    for v in values:
        if isinstance(v, bool):
            raise TypeError("booleans are not probabilities")
        if isinstance(v, (Fraction, int)) or isinstance(v, Rational):
            converted.append(Fraction(v))
        elif isinstance(v, str):
            converted.append(parse_number(v))
        else:
            converted.append(float(v))
            exact = False
    if exact:
        return tuple(converted)
    return tuple(float(v) for v in converted)


@dataclass(frozen=True)
class Phenomenon:
    """Relative frequencies ``f(A, B | a, b, c)`` for one preparation ``c``.

    Construction does not enforce nonnegativity or normalization so that
    malformed tables can still be reported on by
    :func:`validate_phenomenon`; only the table length is checked.
    """

    scenario: Scenario
    table: tuple
    preparation: str = "c0"

    def __post_init__(self):
        table = _coerce_entries(self.table)
        if len(table) != self.scenario.size:
            raise ValueError(
                f"table has {len(table)} entries, scenario needs {self.scenario.size}")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "preparation", str(self.preparation))

    @classmethod
    def from_mapping(cls, scenario: Scenario, mapping: Mapping, preparation="c0",
                     default=0) -> "Phenomenon":
        """Build from ``{(a, b, A, B): value}``; missing keys take ``default``."""
        table = [default] * scenario.size
        for key, value in mapping.items():
            table[scenario.index(*key)] = value
        return cls(scenario, tuple(table), preparation)

    @classmethod
    def from_function(cls, scenario: Scenario, fn: Callable[[int, int, int, int], object],
                      preparation="c0") -> "Phenomenon":
        return cls(scenario, tuple(fn(*k) for k in scenario.keys()), preparation)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.table)

    def __getitem__(self, key: tuple[int, int, int, int]):
        return self.table[self.scenario.index(*key)]

    def row(self, a: int, b: int) -> tuple:
        """The joint distribution over ``(A, B)`` at settings ``(a, b)``, flattened."""
        s = self.scenario
        start = s.index(a, b, 0, 0)
        return self.table[start:start + s.ka * s.kb]

    def to_float(self) -> "Phenomenon":
        return Phenomenon(self.scenario, tuple(float(v) for v in self.table),
                          self.preparation)

    def with_preparation(self, preparation: str) -> "Phenomenon":
        return Phenomenon(self.scenario, self.table, preparation)


def _close(x, y, tol: float) -> bool:
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x == y
    return abs(float(x) - float(y)) <= tol


def _is_zero(x, tol: float) -> bool:
    return _close(x, Fraction(0) if isinstance(x, Fraction) else 0.0, tol)


def validate_phenomenon(p: Phenomenon, tol: Optional[float] = None) -> list[str]:
    """List the violated invariants of ``p``; an empty list means valid."""
    tol = resolve_tolerance(tol)
    exact = p.is_exact
    problems = []
    for key in p.scenario.keys():
        v = p[key]
        if v < 0 and (exact or v < -tol):
            problems.append(f"nonnegative: entry {key} = {v}")
    for a, b in p.scenario.setting_pairs():
        total = sum(p.row(a, b), Fraction(0) if exact else 0.0)
        if not _close(total, Fraction(1) if exact else 1.0, tol):
            problems.append(f"normalization: settings {(a, b)} sum to {total}")
    return problems


def _check_settings(p: Phenomenon, a: int, b: int):
    s = p.scenario
    if not (0 <= a < s.na and 0 <= b < s.nb):
        raise IndexError(f"settings {(a, b)} outside scenario {s}")


def marginal_alice(p: Phenomenon, a: int, b: int) -> tuple:
    """Alice's outcome distribution ``P(A | a, b, c)``."""
    _check_settings(p, a, b)
    s = p.scenario
    return tuple(sum(p[a, b, A, B] for B in range(s.kb)) for A in range(s.ka))


def marginal_bob(p: Phenomenon, a: int, b: int) -> tuple:
    """Bob's outcome distribution ``P(B | a, b, c)``."""
    _check_settings(p, a, b)
    s = p.scenario
    return tuple(sum(p[a, b, A, B] for A in range(s.ka)) for B in range(s.kb))


@dataclass(frozen=True)
class SignallingWitness:
    """A remote-setting change that shifts a local marginal.

    ``party`` is the receiving side: for ``"alice"`` the coordinates are
    Alice's setting, Bob's two settings and Alice's outcome.
    """

    party: str
    local_setting: int
    remote_setting: int
    remote_setting_alt: int
    outcome: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.local_setting, self.remote_setting,
                self.remote_setting_alt, self.outcome)


@dataclass(frozen=True)
class SignalLocalityReport:
    holds: bool
    max_discrepancy: object
    witness: Optional[SignallingWitness] = None


def check_signal_locality(p: Phenomenon, tol: Optional[float] = None) -> SignalLocalityReport:
    """Check that each party's marginals ignore the remote setting.

    The witness is the first quadruple, in lexicographic order with
    Alice's side scanned before Bob's, attaining the maximal discrepancy.
    """
    tol = resolve_tolerance(tol)
    s = p.scenario
    zero = Fraction(0) if p.is_exact else 0.0
    best = zero
    witness = None

    alice = {(a, b): marginal_alice(p, a, b) for a, b in s.setting_pairs()}
    bob = {(a, b): marginal_bob(p, a, b) for a, b in s.setting_pairs()}

    for a in range(s.na):
        for b, b2 in itertools.combinations(range(s.nb), 2):
            for A in range(s.ka):
                gap = abs(alice[a, b][A] - alice[a, b2][A])
                if gap > best:
                    best, witness = gap, SignallingWitness("alice", a, b, b2, A)
    for b in range(s.nb):
        for a, a2 in itertools.combinations(range(s.na), 2):
            for B in range(s.kb):
                gap = abs(bob[a, b][B] - bob[a2, b][B])
                if gap > best:
                    best, witness = gap, SignallingWitness("bob", b, a, a2, B)

    holds = _is_zero(best, tol)
    return SignalLocalityReport(holds, best, None if holds else witness)


@dataclass(frozen=True)
class BellFunctional:
    """A linear functional ``sum coefficient(a, b, A, B) * f(A, B | a, b)``."""

    scenario: Scenario
    coefficients: tuple
    name: str = ""

    def __post_init__(self):
        coeffs = tuple(Fraction(c) if not isinstance(c, str) else parse_number(c)
                       for c in self.coefficients)
        if len(coeffs) != self.scenario.size:
            raise ValueError(
                f"functional has {len(coeffs)} coefficients, scenario needs {self.scenario.size}")
        object.__setattr__(self, "coefficients", coeffs)

    def __getitem__(self, key: tuple[int, int, int, int]) -> Fraction:
        return self.coefficients[self.scenario.index(*key)]

    def __neg__(self) -> "BellFunctional":
        name = self.name[1:] if self.name.startswith("-") else "-" + self.name
        return BellFunctional(self.scenario, tuple(-c for c in self.coefficients), name)

    @classmethod
    def zero(cls, scenario: Scenario) -> "BellFunctional":
        return cls(scenario, (0,) * scenario.size, "zero")


def evaluate_functional(p: Phenomenon, F: BellFunctional):
    """Value of ``F`` on ``p``: a Fraction for exact tables, else a float."""
    if p.scenario != F.scenario:
        raise ScenarioMismatch(f"phenomenon on {p.scenario}, functional on {F.scenario}")
    if p.is_exact:
        return sum((c * v for c, v in zip(F.coefficients, p.table) if c), Fraction(0))
    return float(sum(float(c) * v for c, v in zip(F.coefficients, p.table) if c))


def outcome_value(index: int) -> int:
    """The +/-1 valuation used by correlators."""
    return 1 if index == 0 else -1


def correlator(p: Phenomenon, a: int, b: int):
    """``E(a, b) = sum A*B f(A, B | a, b)`` with +/-1 valued outcomes."""
    if p.scenario.ka != 2 or p.scenario.kb != 2:
        raise ScenarioMismatch("correlators need two outcomes per party")
    return sum(outcome_value(A) * outcome_value(B) * p[a, b, A, B]
               for A in range(2) for B in range(2))


def chsh_functional() -> BellFunctional:
    """``S = E(0,0) + E(0,1) + E(1,0) - E(1,1)`` on the 2-2-2-2 scenario."""
    s = CHSH_SCENARIO

    def coeff(a, b, A, B):
        sign = -1 if (a, b) == (1, 1) else 1
        return sign * outcome_value(A) * outcome_value(B)

    return BellFunctional(s, tuple(coeff(*k) for k in s.keys()), "chsh")


@dataclass(frozen=True)
class Relabelling:
    """Permutations of settings and per-setting permutations of outcomes.

    ``alice_outcomes[a]`` maps Alice's outcome at (original) setting ``a``
    to its new label; likewise for Bob.
    """

    alice_settings: tuple
    bob_settings: tuple
    alice_outcomes: tuple
    bob_outcomes: tuple

    @classmethod
    def identity(cls, s: Scenario) -> "Relabelling":
        return cls(tuple(range(s.na)), tuple(range(s.nb)),
                   tuple(tuple(range(s.ka)) for _ in range(s.na)),
                   tuple(tuple(range(s.kb)) for _ in range(s.nb)))

    def apply_key(self, a, b, A, B):
        return (self.alice_settings[a], self.bob_settings[b],
                self.alice_outcomes[a][A], self.bob_outcomes[b][B])


def relabellings(s: Scenario) -> Iterator[Relabelling]:
    """Every relabelling of settings and outcomes (the full symmetry group)."""
    alice_outs = list(itertools.product(itertools.permutations(range(s.ka)), repeat=s.na))
    bob_outs = list(itertools.product(itertools.permutations(range(s.kb)), repeat=s.nb))
    for sa in itertools.permutations(range(s.na)):
        for sb in itertools.permutations(range(s.nb)):
            for oa in alice_outs:
                for ob in bob_outs:
                    yield Relabelling(sa, sb, oa, ob)


def _permute_table(s: Scenario, values: tuple, r: Relabelling) -> tuple:
    out = [None] * s.size
    for key in s.keys():
        out[s.index(*r.apply_key(*key))] = values[s.index(*key)]
    return tuple(out)


def relabel_phenomenon(p: Phenomenon, r: Relabelling) -> Phenomenon:
    return Phenomenon(p.scenario, _permute_table(p.scenario, p.table, r), p.preparation)


def relabel_functional(F: BellFunctional, r: Relabelling) -> BellFunctional:
    return BellFunctional(F.scenario, _permute_table(F.scenario, F.coefficients, r), F.name)


def _variant_name(F: BellFunctional) -> str:
    # name a CHSH-orbit member by the correlator carrying the odd sign
    signs = {}
    for a, b in CHSH_SCENARIO.setting_pairs():
        signs[a, b] = 1 if F[a, b, 0, 0] > 0 else -1
    # exactly one correlator differs from the other three
    odd = [k for k, v in signs.items() if list(signs.values()).count(v) == 1][0]
    overall = -signs[odd]
    return f"{'+' if overall > 0 else '-'}chsh[{odd[0]}{odd[1]}]"


@functools.lru_cache(maxsize=None)
def chsh_variants() -> tuple[BellFunctional, ...]:
    """The eight relabelled CHSH functionals, in a fixed order.

    Generated as the orbit of :func:`chsh_functional` under all setting
    and outcome relabellings, sorted by descending coefficient tuple so
    that the standard functional ``+chsh[11]`` comes first.
    """
    base = chsh_functional()
    orbit = {relabel_functional(base, r).coefficients
             for r in relabellings(CHSH_SCENARIO)}
    ordered = sorted(orbit, reverse=True)
    variants = []
    for coeffs in ordered:
        F = BellFunctional(CHSH_SCENARIO, coeffs)
        variants.append(BellFunctional(CHSH_SCENARIO, coeffs, _variant_name(F)))
    return tuple(variants)


def best_chsh_variant(p: Phenomenon) -> tuple[BellFunctional, object]:
    """The CHSH variant with the largest value on ``p``; first in order wins ties."""
    best = None
    for F in chsh_variants():
        value = evaluate_functional(p, F)
        if best is None or value > best[1]:
            best = (F, value)
    return best


def mix(p: Phenomenon, q: Phenomenon, weight) -> Phenomenon:
    """The convex combination ``weight * p + (1 - weight) * q``."""
    if p.scenario != q.scenario:
        raise ScenarioMismatch("cannot mix phenomena on different scenarios")
    if p.is_exact and q.is_exact:
        weight = Fraction(weight)
    else:
        weight = float(weight)
    return Phenomenon(p.scenario,
                      tuple(weight * x + (1 - weight) * y for x, y in zip(p.table, q.table)),
                      p.preparation)


def uniform_phenomenon(s: Scenario = CHSH_SCENARIO, preparation="c0") -> Phenomenon:
    v = Fraction(1, s.ka * s.kb)
    return Phenomenon(s, (v,) * s.size, preparation)
