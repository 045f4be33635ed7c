"""Deterministic local strategies, exact local-polytope membership and local bounds."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ._simplex import exact_feasible
from .model import OntologicalModel
from .scenario import BellFunctional, Phenomenon, Scenario, validate_phenomenon

DEFAULT_CAP = 10**6


class CapExceeded(ValueError):
    """The strategy count is above the enumeration cap."""


class NonRationalInput(TypeError):
    pass


@dataclass(frozen=True)
class DeterministicStrategy:
    """Outcome functions ``alpha[a]`` for Alice and ``beta[b]`` for Bob."""

    alpha: tuple
    beta: tuple

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(int(v) for v in self.alpha))
        object.__setattr__(self, "beta", tuple(int(v) for v in self.beta))

    def fits(self, s: Scenario) -> bool:
        return (len(self.alpha) == s.na and len(self.beta) == s.nb
                and all(0 <= v < s.ka for v in self.alpha)
                and all(0 <= v < s.kb for v in self.beta))


def strategy_count(s: Scenario) -> int:
    return s.ka ** s.na * s.kb ** s.nb


def _check_cap(s: Scenario, cap: int):
    count = strategy_count(s)
    if count > cap:
        raise CapExceeded(f"{count} deterministic strategies exceed the cap of {cap}")


def enumerate_strategies(s: Scenario, cap: int = DEFAULT_CAP) -> list[DeterministicStrategy]:
    """All ``ka**na * kb**nb`` strategies, Alice's function varying slowest."""
    _check_cap(s, cap)
    alphas = itertools.product(range(s.ka), repeat=s.na)
    betas = list(itertools.product(range(s.kb), repeat=s.nb))
    return [DeterministicStrategy(al, be) for al in alphas for be in betas]


def strategy_phenomenon(st: DeterministicStrategy, s: Scenario, preparation="c0") -> Phenomenon:
    if not st.fits(s):
        raise ValueError(f"strategy {st} does not fit scenario {s}")
    return Phenomenon.from_function(
        s, lambda a, b, A, B: int(A == st.alpha[a] and B == st.beta[b]), preparation)


def strategy_value(st: DeterministicStrategy, F: BellFunctional) -> Fraction:
    """``F`` evaluated on the strategy's 0/1 table, without building the table."""
    s = F.scenario
    return sum((F[a, b, st.alpha[a], st.beta[b]] for a, b in s.setting_pairs()), Fraction(0))


@dataclass(frozen=True)
class LocalDecomposition:
    """Convex weights over deterministic strategies."""

    scenario: Scenario
    strategies: tuple
    weights: tuple

    def __post_init__(self):
        weights = tuple(Fraction(w) for w in self.weights)
        strategies = tuple(self.strategies)
        if len(weights) != len(strategies):
            raise ValueError("one weight per strategy is required")
        if any(w < 0 for w in weights) or sum(weights) != 1:
            raise ValueError("weights must be nonnegative and sum to 1")
        for st in strategies:
            if not st.fits(self.scenario):
                raise ValueError(f"strategy {st} does not fit scenario {self.scenario}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "strategies", strategies)

    def mixture(self, preparation="c0") -> Phenomenon:
        s = self.scenario
        table = [Fraction(0)] * s.size
        for st, w in zip(self.strategies, self.weights):
            for a, b in s.setting_pairs():
                table[s.index(a, b, st.alpha[a], st.beta[b])] += w
        return Phenomenon(s, tuple(table), preparation)


def local_membership(p: Phenomenon, cap: int = DEFAULT_CAP) -> Optional[LocalDecomposition]:
    """Exact decomposition of ``p`` into deterministic strategies, if one exists.

    Solves ``sum_i w_i * strategy_i = p, w >= 0`` exactly. ``None`` means
    the system is infeasible, so ``p`` lies outside the local polytope.
    Strategies with zero weight are pruned from the result.
    """
    if not p.is_exact:
        raise NonRationalInput("local membership needs an exact rational table")
    problems = validate_phenomenon(p)
    if problems:
        raise ValueError(f"invalid phenomenon: {problems}")
    s = p.scenario
    strategies = enumerate_strategies(s, cap)
    A = [[0] * len(strategies) for _ in range(s.size)]
    for j, st in enumerate(strategies):
        for a, b in s.setting_pairs():
            A[s.index(a, b, st.alpha[a], st.beta[b])][j] = 1
    x = exact_feasible(A, p.table)
    if x is None:
        return None
    kept = [(st, w) for st, w in zip(strategies, x) if w]
    d = LocalDecomposition(s, tuple(st for st, _ in kept), tuple(w for _, w in kept))
    if d.mixture().table != p.table:
        raise AssertionError("simplex returned a decomposition that does not reproduce the input")
    return d


def local_bound(F: BellFunctional, cap: int = DEFAULT_CAP) -> Fraction:
    """Largest value of ``F`` over all deterministic local strategies."""
    return max(strategy_value(st, F) for st in enumerate_strategies(F.scenario, cap))


def decomposition_to_model(d: LocalDecomposition, c: str = "c0") -> OntologicalModel:
    """Hidden state ``i`` runs strategy ``i`` and has prior weight ``weights[i]``."""
    s = d.scenario
    kernel = {}
    for lam, st in enumerate(d.strategies):
        table = strategy_phenomenon(st, s)
        for a, b in s.setting_pairs():
            kernel[a, b, c, lam] = table.row(a, b)
    return OntologicalModel(s, len(d.strategies), {c: d.weights}, kernel)
