"""Named phenomena and model constructions."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .model import OntologicalModel, single_lambda_model
from .polytope import NonRationalInput, enumerate_strategies, strategy_phenomenon
from .scenario import (
    CHSH_SCENARIO,
    Phenomenon,
    Scenario,
    outcome_value,
    uniform_phenomenon,
)

__all__ = [
    "pr_box",
    "pr_box_variants",
    "singlet_phenomenon",
    "singlet_phenomenon_exact",
    "OPTIMAL_CHSH_ANGLES",
    "deterministic_nonlocal_model",
    "predictable_model",
    "constant_outcome_model",
    "uniform_kernel_model",
    "signalling_table",
    "planted_signalling_model",
    "rationalize",
    "random_no_signalling_table",
    "uniform_phenomenon",
]

OPTIMAL_CHSH_ANGLES = ((0.0, math.pi / 2), (math.pi / 4, 7 * math.pi / 4))


def pr_box(preparation="c0") -> Phenomenon:
    """Popescu-Rohrlich box: ``A xor B = a * b`` with probability 1/2 per branch."""
    half = Fraction(1, 2)
    return Phenomenon.from_function(
        CHSH_SCENARIO, lambda a, b, A, B: half if (A ^ B) == a * b else 0, preparation)


def pr_box_variants(preparation="c0") -> list[Phenomenon]:
    """The eight nonlocal vertices ``A xor B = a*b xor x*a xor y*b xor z``."""
    half = Fraction(1, 2)
    boxes = []
    for x in (0, 1):
        for y in (0, 1):
            for z in (0, 1):
                boxes.append(Phenomenon.from_function(
                    CHSH_SCENARIO,
                    lambda a, b, A, B, x=x, y=y, z=z:
                        half if (A ^ B) == (a * b) ^ (x * a) ^ (y * b) ^ z else 0,
                    preparation))
    return boxes


def singlet_phenomenon(angles_a: Sequence[float], angles_b: Sequence[float],
                       preparation="c0") -> Phenomenon:
    """Spin-singlet statistics for coplanar projective measurements.

    ``f(A, B | a, b) = (1 - A*B*cos(theta_a - theta_b)) / 4`` with +/-1
    valued outcomes; entries are floats.
    """
    if not angles_a or not angles_b:
        raise ValueError("angle lists must be nonempty")
    s = Scenario(len(angles_a), len(angles_b), 2, 2)

    def entry(a, b, A, B):
        return (1.0 - outcome_value(A) * outcome_value(B)
                * math.cos(angles_a[a] - angles_b[b])) / 4.0

    return Phenomenon.from_function(s, entry, preparation)


def _rational_cosine(delta: float) -> Fraction:
    c = math.cos(delta)
    # the only rational cosines of rational multiples of pi
    for candidate in (Fraction(-1), Fraction(-1, 2), Fraction(0), Fraction(1, 2), Fraction(1)):
        if abs(c - float(candidate)) < 1e-12:
            return candidate
    raise ValueError(f"cos({delta}) = {c} is not rational")


def singlet_phenomenon_exact(angles_a: Sequence[float], angles_b: Sequence[float],
                             preparation="c0") -> Phenomenon:
    """Exact singlet table; every angle difference must have a rational cosine."""
    if not angles_a or not angles_b:
        raise ValueError("angle lists must be nonempty")
    s = Scenario(len(angles_a), len(angles_b), 2, 2)
    cos = {(a, b): _rational_cosine(angles_a[a] - angles_b[b]) for a, b in s.setting_pairs()}
    return Phenomenon.from_function(
        s, lambda a, b, A, B: (1 - outcome_value(A) * outcome_value(B) * cos[a, b]) / 4,
        preparation)


def deterministic_nonlocal_model(p: Phenomenon, c: Optional[str] = None) -> OntologicalModel:
    """A deterministic model reproducing any exact phenomenon.

    With ``D`` the least common multiple of the entry denominators, the
    hidden state is uniform on ``0 .. D-1``. For each setting pair the
    states are cut into consecutive blocks of size ``D * f(A, B | a, b)``
    in lexicographic ``(A, B)`` order, and each block outputs its pair.
    """
    if not p.is_exact:
        raise NonRationalInput("the deterministic completion needs exact entries")
    if any(v < 0 for v in p.table):
        raise ValueError("negative entries cannot be completed")
    c = p.preparation if c is None else c
    s = p.scenario
    D = math.lcm(*(v.denominator for v in p.table))
    width = s.ka * s.kb
    kernel = {}
    for a, b in s.setting_pairs():
        row = p.row(a, b)
        if sum(row) != 1:
            raise ValueError(f"settings {(a, b)} are not normalized")
        lam = 0
        for cell, v in enumerate(row):
            size = int(v * D)
            for _ in range(size):
                kernel[a, b, c, lam] = tuple(int(i == cell) for i in range(width))
                lam += 1
    return OntologicalModel(s, D, {c: (Fraction(1, D),) * D}, kernel)


def predictable_model(p: Phenomenon, c: Optional[str] = None) -> Optional[OntologicalModel]:
    """The one-state model with kernel ``p`` when ``p`` is 0/1, else None.

    A predictable model has a hidden-state independent 0/1 kernel, which
    then equals the phenomenon; so ``None`` here is exhaustive.
    """
    if not p.is_exact:
        raise NonRationalInput("predictable models need exact entries")
    if any(v not in (0, 1) for v in p.table):
        return None
    c = p.preparation if c is None else c
    return single_lambda_model(p.with_preparation(c))


def constant_outcome_model(s: Scenario = CHSH_SCENARIO, c="c0") -> OntologicalModel:
    """Both parties always report outcome index 0."""
    return single_lambda_model(Phenomenon.from_function(
        s, lambda a, b, A, B: int(A == 0 and B == 0), c))


def uniform_kernel_model(s: Scenario = CHSH_SCENARIO, c="c0") -> OntologicalModel:
    return single_lambda_model(uniform_phenomenon(s, c))


def signalling_table(shift=Fraction(1, 2), preparation="c0") -> Phenomenon:
    """2-2-2-2 table whose Alice marginal moves by ``shift`` when Bob changes setting.

    ``P(A=0 | a, b) = (1 + shift)/2`` at ``b = 0`` and ``(1 - shift)/2`` at
    ``b = 1``; Bob's outcome is uniform and independent. ``shift=1`` gives
    the maximally signalling table.
    """
    shift = Fraction(shift)
    if not 0 <= shift <= 1:
        raise ValueError("shift must lie in [0, 1]")

    def entry(a, b, A, B):
        p0 = (1 + shift) / 2 if b == 0 else (1 - shift) / 2
        return (p0 if A == 0 else 1 - p0) / 2

    return Phenomenon.from_function(CHSH_SCENARIO, entry, preparation)


def planted_signalling_model(shift=Fraction(1, 2), c="c0") -> OntologicalModel:
    return single_lambda_model(signalling_table(shift, c))


def rationalize(p: Phenomenon, max_denominator: int = 10**6) -> Phenomenon:
    """Exact approximation of a float table, normalized per setting pair.

    Each entry is replaced by its best rational approximation; the last
    entry of each row absorbs the rounding so rows sum to exactly 1.
    """
    if p.is_exact:
        return p
    s = p.scenario
    table = []
    for a, b in s.setting_pairs():
        row = [Fraction(v).limit_denominator(max_denominator) for v in p.row(a, b)]
        row[-1] = 1 - sum(row[:-1])
        if row[-1] < 0:
            raise ValueError(f"cannot rationalize settings {(a, b)} without a negative entry")
        table.extend(row)
    return Phenomenon(s, tuple(table), p.preparation)


def random_no_signalling_table(rng, max_vertices: int = 6, max_weight: int = 20,
                               preparation="c0") -> Phenomenon:
    """Random exact point of the 2-2-2-2 no-signalling polytope.

    Mixes a few of its 24 vertices (16 deterministic strategies and 8 PR
    boxes) with random integer weights, so both local and Bell-violating
    tables come out with useful frequency.
    """
    rng = np.random.default_rng(rng)
    vertices = [strategy_phenomenon(st, CHSH_SCENARIO) for st in enumerate_strategies(CHSH_SCENARIO)]
    vertices += pr_box_variants()
    k = int(rng.integers(1, max_vertices + 1))
    chosen = rng.choice(len(vertices), size=k, replace=False)
    weights = [int(w) for w in rng.integers(1, max_weight + 1, size=k)]
    total = sum(weights)
    table = [Fraction(0)] * CHSH_SCENARIO.size
    for idx, w in zip(chosen, weights):
        for i, v in enumerate(vertices[idx].table):
            if v:
                table[i] += Fraction(w, total) * v
    return Phenomenon(CHSH_SCENARIO, tuple(table), preparation)
