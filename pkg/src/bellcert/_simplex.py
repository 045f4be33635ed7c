"""Exact feasibility of ``A x = b, x >= 0`` by a rational phase-one simplex."""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence


def exact_feasible(A: Sequence[Sequence], b: Sequence) -> Optional[list[Fraction]]:
    """Return a nonnegative exact solution of ``A x = b``, or None if none exists.

    Phase one of the simplex method with one artificial variable per row,
    Bland's rule for entering and leaving variables (so it terminates),
    and Fraction arithmetic throughout. Artificial columns are discarded
    once they leave the basis.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    rows = []
    rhs = []
    for i in range(m):
        row = [Fraction(v) for v in A[i]]
        bi = Fraction(b[i])
        if len(row) != n:
            raise ValueError("ragged constraint matrix")
        if bi < 0:
            row = [-v for v in row]
            bi = -bi
        rows.append(row)
        rhs.append(bi)
    if m == 0:
        return [Fraction(0)] * n

    # basis[i] >= n means the artificial variable of row basis[i] - n
    basis = [n + i for i in range(m)]
    # reduced costs of the original columns for min sum(artificials)
    reduced = [-sum(rows[i][j] for i in range(m)) for j in range(n)]
    objective = sum(rhs)

    while objective:
        entering = next((j for j in range(n) if reduced[j] < 0), None)
        if entering is None:
            break
        leaving = None
        best_ratio = None
        for i in range(m):
            coef = rows[i][entering]
            if coef > 0:
                ratio = rhs[i] / coef
                if (best_ratio is None or ratio < best_ratio
                        or (ratio == best_ratio and basis[i] < basis[leaving])):
                    best_ratio, leaving = ratio, i
        if leaving is None:
            # cannot happen: the phase-one objective is bounded below by 0
            raise RuntimeError("phase-one simplex reported an unbounded direction")
        _pivot(rows, rhs, reduced, leaving, entering)
        basis[leaving] = entering
        objective = sum(rhs[i] for i in range(m) if basis[i] >= n)

    if objective:
        return None
    x = [Fraction(0)] * n
    for i, var in enumerate(basis):
        if var < n:
            x[var] = rhs[i]
    return x


def _pivot(rows, rhs, reduced, r, j):
    pivot_row = rows[r]
    piv = pivot_row[j]
    if piv != 1:
        pivot_row[:] = [v / piv for v in pivot_row]
        rhs[r] /= piv
    nonzero = [k for k, v in enumerate(pivot_row) if v]
    for i, row in enumerate(rows):
        if i == r:
            continue
        f = row[j]
        if f:
            for k in nonzero:
                row[k] -= f * pivot_row[k]
            rhs[i] -= f * rhs[r]
    f = reduced[j]
    if f:
        for k in nonzero:
            reduced[k] -= f * pivot_row[k]
