"""Input validation for the estimator wrappers."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .scenario import Phenomenon, Scenario, validate_phenomenon
from .zoo import rationalize


def check_scenario(na, nb, ka, kb) -> Scenario:
    try:
        return Scenario(int(na), int(nb), int(ka), int(kb))
    except (TypeError, ValueError) as exc:
        raise ValueError(f"invalid scenario ({na}, {nb}, {ka}, {kb}): {exc}") from exc


def check_records(X, s: Scenario) -> np.ndarray:
    """Integer array of shape ``(n, 4)`` with columns ``a, b, A, B`` in range."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] != 4:
        raise ValueError(f"run records must have shape (n, 4), got {X.shape}")
    if X.shape[0] == 0:
        raise ValueError("at least one run record is required")
    if not np.issubdtype(X.dtype, np.integer):
        if not np.all(np.equal(np.mod(X, 1), 0)):
            raise ValueError("run records must be integer indices")
        X = X.astype(np.int64)
    upper = np.array([s.na, s.nb, s.ka, s.kb])
    if (X < 0).any() or (X >= upper).any():
        raise ValueError(f"run record indices outside scenario {s}")
    return X


def check_tables(X, s: Scenario, exact: bool = True,
                 max_denominator: Optional[int] = None) -> list[Phenomenon]:
    """Rows of ``X`` as phenomena on ``s``; each row must be a valid table.

    ``X`` may be a list of :class:`Phenomenon` or a 2-D array-like of
    flattened tables. With ``exact=True`` float entries are refused unless
    ``max_denominator`` is given, in which case they are rationalized.
    """
    if isinstance(X, Phenomenon):
        X = [X]
    tables = []
    for i, row in enumerate(X):
        if isinstance(row, Phenomenon):
            p = row
            if p.scenario != s:
                raise ValueError(f"sample {i} is on {p.scenario}, expected {s}")
        else:
            values = list(np.asarray(row, dtype=object).ravel())
            if len(values) != s.size:
                raise ValueError(f"sample {i} has {len(values)} entries, expected {s.size}")
            p = Phenomenon(s, tuple(values))
        if exact and not p.is_exact:
            if max_denominator is None:
                raise ValueError(f"sample {i} has float entries; pass max_denominator "
                                 "to rationalize them")
            p = rationalize(p, max_denominator)
        problems = validate_phenomenon(p)
        if problems:
            raise ValueError(f"sample {i} is not a valid phenomenon: {problems}")
        tables.append(p)
    if not tables:
        raise ValueError("at least one sample is required")
    return tables
