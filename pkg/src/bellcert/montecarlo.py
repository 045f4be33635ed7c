"""Finite-sample simulation of experiments on ontological models.

Sampling is two-stage: draw the hidden state from the prior, then the
outcome pair from the kernel. Randomness comes from numpy's PCG64; trials
are generated in fixed-size chunks, chunk ``i`` using child ``i`` of
``SeedSequence(seed)``, so results do not depend on how chunks are
scheduled across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
from scipy import stats

from .model import OntologicalModel
from .scenario import Phenomenon, Scenario, ScenarioMismatch

GENERATOR_NAME = "numpy.random.PCG64"
CHUNK_SIZE = 1 << 16
POLICIES = ("uniform-random", "round-robin")


class EmptyCells(ValueError):
    """Some setting pair was never measured."""


@dataclass(frozen=True)
class RunRecord:
    trial: int
    a: int
    b: int
    A: int
    B: int

    def to_line(self) -> str:
        return f"{self.trial},{self.a},{self.b},{self.A},{self.B}"


@dataclass(frozen=True, eq=False)
class RunLog:
    """Settings and outcomes of every trial, as parallel integer arrays."""

    scenario: Scenario
    a: np.ndarray
    b: np.ndarray
    A: np.ndarray
    B: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.a)

    def records(self) -> Iterator[RunRecord]:
        for t, row in enumerate(zip(self.a.tolist(), self.b.tolist(),
                                    self.A.tolist(), self.B.tolist())):
            yield RunRecord(t, *row)

    def write(self, fh) -> None:
        """Write ``trial,a,b,A,B`` lines behind a ``#``-prefixed metadata header."""
        for key in sorted(self.metadata):
            fh.write(f"# {key}={self.metadata[key]}\n")
        fh.write("trial,a,b,A,B\n")
        for rec in self.records():
            fh.write(rec.to_line() + "\n")


@dataclass(frozen=True, eq=False)
class EmpiricalPhenomenon:
    """Outcome counts per ``(a, b, A, B)``; totals are derived from them."""

    scenario: Scenario
    counts: np.ndarray
    preparation: str = "c0"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        s = self.scenario
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (s.na, s.nb, s.ka, s.kb):
            raise ValueError(f"counts shape {counts.shape} does not match {s}")
        if (counts < 0).any():
            raise ValueError("counts must be nonnegative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def totals(self) -> np.ndarray:
        return self.counts.sum(axis=(2, 3))

    @property
    def n_trials(self) -> int:
        return int(self.counts.sum())

    def _require_totals(self):
        if (self.totals == 0).any():
            empty = [tuple(int(i) for i in ix) for ix in np.argwhere(self.totals == 0)]
            raise EmptyCells(f"no trials at settings {empty}")

    def frequencies(self) -> Phenomenon:
        """Relative frequencies as a float phenomenon."""
        self._require_totals()
        freq = self.counts / self.totals[:, :, None, None]
        return Phenomenon(self.scenario, tuple(freq.ravel().tolist()), self.preparation)

    def standard_errors(self) -> np.ndarray:
        """``sqrt(f (1 - f) / n)`` per cell, shaped like ``counts``."""
        self._require_totals()
        n = self.totals[:, :, None, None]
        f = self.counts / n
        return np.sqrt(f * (1 - f) / n)

    def __eq__(self, other):
        if not isinstance(other, EmpiricalPhenomenon):
            return NotImplemented
        return (self.scenario == other.scenario and self.preparation == other.preparation
                and np.array_equal(self.counts, other.counts)
                and self.metadata == other.metadata)


def counts_from_log(log: RunLog) -> np.ndarray:
    s = log.scenario
    flat = ((log.a * s.nb + log.b) * s.ka + log.A) * s.kb + log.B
    return np.bincount(flat, minlength=s.size).reshape(s.na, s.nb, s.ka, s.kb)


class _Sampler:
    """Cumulative float tables for inverse-CDF sampling of one preparation."""

    def __init__(self, m: OntologicalModel, c: str):
        if c not in m.prior:
            raise KeyError(f"unknown preparation {c!r}")
        s = m.scenario
        self.scenario = s
        prior = np.array([float(w) for w in m.prior[c]])
        self.prior_cum = np.cumsum(prior)
        self.prior_cum[-1] = 1.0
        K = s.ka * s.kb
        kernel = np.empty((s.na, s.nb, m.n_lambdas, K))
        for a, b in s.setting_pairs():
            for lam in range(m.n_lambdas):
                kernel[a, b, lam] = [float(v) for v in m.kernel[a, b, c, lam]]
        self.kernel_cum = np.cumsum(kernel, axis=-1)
        self.kernel_cum[..., -1] = 1.0

    def draw(self, a: np.ndarray, b: np.ndarray, rng: np.random.Generator):
        n = len(a)
        lam = np.searchsorted(self.prior_cum, rng.random(n), side="right")
        np.minimum(lam, len(self.prior_cum) - 1, out=lam)
        u = rng.random(n)
        cum = self.kernel_cum[a, b, lam]
        cell = (u[:, None] < cum).argmax(axis=1)
        return np.divmod(cell, self.scenario.kb)


def sample_run(m: OntologicalModel, c: str, a: int, b: int, rng: np.random.Generator):
    """One trial at settings ``(a, b)``; returns ``(A, B, rng)``.

    The generator is advanced and handed back so callers can thread it
    through successive calls explicitly.
    """
    s = m.scenario
    if not (0 <= a < s.na and 0 <= b < s.nb):
        raise IndexError(f"settings {(a, b)} outside scenario {s}")
    sampler = _Sampler(m, c)
    A, B = sampler.draw(np.array([a]), np.array([b]), rng)
    return int(A[0]), int(B[0]), rng


def _settings(s: Scenario, policy: str, start: int, size: int, rng: np.random.Generator):
    if policy == "uniform-random":
        return rng.integers(0, s.na, size), rng.integers(0, s.nb, size)
    pair = np.arange(start, start + size) % (s.na * s.nb)
    return np.divmod(pair, s.nb)


def simulate_runs(m: OntologicalModel, c: Optional[str] = None,
                  settings_policy: str = "uniform-random", n_trials: int = 1000,
                  seed: int = 0, n_workers: int = 1) -> RunLog:
    """Simulate ``n_trials`` trials; identical arguments give identical logs."""
    if settings_policy not in POLICIES:
        raise ValueError(f"settings policy must be one of {POLICIES}")
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    c = m.preparations[0] if c is None else c
    s = m.scenario
    sampler = _Sampler(m, c)
    n_chunks = -(-n_trials // CHUNK_SIZE)
    streams = np.random.SeedSequence(seed).spawn(n_chunks)

    def run_chunk(i):
        rng = np.random.Generator(np.random.PCG64(streams[i]))
        start = i * CHUNK_SIZE
        size = min(CHUNK_SIZE, n_trials - start)
        a, b = _settings(s, settings_policy, start, size, rng)
        A, B = sampler.draw(a, b, rng)
        return a, b, A, B

    if n_workers > 1:
        with ThreadPoolExecutor(n_workers) as pool:
            chunks = list(pool.map(run_chunk, range(n_chunks)))
    else:
        chunks = [run_chunk(i) for i in range(n_chunks)]
    a, b, A, B = (np.concatenate(parts).astype(np.int64) for parts in zip(*chunks))
    metadata = {"generator": GENERATOR_NAME, "seed": int(seed), "trials": int(n_trials),
                "policy": settings_policy, "preparation": c, "chunk_size": CHUNK_SIZE}
    return RunLog(s, a, b, A, B, metadata)


def estimate_phenomenon(m: OntologicalModel, c: Optional[str] = None,
                        settings_policy: str = "uniform-random", n_trials: int = 1000,
                        seed: int = 0, n_workers: int = 1) -> EmpiricalPhenomenon:
    log = simulate_runs(m, c, settings_policy, n_trials, seed, n_workers)
    return EmpiricalPhenomenon(m.scenario, counts_from_log(log),
                               log.metadata["preparation"], log.metadata)


@dataclass(frozen=True)
class SignallingTest:
    """Bonferroni-combined chi-square tests of remote setting vs local outcome.

    ``statistic`` is the largest chi-square value among the individual
    tests and ``p_value`` the Bonferroni-combined p-value, compared
    against ``threshold`` (the nominal level ``alpha``).
    """

    statistic: float
    threshold: float
    p_value: float
    reject: bool
    tests: tuple = ()


def _pearson(table: np.ndarray) -> tuple[float, int, float]:
    table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
    r, k = table.shape
    if r < 2 or k < 2:
        return 0.0, 0, 1.0
    total = table.sum()
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / total
    stat = float(((table - expected) ** 2 / expected).sum())
    dof = (r - 1) * (k - 1)
    return stat, dof, float(stats.chi2.sf(stat, dof))


def signalling_test(e: EmpiricalPhenomenon, alpha: float = 0.05) -> SignallingTest:
    """Test whether local outcome frequencies depend on the remote setting.

    One Pearson chi-square test per party and local setting, on the
    (remote setting x local outcome) contingency table, combined by
    Bonferroni over the ``na + nb`` tests.
    """
    e._require_totals()
    s = e.scenario
    counts = e.counts
    tests = []
    for a in range(s.na):
        stat, dof, p = _pearson(counts[a].sum(axis=2))
        tests.append({"party": "alice", "setting": a, "statistic": stat, "dof": dof, "p_value": p})
    for b in range(s.nb):
        stat, dof, p = _pearson(counts[:, b].sum(axis=1))
        tests.append({"party": "bob", "setting": b, "statistic": stat, "dof": dof, "p_value": p})
    combined = min(1.0, len(tests) * min(t["p_value"] for t in tests))
    statistic = max(t["statistic"] for t in tests)
    return SignallingTest(statistic, alpha, combined, combined < alpha, tuple(tests))


@dataclass(frozen=True)
class ChshEstimate:
    value: float
    standard_error: float
    correlators: tuple = ()


def chsh_estimate(e: EmpiricalPhenomenon) -> ChshEstimate:
    """Plug-in CHSH value with root-sum-square correlator standard errors."""
    if not e.scenario.is_chsh:
        raise ScenarioMismatch("CHSH estimation needs the 2-2-2-2 scenario")
    e._require_totals()
    signs = np.array([[1, -1], [-1, 1]])
    correlators = []
    variance = 0.0
    for a, b in e.scenario.setting_pairs():
        n = int(e.totals[a, b])
        E = float((e.counts[a, b] * signs).sum()) / n
        correlators.append(E)
        variance += max(0.0, 1.0 - E * E) / n
    E00, E01, E10, E11 = correlators
    return ChshEstimate(E00 + E01 + E10 - E11, math.sqrt(variance), tuple(correlators))
