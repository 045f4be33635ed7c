"""scikit-learn compatible wrappers.

``LocalPolytopeClassifier`` labels phenomenon tables as local (True) or
Bell-nonlocal (False) by exact membership. ``FrequencyEstimator`` fits a
phenomenon to run records ``(a, b, A, B)`` the way a density estimator
fits a sample.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .montecarlo import EmpiricalPhenomenon, chsh_estimate, signalling_test
from .polytope import DEFAULT_CAP, enumerate_strategies, local_membership
from .scenario import best_chsh_variant
from .validation import check_records, check_scenario, check_tables


class LocalPolytopeClassifier(ClassifierMixin, BaseEstimator):
    """Exact local-polytope membership as a classifier.

    Parameters
    ----------
    na, nb, ka, kb : int
        Scenario dimensions.
    cap : int
        Refuse scenarios with more deterministic strategies than this.
    max_denominator : int or None
        When set, float tables are rationalized before the exact test;
        otherwise float input is rejected.

    ``fit`` ignores ``X`` and ``y``: the polytope is fixed by the scenario.
    """

    def __init__(self, na=2, nb=2, ka=2, kb=2, cap=DEFAULT_CAP, max_denominator=None):
        self.na = na
        self.nb = nb
        self.ka = ka
        self.kb = kb
        self.cap = cap
        self.max_denominator = max_denominator

    def fit(self, X=None, y=None):
        self.scenario_ = check_scenario(self.na, self.nb, self.ka, self.kb)
        self.strategies_ = enumerate_strategies(self.scenario_, self.cap)
        self.n_features_in_ = self.scenario_.size
        self.classes_ = np.array([False, True])
        return self

    def decompose(self, X):
        """Local decompositions (or None) for each sample."""
        check_is_fitted(self, "scenario_")
        tables = check_tables(X, self.scenario_, exact=True,
                              max_denominator=self.max_denominator)
        return [local_membership(p, self.cap) for p in tables]

    def predict(self, X):
        return np.array([d is not None for d in self.decompose(X)])

    def decision_function(self, X):
        """Local bound minus best CHSH value; negative means Bell-violating.

        Only defined on the 2-2-2-2 scenario.
        """
        check_is_fitted(self, "scenario_")
        if not self.scenario_.is_chsh:
            raise ValueError("decision_function needs the 2-2-2-2 scenario")
        tables = check_tables(X, self.scenario_, exact=False)
        return np.array([2 - float(best_chsh_variant(p)[1]) for p in tables])


class FrequencyEstimator(BaseEstimator):
    """Relative-frequency estimate of a phenomenon from run records.

    After ``fit(X)`` with ``X`` of shape ``(n, 4)`` holding ``a, b, A, B``:
    ``empirical_`` (counts), ``phenomenon_`` (float frequencies),
    ``standard_errors_``, ``signalling_test_`` and, on 2-2-2-2, ``chsh_``.
    """

    def __init__(self, na=2, nb=2, ka=2, kb=2, alpha=0.05, preparation="c0"):
        self.na = na
        self.nb = nb
        self.ka = ka
        self.kb = kb
        self.alpha = alpha
        self.preparation = preparation

    def fit(self, X, y=None):
        s = check_scenario(self.na, self.nb, self.ka, self.kb)
        X = check_records(X, s)
        flat = ((X[:, 0] * s.nb + X[:, 1]) * s.ka + X[:, 2]) * s.kb + X[:, 3]
        counts = np.bincount(flat, minlength=s.size).reshape(s.na, s.nb, s.ka, s.kb)
        self.scenario_ = s
        self.empirical_ = EmpiricalPhenomenon(s, counts, self.preparation)
        self.phenomenon_ = self.empirical_.frequencies()
        self.standard_errors_ = self.empirical_.standard_errors()
        self.signalling_test_ = signalling_test(self.empirical_, self.alpha)
        self.chsh_ = chsh_estimate(self.empirical_) if s.is_chsh else None
        self.n_features_in_ = 4
        return self

    def score_samples(self, X):
        """Log of the fitted ``f(A, B | a, b)`` for each record."""
        check_is_fitted(self, "empirical_")
        X = check_records(X, self.scenario_)
        freq = self.empirical_.counts / self.empirical_.totals[:, :, None, None]
        with np.errstate(divide="ignore"):
            return np.log(freq[X[:, 0], X[:, 1], X[:, 2], X[:, 3]])

    def score(self, X, y=None):
        return float(self.score_samples(X).sum())
