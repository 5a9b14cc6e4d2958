"""scikit-learn style facade over the point certifier."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .certifier import CONDITIONS, certify_point
from .errors import PreconditionError
from .family import Params
from .geometry import ConeConfig


class BlenderCertifier(BaseEstimator, TransformerMixin):
    """Maps parameter rows [xi, mu] or [xi, mu, kappa, eta] to BH1-BH6 results.

    transform gives the minimum strict margin per condition (nan when a
    precondition fails); predict gives "PASS", "FAIL" or "UNKNOWN" per row.
    Nothing is learned: fit only validates the configuration and the shape.
    """

    def __init__(self, theta=0.5, vartheta=0.1, rigorous=True):
        self.theta = theta
        self.vartheta = vartheta
        self.rigorous = rigorous

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        if X.shape[1] not in (2, 4):
            raise ValueError(f"expected 2 or 4 columns (xi, mu[, kappa, eta]), got {X.shape[1]}")
        self.cones_ = ConeConfig(self.theta, self.vartheta)
        self.n_features_in_ = X.shape[1]
        return self

    def _rows(self, X):
        check_is_fitted(self, "cones_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, fitted with {self.n_features_in_}")
        for row in X:
            try:
                yield certify_point(Params(*row), self.cones_, rigorous=self.rigorous,
                                    sample_expansion=False, include_diagnostics=False)
            except PreconditionError:
                yield None

    def transform(self, X):
        out = []
        for rep in self._rows(X):
            if rep is None:
                out.append([np.nan] * len(CONDITIONS))
            else:
                out.append([min(rep.condition(c).strict_margins().values()) for c in CONDITIONS])
        return np.asarray(out, dtype=np.float64)

    def predict(self, X):
        return np.asarray(["FAIL" if rep is None else rep.overall.status.value
                           for rep in self._rows(X)], dtype=object)
