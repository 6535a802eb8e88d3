"""scikit-learn style wrappers around the function API.

These make it easy to drop the shaders and the entropy estimator into
pipelines and parameter searches; all the work happens in the modules they
wrap.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import entropy
from .core import escape_radius
from .raster import MODES, _kernel
from .regimes import classify
from .validation import check_int, check_parameter, check_points, check_window


class EscapeTimeTransformer(TransformerMixin, BaseEstimator):
    """Map points z to (escape_n, code_n) under f_c."""

    def __init__(self, c=2.0, max_iter=1000, N=120, escape_R=0.0, mode="Fastest"):
        self.c = c
        self.max_iter = max_iter
        self.N = N
        self.escape_R = escape_R
        self.mode = mode

    def fit(self, X=None, y=None):
        p = check_parameter(self.c, expanding=True)
        check_int("max_iter", self.max_iter)
        check_int("N", self.N, 1, 10 ** 6)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.parameter_ = p
        self.escape_radius_ = float(self.escape_R) if self.escape_R > 0 else escape_radius(p)
        return self

    def transform(self, X):
        if not hasattr(self, "parameter_"):
            raise NotFittedError("call fit first")
        z = check_points(X)
        p = self.parameter_
        R2 = self.escape_radius_ ** 2
        esc, code = _kernel(p.alpha, p.beta, z.real.copy(), z.imag.copy(), R2, self.max_iter, self.N)
        return np.column_stack([esc, code])


class RegimeClassifier(BaseEstimator):
    """Stateless: predict the regime tag of each parameter c."""

    def fit(self, X=None, y=None):
        self.fitted_ = True
        return self

    def predict(self, C):
        return np.array([classify(c).tag for c in check_points(C)], dtype=object)


class TopologicalEntropyEstimator(BaseEstimator):
    """Fit itinerary counts on samples of K and expose the slope."""

    def __init__(self, c=1.5, n_max=14, window=entropy.DEFAULT_WINDOW):
        self.c = c
        self.n_max = n_max
        self.window = window

    def fit(self, X, y=None):
        p = check_parameter(self.c)
        n_max = check_int("n_max", self.n_max, 1, 62)
        window = check_window(self.window)
        z = check_points(X)
        self.counts_ = entropy.itinerary_counts(p, z, n_max)
        self.estimate_ = entropy.estimate_entropy(self.counts_, window, n_samples=z.size, r=p.r,
                                                  theoretical=entropy.theoretical_entropy(p))
        self.slope_ = self.estimate_.slope
        return self

    def score(self, X=None, y=None):
        if not hasattr(self, "slope_"):
            raise NotFittedError("call fit first")
        return self.slope_
