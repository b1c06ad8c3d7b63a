"""Scikit-learn style estimators wrapping the functional core.

The transformers are stateless in the sklearn sense: ``fit`` only
validates hyperparameters (series carry no information to estimate), and
``transform`` maps a sequence of HarmonicSeries to a new list.  They
compose with sklearn pipelines, ``clone`` and ``get_params`` /
``set_params`` out of the box.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .brackets import PQParams
from .membership import (
    ClassParams,
    MembershipReport,
    check_membership,
    coefficient_sum,
    bernardi,
    min_re_over_grid,
)
from .operator import OperatorParams, apply_operator
from .series import DiskGrid, HarmonicSeries

__all__ = ["MultiplierOperator", "BernardiOperator", "MembershipClassifier", "as_series_list"]


def as_series_list(X) -> list[HarmonicSeries]:
    """Validate an input collection of series; a single series is wrapped."""
    if isinstance(X, HarmonicSeries):
        return [X]
    try:
        out = list(X)
    except TypeError:
        raise TypeError(
            "X must be a HarmonicSeries or an iterable of HarmonicSeries"
        ) from None
    for i, f in enumerate(out):
        if not isinstance(f, HarmonicSeries):
            raise TypeError(f"X[{i}] is {type(f).__name__}, expected HarmonicSeries")
    return out


class MultiplierOperator(TransformerMixin, BaseEstimator):
    """Apply the deformed coefficient-multiplier operator to each series.

    Parameters mirror the operator parameterization: deformation pair
    (p, q), valence ell, shift delta > -ell and exponent t >= 0.
    """

    def __init__(self, p: float = 1.0, q: float = 0.5, ell: int = 1, delta: float = 0.0, t: int = 0):
        self.p = p
        self.q = q
        self.ell = ell
        self.delta = delta
        self.t = t

    def fit(self, X=None, y=None):
        self.params_ = OperatorParams(PQParams(self.p, self.q), self.ell, self.delta, self.t)
        return self

    def transform(self, X) -> list[HarmonicSeries]:
        check_is_fitted(self, "params_")
        return [apply_operator(f, self.params_) for f in as_series_list(X)]


class BernardiOperator(TransformerMixin, BaseEstimator):
    """Apply the integral-transform coefficient map with parameter u > -1."""

    def __init__(self, u: float = 1.0):
        self.u = u

    def fit(self, X=None, y=None):
        # delegate the u > -1 domain check to the core map
        bernardi(HarmonicSeries.monomial(1), self.u)
        self.u_ = float(self.u)
        return self

    def transform(self, X) -> list[HarmonicSeries]:
        check_is_fitted(self, "u_")
        return [bernardi(f, self.u_) for f in as_series_list(X)]


class MembershipClassifier(BaseEstimator):
    """Class-membership decisions for harmonic multivalent series.

    ``decision_function`` returns the coefficient margin (nonnegative
    means certified membership); ``predict`` thresholds it, or samples
    the analytic condition on a disk grid when ``criterion='analytic'``.
    The two tests are deliberately separate; ``report`` returns both.
    """

    def __init__(
        self,
        p: float = 1.0,
        q: float = 0.5,
        ell: int = 3,
        delta: float = 0.0,
        t: int = 0,
        sigma: float = 0.0,
        criterion: str = "coefficient",
        radii: int = 64,
        angles: int = 256,
        r_max: float = 0.995,
    ):
        self.p = p
        self.q = q
        self.ell = ell
        self.delta = delta
        self.t = t
        self.sigma = sigma
        self.criterion = criterion
        self.radii = radii
        self.angles = angles
        self.r_max = r_max

    def fit(self, X=None, y=None):
        if self.criterion not in ("coefficient", "analytic", "both"):
            raise ValueError(
                f"criterion must be 'coefficient', 'analytic' or 'both', got {self.criterion!r}"
            )
        op = OperatorParams(PQParams(self.p, self.q), self.ell, self.delta, self.t)
        self.class_params_ = ClassParams(op, self.sigma)
        self.grid_ = DiskGrid.uniform(self.radii, self.angles, self.r_max)
        return self

    def decision_function(self, X) -> np.ndarray:
        """Coefficient margins, one per series."""
        check_is_fitted(self, "class_params_")
        cp = self.class_params_
        return np.array(
            [cp.bound - coefficient_sum(f, cp) for f in as_series_list(X)], dtype=float
        )

    def _analytic_ok(self, f: HarmonicSeries) -> bool:
        min_re, _ = min_re_over_grid(f, self.class_params_, self.grid_)
        return min_re >= self.class_params_.sigma

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "class_params_")
        series = as_series_list(X)
        if self.criterion == "coefficient":
            return self.decision_function(series) >= 0.0
        analytic = np.array([self._analytic_ok(f) for f in series], dtype=bool)
        if self.criterion == "analytic":
            return analytic
        return analytic & (self.decision_function(series) >= 0.0)

    def report(self, f: HarmonicSeries) -> MembershipReport:
        """Full membership report (both tests) for a single series."""
        check_is_fitted(self, "class_params_")
        return check_membership(f, self.class_params_, self.grid_)
