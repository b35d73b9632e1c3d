"""scikit-learn style front end.

:class:`DyadicCubes` fits a cube system to a point cloud (or a precomputed
distance matrix) and transforms samples into per-level cube labels.
:class:`CubeCertifier` fits to a cloud plus a membership vector and decides
whether that subset arises as a dyadic cube.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .characterization import auto_params, certify_cube_candidate, verify_all_cubes_plump
from .cubes import build_cube_system, verify_cube_system
from .metric import FiniteMetricSpace, from_points, validate_metric
from .nets import NetParams, build_plain_points, default_levels, verify_point_system
from .order import build_order, verify_order
from .plumpness import DPlumpParams

__all__ = ["DyadicCubes", "CubeCertifier"]


def _space(X, metric) -> FiniteMetricSpace:
    X = check_array(X, dtype=np.float64, ensure_min_samples=1)
    if metric == "precomputed":
        return validate_metric(X)
    return from_points(X, metric=metric)


def _nearest_fitted(est, X) -> np.ndarray:
    """Index of the nearest fitted point for each row of ``X``."""
    X = check_array(X, dtype=np.float64)
    if est.metric == "precomputed":
        if X.shape[1] != est.n_samples_fit_:
            raise ValueError(f"precomputed X must have {est.n_samples_fit_} columns, got {X.shape[1]}")
        return np.argmin(X, axis=1)
    if X.shape[1] != est.n_features_in_:
        raise ValueError(f"X has {X.shape[1]} features, expected {est.n_features_in_}")
    return np.argmin(cdist(X, est._fit_X, metric=est.metric), axis=1)


class DyadicCubes(TransformerMixin, BaseEstimator):
    """Nested dyadic cubes on a finite point set.

    Parameters
    ----------
    delta : float, default=1/16
        Scale ratio between consecutive generations.
    c0, C0 : float, default=1.0
        Separation and covering factors of the centers; ``12 * C0 * delta``
        must not exceed ``c0``.
    k_min, k_max : int or None
        Coarsest and finest generation.  By default the coarsest level has a
        single center and the finest has every point as a center.
    metric : str, default="euclidean"
        Any ``scipy.spatial.distance.cdist`` metric, or ``"precomputed"``.

    Attributes
    ----------
    space_ : FiniteMetricSpace
    points_ : DyadicPointSystem
    order_ : ParentOrder
    cubes_ : CubeSystem
    levels_ : list of int
    """

    def __init__(self, delta=1 / 16, c0=1.0, C0=1.0, k_min=None, k_max=None,
                 metric="euclidean"):
        self.delta = delta
        self.c0 = c0
        self.C0 = C0
        self.k_min = k_min
        self.k_max = k_max
        self.metric = metric

    def fit(self, X, y=None):
        self.space_ = _space(X, self.metric)
        if self.metric != "precomputed":
            self._fit_X = check_array(X, dtype=np.float64)
            self.n_features_in_ = self._fit_X.shape[1]
        self.n_samples_fit_ = self.space_.n
        lo, hi = default_levels(self.space_, self.delta, self.c0, self.C0)
        params = NetParams(self.delta, self.c0, self.C0,
                           lo if self.k_min is None else self.k_min,
                           hi if self.k_max is None else self.k_max)
        params.validate(cube_hypothesis=True)
        self.points_ = build_plain_points(self.space_, params)
        self.order_ = build_order(self.space_, self.points_)
        self.cubes_ = build_cube_system(self.space_, self.points_, self.order_,
                                        require_full=self.k_max is None)
        self.levels_ = list(self.cubes_.levels)
        self.labels_ = np.column_stack([self.cubes_.labels(k) for k in self.levels_])
        return self

    def transform(self, X):
        """Per-level cube labels, shape ``(n_samples, n_levels)``.

        New samples inherit the labels of their nearest fitted point.
        """
        check_is_fitted(self, "cubes_")
        return self.labels_[_nearest_fitted(self, X)]

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X, y).labels_.copy()

    def verify(self, plumpness: bool = False) -> dict:
        """Run every verifier on the fitted system."""
        check_is_fitted(self, "cubes_")
        out = {
            "points": verify_point_system(self.space_, self.points_),
            "order": verify_order(self.space_, self.points_, self.order_),
            "cubes": verify_cube_system(self.space_, self.cubes_),
        }
        if plumpness:
            out["plumpness"] = verify_all_cubes_plump(self.space_, self.cubes_)
        return out


class CubeCertifier(BaseEstimator):
    """Decide whether a labelled subset arises as a dyadic cube.

    ``fit(X, y)`` treats ``y`` as membership flags (nonzero / True = in
    ``E``).  Without ``b0`` and ``B0`` (or with ``auto=True``) parameters are
    searched with ``m = 0``.

    Attributes
    ----------
    params_ : DPlumpParams
    cert_ : CubeCandidateCert
    accepted_ : bool
    """

    def __init__(self, delta=1 / 16, m=0, b0=None, B0=None, auto=False, k_max=None,
                 metric="euclidean"):
        self.delta = delta
        self.m = m
        self.b0 = b0
        self.B0 = B0
        self.auto = auto
        self.k_max = k_max
        self.metric = metric

    def fit(self, X, y):
        self.space_ = _space(X, self.metric)
        if self.metric != "precomputed":
            self._fit_X = check_array(X, dtype=np.float64)
            self.n_features_in_ = self._fit_X.shape[1]
        self.n_samples_fit_ = self.space_.n
        member = np.asarray(y).ravel().astype(bool)
        if member.shape != (self.space_.n,):
            raise ValueError(f"y has {member.size} entries, expected {self.space_.n}")
        if self.auto or self.b0 is None or self.B0 is None:
            self.params_ = auto_params(self.space_, member, self.delta)
        else:
            self.params_ = DPlumpParams(self.delta, self.m, self.b0, self.B0)
        self.cert_ = certify_cube_candidate(self.space_, member, self.params_, k_max=self.k_max)
        self.accepted_ = self.cert_.accepted
        return self

    def predict(self, X):
        """Membership of each sample in the certified cube (nearest fitted
        point decides).  All ``False`` when the subset was rejected."""
        check_is_fitted(self, "cert_")
        idx = _nearest_fitted(self, X)
        if not self.accepted_:
            return np.zeros(idx.size, dtype=bool)
        k, a = self.cert_.cube
        inside = np.zeros(self.space_.n, dtype=bool)
        inside[self.cert_.cubes.members[k][a]] = True
        return inside[idx]
