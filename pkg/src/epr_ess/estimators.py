"""Batch estimators over arrays of boxes, in the scikit-learn transformer idiom.

Each estimator works on rows: a box is a row of 16 probabilities, an octet
a row of 8 independent ones, a free tuple a row ``(p4, p5, p8, p9)``.  The
affine maps (completion, constrained construction, CHSH, residuals) are
read off the scalar implementations by evaluating them on basis vectors,
so the batch and scalar paths cannot drift apart.

>>> from sklearn.pipeline import make_pipeline
>>> pipe = make_pipeline(ConstrainedBoxBuilder(kappa=0.4), ChshScorer())
>>> pipe.fit_transform([[0.2, 0.1, 0.3, 0.1]])[0, 0].round(12)
-0.8
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .embedding import ConstrainedFreeParams, complete_constrained
from .exceptions import AsymmetricGameError, InvalidBoxError
from .game_model import DEFAULT_TOL, omegas
from .joint_box import (
    OCTET_INDICES,
    IndependentOctet,
    ProbabilityBox,
    chsh_report,
    complete_from_independent,
    product_form_test,
    validate_box,
)
from .payoff_engine import ess_classify, pure_payoffs
from .validation import (
    check_boxes,
    check_free_params,
    check_game,
    check_octets,
    check_probability,
    check_tol,
)

ASYMMETRIC = "Asymmetric"
INVALID = "InvalidBox"


def affine_map(fn, n_in):
    """``(offset, matrix)`` with ``fn(v) == offset + matrix @ v`` for affine ``fn``."""
    offset = np.asarray(fn(np.zeros(n_in)), dtype=float)
    columns = [np.asarray(fn(e), dtype=float) - offset for e in np.eye(n_in)]
    return offset, np.column_stack(columns)


def _residuals(p):
    report = validate_box(ProbabilityBox(p))
    return report.normalization_residuals + report.no_signaling_residuals


_RESIDUAL_MAP = affine_map(_residuals, 16)
_COMPLETION_MAP = affine_map(lambda o: complete_from_independent(IndependentOctet(*o)).p, 8)
_CHSH_MAP = affine_map(lambda p: chsh_report(ProbabilityBox(p)).variant_deltas, 16)


def _apply(mapping, X):
    offset, matrix = mapping
    return offset + X @ matrix.T


class BoxValidator(TransformerMixin, BaseEstimator):
    """Normalization and no-signaling residuals of each box.

    ``transform`` returns 12 columns: four group-sum residuals followed by
    eight no-signaling residuals.  ``predict`` flags boxes whose residuals
    and entries are all within ``tol``.
    """

    def __init__(self, tol=DEFAULT_TOL):
        self.tol = tol

    def fit(self, X, y=None):
        check_tol(self.tol)
        self.n_features_in_ = check_boxes(X).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        return _apply(_RESIDUAL_MAP, check_boxes(X))

    def predict(self, X):
        check_is_fitted(self)
        X = check_boxes(X)
        in_range = np.all((X >= -self.tol) & (X <= 1.0 + self.tol), axis=1)
        residuals_ok = np.all(np.abs(_apply(_RESIDUAL_MAP, X)) <= self.tol, axis=1)
        return in_range & residuals_ok


class NoSignalingCompleter(TransformerMixin, BaseEstimator):
    """Map octets ``(p1, p4, p5, p8, p9, p12, p14, p15)`` to full boxes."""

    def fit(self, X, y=None):
        self.n_features_in_ = check_octets(X).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        return _apply(_COMPLETION_MAP, check_octets(X))

    def inverse_transform(self, X):
        return check_boxes(X)[:, [i - 1 for i in OCTET_INDICES]]


class ConstrainedBoxBuilder(TransformerMixin, BaseEstimator):
    """Build constrained boxes from free tuples ``(p4, p5, p8, p9)``.

    The ratio comes from ``game`` when given, otherwise from ``kappa``.
    ``transform`` does not range-check; use :meth:`feasible` or a
    :class:`BoxValidator` downstream.
    """

    def __init__(self, game=None, kappa=None, tol=DEFAULT_TOL):
        self.game = game
        self.kappa = kappa
        self.tol = tol

    def fit(self, X=None, y=None):
        check_tol(self.tol)
        if self.game is not None:
            kappa = omegas(check_game(self.game)).kappa
            if kappa is None:
                raise ValueError("omega1 = 0: the game has no embedding ratio")
        elif self.kappa is not None:
            kappa = self.kappa
        else:
            raise ValueError("either game or kappa is required")
        self.kappa_ = check_probability(kappa, "kappa")
        self.map_ = affine_map(
            lambda f: complete_constrained(ConstrainedFreeParams(*f, self.kappa_)).p, 4
        )
        if X is not None:
            self.n_features_in_ = check_free_params(X).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        return _apply(self.map_, check_free_params(X))

    def feasible(self, X):
        boxes = self.transform(X)
        return np.all((boxes >= -self.tol) & (boxes <= 1.0 + self.tol), axis=1)


class ChshScorer(TransformerMixin, BaseEstimator):
    """Eight CHSH variants per box; ``predict`` flags the local range."""

    def __init__(self, bound=2.0, tol=DEFAULT_TOL):
        self.bound = bound
        self.tol = tol

    def fit(self, X, y=None):
        self.n_features_in_ = check_boxes(X).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        return _apply(_CHSH_MAP, check_boxes(X))

    def predict(self, X):
        return np.all(np.abs(self.transform(X)) <= self.bound + self.tol, axis=1)


class FactorizabilityTest(TransformerMixin, BaseEstimator):
    """Marginals ``(r, s, r', s')`` per box; ``predict`` flags product boxes."""

    def __init__(self, tol=DEFAULT_TOL):
        self.tol = tol

    def fit(self, X, y=None):
        check_tol(self.tol)
        self.n_features_in_ = check_boxes(X).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = check_boxes(X)
        return np.column_stack([
            X[:, 0] + X[:, 1], X[:, 8] + X[:, 9], X[:, 0] + X[:, 2], X[:, 4] + X[:, 6],
        ])

    def predict(self, X):
        check_is_fitted(self)
        return np.array([product_form_test(ProbabilityBox(row), self.tol) is not None
                         for row in check_boxes(X)])


class EssClassifier(BaseEstimator):
    """ESS status of a fixed strategy for a game played through each box.

    ``predict`` returns status labels (``"ESSByCondition2"`` and so on).
    Boxes that fail validation are labelled ``"InvalidBox"``; with
    ``require_symmetric`` boxes that do not give a symmetric game are
    labelled ``"Asymmetric"``.  ``decision_function`` returns the
    second-condition margin ``-delta1`` (NaN where no verdict is issued).
    """

    def __init__(self, game=None, x_star=0.0, tol=DEFAULT_TOL, require_symmetric=True):
        self.game = game
        self.x_star = x_star
        self.tol = tol
        self.require_symmetric = require_symmetric

    def fit(self, X=None, y=None):
        self.game_ = check_game(self.game)
        check_probability(self.x_star, "x_star")
        check_tol(self.tol)
        self.omegas_ = omegas(self.game_)
        if X is not None:
            self.n_features_in_ = check_boxes(X).shape[1]
        return self

    def _verdicts(self, X):
        check_is_fitted(self)
        for row in check_boxes(X):
            try:
                table = pure_payoffs(ProbabilityBox(row), self.game_, self.tol)
                yield ess_classify(self.x_star, table, self.tol, self.require_symmetric)
            except InvalidBoxError:
                yield INVALID
            except AsymmetricGameError:
                yield ASYMMETRIC

    def predict(self, X):
        return np.array([v if isinstance(v, str) else v.status.value
                         for v in self._verdicts(X)], dtype=object)

    def decision_function(self, X):
        return np.array([np.nan if isinstance(v, str) else v.margin
                         for v in self._verdicts(X)])
