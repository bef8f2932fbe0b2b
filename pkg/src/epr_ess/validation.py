"""Input validation helpers shared by the estimator layer and the CLI."""

import numbers

import numpy as np
from sklearn.utils.validation import check_array

from .game_model import GameMatrix


def check_rows(X, n_columns, name="X"):
    """2D float array with exactly ``n_columns`` finite columns."""
    X = check_array(X, dtype=np.float64, ensure_2d=True, ensure_all_finite=True)
    if X.shape[1] != n_columns:
        raise ValueError(f"{name} must have {n_columns} columns, got {X.shape[1]}")
    return X


def check_boxes(X):
    return check_rows(X, 16, "boxes")


def check_octets(X):
    return check_rows(X, 8, "octets")


def check_free_params(X):
    return check_rows(X, 4, "free parameters (p4, p5, p8, p9)")


def check_tol(tol):
    if not isinstance(tol, numbers.Real) or not tol > 0:
        raise ValueError(f"tol must be a positive number, got {tol!r}")
    return float(tol)


def check_game(game):
    if isinstance(game, GameMatrix):
        return game
    if game is None:
        raise ValueError("a game is required")
    return GameMatrix.from_sequence(np.asarray(game, dtype=float).ravel().tolist())


def check_probability(value, name):
    if not isinstance(value, numbers.Real) or not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be a probability in [0, 1], got {value!r}")
    return float(value)
