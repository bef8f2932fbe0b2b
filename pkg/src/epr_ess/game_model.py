"""Symmetric 2x2 games and the omega quantities that drive the embedding."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

#: Absolute tolerance for equality-style checks across the package.
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class GameMatrix:
    """Row-player payoffs of a symmetric 2x2 game.

    Entries are read row-major: ``a1 = Pi(S, S)``, ``a2 = Pi(S, S')``,
    ``a3 = Pi(S', S)``, ``a4 = Pi(S', S')``.  The column player's matrix is
    always the transpose and is derived on demand.
    """

    a1: float
    a2: float
    a3: float
    a4: float

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"payoff {name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_sequence(cls, values) -> "GameMatrix":
        values = list(values)
        if len(values) != 4:
            raise ValueError(f"a game needs exactly 4 payoffs, got {len(values)}")
        return cls(*values)

    @property
    def row_payoffs(self) -> tuple[float, float, float, float]:
        return (self.a1, self.a2, self.a3, self.a4)

    @property
    def column_payoffs(self) -> tuple[float, float, float, float]:
        """Column player's entries ``(b1, b2, b3, b4)`` of ``B = A^T``."""
        return (self.a1, self.a3, self.a2, self.a4)

    @property
    def row_matrix(self) -> np.ndarray:
        return np.array([[self.a1, self.a2], [self.a3, self.a4]])

    @property
    def column_matrix(self) -> np.ndarray:
        return self.row_matrix.T.copy()


@dataclass(frozen=True)
class OmegaTriple:
    omega1: float
    omega2: float
    omega3: float
    kappa: Optional[float]  # None when omega1 == 0

    @property
    def kappa_defined(self) -> bool:
        return self.kappa is not None


class OrderingLabel(str, enum.Enum):
    STRICT_PD = "StrictPD"
    GENERALIZED_PD_INEQUALITY = "GeneralizedPDInequality"
    EMBEDDING_FEASIBLE = "EmbeddingFeasible"
    OTHER = "Other"


#: Why the strict PD ordering and a usable embedding ratio never coexist.
PD_KAPPA_NOTE = (
    "a3 > a1 forces omega3 > 0, so omega2 = omega1 + omega3: with omega1 > 0 "
    "kappa exceeds 1, and with omega1 < 0 kappa is negative (omega2 > 0 under "
    "a4 > a2). No strict prisoner's-dilemma ordering admits 0 < kappa < 1."
)


@dataclass(frozen=True)
class OrderingClass:
    is_strict_pd: bool
    satisfies_generalized_pd_inequality: bool
    kappa_in_unit_interval: bool
    label: OrderingLabel


def omegas(game: GameMatrix) -> OmegaTriple:
    """Return ``(omega1, omega2, omega3)`` and ``kappa = omega2 / omega1``.

    ``kappa`` is ``None`` for games with ``omega1 == 0``; that is a value,
    not an error.
    """
    a1, a2, a3, a4 = game.row_payoffs
    omega1 = a1 - a2 - a3 + a4
    omega2 = a4 - a2
    omega3 = a3 - a1
    kappa = omega2 / omega1 if omega1 != 0 else None
    return OmegaTriple(omega1, omega2, omega3, kappa)


def _label(strict_pd: bool, generalized: bool, kappa_ok: bool) -> OrderingLabel:
    # kappa_ok and strict_pd are mutually exclusive for real games
    if strict_pd and generalized:
        return OrderingLabel.GENERALIZED_PD_INEQUALITY
    if strict_pd:
        return OrderingLabel.STRICT_PD
    if kappa_ok:
        return OrderingLabel.EMBEDDING_FEASIBLE
    return OrderingLabel.OTHER


def classify_ordering(game: GameMatrix) -> OrderingClass:
    """Evaluate the prisoner's-dilemma ordering flags for ``game``.

    All three flags are reported independently; ``label`` picks the most
    specific PD label when the strict ordering holds and otherwise reports
    whether the embedding ratio is usable.
    """
    a1, a2, a3, a4 = game.row_payoffs
    strict_pd = a3 > a1 > a4 > a2
    generalized = (a4 - a2) > (a3 - a1)
    kappa = omegas(game).kappa
    kappa_ok = kappa is not None and 0.0 < kappa < 1.0
    return OrderingClass(
        is_strict_pd=strict_pd,
        satisfies_generalized_pd_inequality=generalized,
        kappa_in_unit_interval=kappa_ok,
        label=_label(strict_pd, generalized, kappa_ok),
    )
