"""Payoffs of a 2x2 game played through a probability box, Nash and ESS tests.

Strategies are probabilities of choosing ``S``: ``x`` for player 1 and
``y`` for player 2.  Payoffs are bilinear in ``(x, y)``, which is what lets
every "for all deviations" quantifier be settled exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import AsymmetricGameError, InvalidBoxError
from .game_model import DEFAULT_TOL, GameMatrix
from .joint_box import ProbabilityBox, validate_box


def _check_probability(value, name):
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class PurePayoffTable:
    """Payoffs at the four pure strategy pairs, for both players.

    ``SSp`` reads "player 1 plays S, player 2 plays S'".
    """

    pi_a_SS: float
    pi_a_SSp: float
    pi_a_SpS: float
    pi_a_SpSp: float
    pi_b_SS: float
    pi_b_SSp: float
    pi_b_SpS: float
    pi_b_SpSp: float

    @property
    def row_matrix(self) -> np.ndarray:
        return np.array([[self.pi_a_SS, self.pi_a_SSp], [self.pi_a_SpS, self.pi_a_SpSp]])

    @property
    def column_matrix(self) -> np.ndarray:
        return np.array([[self.pi_b_SS, self.pi_b_SSp], [self.pi_b_SpS, self.pi_b_SpSp]])

    def row_game(self) -> "PurePayoffTable":
        """Symmetric game in which both players are paid by the row player's entries."""
        return PurePayoffTable(
            self.pi_a_SS, self.pi_a_SSp, self.pi_a_SpS, self.pi_a_SpSp,
            self.pi_a_SS, self.pi_a_SpS, self.pi_a_SSp, self.pi_a_SpSp,
        )

    def to_dict(self) -> dict:
        return {
            "player_a": {"SS": self.pi_a_SS, "SS'": self.pi_a_SSp,
                         "S'S": self.pi_a_SpS, "S'S'": self.pi_a_SpSp},
            "player_b": {"SS": self.pi_b_SS, "SS'": self.pi_b_SSp,
                         "S'S": self.pi_b_SpS, "S'S'": self.pi_b_SpSp},
        }


@dataclass(frozen=True)
class StrategyProfile:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", _check_probability(self.x, "x"))
        object.__setattr__(self, "y", _check_probability(self.y, "y"))


@dataclass(frozen=True)
class FitnessInputs:
    epsilon: float  # mutant share of the population
    x: float  # mutant strategy
    x_star: float  # incumbent strategy

    def __post_init__(self):
        if not 0.0 < float(self.epsilon) < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "x", _check_probability(self.x, "x"))
        object.__setattr__(self, "x_star", _check_probability(self.x_star, "x_star"))


class EssStatus(str, enum.Enum):
    NOT_NE = "NotNE"
    NE_ONLY = "NEOnly"
    ESS_BY_CONDITION_1 = "ESSByCondition1"
    ESS_BY_CONDITION_2 = "ESSByCondition2"

    @property
    def is_ess(self) -> bool:
        return self in (EssStatus.ESS_BY_CONDITION_1, EssStatus.ESS_BY_CONDITION_2)


@dataclass(frozen=True)
class EssVerdict:
    """Outcome of the two-part ESS test at one incumbent strategy.

    ``slope`` is ``x_star * delta1 + delta2``; condition 1 reads
    ``(x_star - x) * slope > 0``.  ``margin`` is ``-delta1``, the
    coefficient of ``(x - x_star)**2`` that decides condition 2 when
    condition 1 binds.
    """

    x_star: float
    is_symmetric_nash: bool
    delta1: float
    delta2: float
    slope: float
    margin: float
    status: EssStatus

    def to_dict(self) -> dict:
        return {
            "x_star": self.x_star,
            "is_symmetric_nash": self.is_symmetric_nash,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "slope": self.slope,
            "margin": self.margin,
            "status": self.status.value,
        }


@dataclass(frozen=True)
class NashVerdict:
    is_nash: bool
    gap_a: float  # min over pure deviations of player 1's loss from deviating
    gap_b: float


@dataclass(frozen=True)
class SymmetricGameResiduals:
    residuals: tuple  # four |lhs - rhs| values
    symmetric: bool
    tol: float


def pure_payoffs(
    box: ProbabilityBox, game: GameMatrix, tol: float = DEFAULT_TOL
) -> PurePayoffTable:
    """Expected payoff at each pure strategy pair.

    Within a setting group the outcome pairs ``(+1,+1), (+1,-1), (-1,+1),
    (-1,-1)`` pick matrix cells 1..4; player 2 is paid from the transpose.
    """
    report = validate_box(box, tol)
    if not report.valid:
        raise InvalidBoxError("box fails normalization, no-signaling or range checks", report)
    p = box.p
    a = game.row_payoffs
    b = game.column_payoffs

    def weighted(coeffs, g):
        return sum(c * q for c, q in zip(coeffs, p[4 * g:4 * g + 4]))

    return PurePayoffTable(
        weighted(a, 0), weighted(a, 1), weighted(a, 2), weighted(a, 3),
        weighted(b, 0), weighted(b, 1), weighted(b, 2), weighted(b, 3),
    )


def _bilinear(x, y, ss, ssp, sps, spsp):
    return x * y * ss + x * (1 - y) * ssp + (1 - x) * y * sps + (1 - x) * (1 - y) * spsp


def mixed_payoffs(profile: StrategyProfile, table: PurePayoffTable) -> tuple[float, float]:
    """``(Pi_A(x, y), Pi_B(x, y))``."""
    x, y = profile.x, profile.y
    pi_a = _bilinear(x, y, table.pi_a_SS, table.pi_a_SSp, table.pi_a_SpS, table.pi_a_SpSp)
    pi_b = _bilinear(x, y, table.pi_b_SS, table.pi_b_SSp, table.pi_b_SpS, table.pi_b_SpSp)
    return pi_a, pi_b


def symmetric_payoff(x: float, y: float, table: PurePayoffTable) -> float:
    """Payoff to an ``x``-strategist against a ``y``-strategist (row player)."""
    return _bilinear(x, y, table.pi_a_SS, table.pi_a_SSp, table.pi_a_SpS, table.pi_a_SpSp)


def symmetry_residuals(
    table: PurePayoffTable, tol: float = DEFAULT_TOL
) -> SymmetricGameResiduals:
    """Residuals of the four equalities that make the played game symmetric."""
    residuals = (
        abs(table.pi_a_SS - table.pi_b_SS),
        abs(table.pi_a_SSp - table.pi_b_SpS),
        abs(table.pi_a_SpS - table.pi_b_SSp),
        abs(table.pi_a_SpSp - table.pi_b_SpSp),
    )
    return SymmetricGameResiduals(residuals, all(r <= tol for r in residuals), tol)


def _deviations(strategy):
    # bilinearity: pure deviations suffice; a pure strategy has one deviation
    if strategy == 0.0:
        return (1.0,)
    if strategy == 1.0:
        return (0.0,)
    return (0.0, 1.0)


def nash_check(
    profile: StrategyProfile, table: PurePayoffTable, tol: float = DEFAULT_TOL
) -> NashVerdict:
    x_star, y_star = profile.x, profile.y
    pi_a, pi_b = mixed_payoffs(profile, table)
    gap_a = min(
        pi_a - mixed_payoffs(StrategyProfile(x, y_star), table)[0]
        for x in _deviations(x_star)
    )
    gap_b = min(
        pi_b - mixed_payoffs(StrategyProfile(x_star, y), table)[1]
        for y in _deviations(y_star)
    )
    return NashVerdict(gap_a >= -tol and gap_b >= -tol, gap_a, gap_b)


def _require_symmetric(table, tol):
    check = symmetry_residuals(table, tol)
    if not check.symmetric:
        raise AsymmetricGameError(
            "ESS analysis needs a symmetric game; residuals "
            f"{[round(r, 12) for r in check.residuals]} exceed tol={tol}"
        )


def ess_deltas(
    table: PurePayoffTable, tol: float = DEFAULT_TOL, require_symmetric: bool = True
) -> tuple[float, float]:
    """``(delta1, delta2)`` from the row player's pure payoffs.

    With ``require_symmetric=False`` the row player's table is used as the
    symmetric payoff even when the column player's differs.
    """
    if require_symmetric:
        _require_symmetric(table, tol)
    delta1 = table.pi_a_SS - table.pi_a_SpS - table.pi_a_SSp + table.pi_a_SpSp
    delta2 = table.pi_a_SSp - table.pi_a_SpSp
    return delta1, delta2


def ess_parts(x_star: float, x: float, delta1: float, delta2: float) -> tuple[float, float]:
    """Closed forms of ``Pi(x*,x*) - Pi(x,x*)`` and ``Pi(x*,x) - Pi(x,x)``."""
    return (x_star - x) * (x_star * delta1 + delta2), (x_star - x) * (x * delta1 + delta2)


def ess_classify(
    x_star: float,
    table: PurePayoffTable,
    tol: float = DEFAULT_TOL,
    require_symmetric: bool = True,
) -> EssVerdict:
    """Classify ``x_star`` against every mutant ``x`` in [0, 1].

    Condition 1 is ``(x* - x) * slope`` with ``slope = x* delta1 + delta2``,
    linear in ``x``; it holds strictly for all ``x != x*`` only at a pure
    ``x*`` with the slope pointing inward.  When it binds (``slope == 0``),
    condition 2 reduces to ``-(x - x*)**2 * delta1 > 0``, i.e. to the sign
    of ``delta1``.
    """
    x_star = _check_probability(x_star, "x_star")
    delta1, delta2 = ess_deltas(table, tol, require_symmetric)
    slope = x_star * delta1 + delta2
    # worst pure deviation for the linear first condition
    first = min((x_star - x) * slope for x in (0.0, 1.0))
    is_nash = first >= -tol

    if x_star == 0.0 and slope < -tol or x_star == 1.0 and slope > tol:
        status = EssStatus.ESS_BY_CONDITION_1
    elif not is_nash:
        status = EssStatus.NOT_NE
    elif abs(slope) <= tol and -delta1 > tol:
        status = EssStatus.ESS_BY_CONDITION_2
    else:
        status = EssStatus.NE_ONLY
    return EssVerdict(x_star, is_nash, delta1, delta2, slope, -delta1, status)


def fitness(
    inputs: FitnessInputs,
    table: PurePayoffTable,
    tol: float = DEFAULT_TOL,
    require_symmetric: bool = True,
) -> tuple[float, float]:
    """``(F(x), F(x*))`` when a share ``epsilon`` of the population plays ``x``."""
    if require_symmetric:
        _require_symmetric(table, tol)
    eps, x, xs = inputs.epsilon, inputs.x, inputs.x_star
    f_mutant = eps * symmetric_payoff(x, x, table) + (1 - eps) * symmetric_payoff(x, xs, table)
    f_incumbent = eps * symmetric_payoff(xs, x, table) + (1 - eps) * symmetric_payoff(xs, xs, table)
    return f_mutant, f_incumbent
