"""Embedding of the classical game into the box picture and its quantum extension.

Classically the embedding pins player 2's ``S'`` marginal to
``kappa = omega2 / omega1`` and equalises the marginal differences
``r - s = r' - s'``; that keeps defection (``x* = 0``) a symmetric Nash
equilibrium but never an ESS.  Carrying the same constraints over to
non-factorizable boxes leaves four free probabilities ``p4, p5, p8, p9``;
the rest follow from

    p15 = kappa - p5          p14 = 1 - kappa - p8
    p1  = p4 + p5 - p8        p12 = p8 + p9 - p5

and the eight dependent entries are filled in by
:func:`~epr_ess.joint_box.complete_from_independent`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exceptions import InfeasibleError, UndefinedEmbeddingError
from .game_model import DEFAULT_TOL, GameMatrix, OmegaTriple, omegas
from .joint_box import (
    FactorizableParams,
    IndependentOctet,
    ProbabilityBox,
    chsh_report,
    complete_from_independent,
)
from .payoff_engine import pure_payoffs


@dataclass(frozen=True)
class EmbeddingConstraints:
    """``s' = kappa`` and ``r - s = r' - s'``."""

    kappa: float
    omegas: OmegaTriple
    feasible: bool  # kappa is a probability

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "omega1": self.omegas.omega1,
            "omega2": self.omegas.omega2,
            "omega3": self.omegas.omega3,
            "feasible": self.feasible,
            "difference_rule": "r - s = r' - s'",
        }


def classical_embedding(game: GameMatrix) -> EmbeddingConstraints:
    om = omegas(game)
    if om.kappa is None:
        raise UndefinedEmbeddingError("omega1 = 0: the embedding ratio kappa is undefined")
    return EmbeddingConstraints(om.kappa, om, 0.0 <= om.kappa <= 1.0)


def sample_classical_params(
    constraints: EmbeddingConstraints, r: float, r_prime: float
) -> FactorizableParams:
    """Complete ``(r, r')`` to a parameter set obeying the embedding.

    ``s' = kappa`` and the common difference ``d = r' - kappa`` fixes
    ``s = r - d``.  Raises :class:`InfeasibleError` if any parameter leaves
    [0, 1].
    """
    if not constraints.feasible:
        raise InfeasibleError(
            f"kappa = {constraints.kappa:.12g} is not a probability",
            [("s_prime", constraints.kappa)],
        )
    d = r_prime - constraints.kappa
    values = {"r": r, "s": r - d, "r_prime": r_prime, "s_prime": constraints.kappa}
    violations = [(k, v) for k, v in values.items() if not 0.0 <= v <= 1.0]
    if violations:
        raise InfeasibleError(_describe(violations), violations)
    return FactorizableParams(**values)


def factorizable_deltas(params: FactorizableParams, game: GameMatrix) -> tuple[float, float]:
    """Closed-form ``(delta1, delta2)`` for a product box.

    ``delta1 = (r-s)(r'-s') omega1`` and ``delta2 = (r-s)(s' omega1 - omega2)``.
    """
    om = omegas(game)
    diff = params.r - params.s
    return (
        diff * (params.r_prime - params.s_prime) * om.omega1,
        diff * (params.s_prime * om.omega1 - om.omega2),
    )


def classical_ess_difference(
    params: FactorizableParams, game: GameMatrix, x: float, tol: float = DEFAULT_TOL
) -> tuple[float, float]:
    """``(Pi(0,0) - Pi(x,0), Pi(0,x) - Pi(x,x))`` for an embedded product box.

    Under the embedding the first part vanishes and the second equals
    ``-x**2 (r-s)**2 omega1``, so defection is never an ESS when
    ``omega1 > 0``.
    """
    constraints = classical_embedding(game)
    s_prime_gap = params.s_prime - constraints.kappa
    rule_gap = (params.r - params.s) - (params.r_prime - params.s_prime)
    if abs(s_prime_gap) > tol or abs(rule_gap) > tol:
        raise ValueError(
            "parameters violate the embedding: "
            f"s' - kappa = {s_prime_gap:.3g}, (r-s) - (r'-s') = {rule_gap:.3g}"
        )
    delta1, delta2 = factorizable_deltas(params, game)
    return -x * delta2, -x * (x * delta1 + delta2)


@dataclass(frozen=True)
class QuantumConstraintResiduals:
    residuals: dict  # name -> lhs - rhs
    satisfied: bool
    tol: float


def quantum_constraint_residuals(
    box: ProbabilityBox, game: GameMatrix, tol: float = DEFAULT_TOL
) -> QuantumConstraintResiduals:
    """Residuals of the embedding constraints written in box entries."""
    kappa = classical_embedding(game).kappa
    p = (None,) + box.p  # 1-based
    residuals = {
        "ne_sum_a": p[1] + p[5] + p[8] + p[12] + p[14] + p[15] - (1 + p[4] + p[9]),
        "ne_sum_b": p[4] + p[5] + p[8] + p[9] + p[14] + p[15] - (1 + p[1] + p[12]),
        "s_prime": p[5] + p[7] - kappa,
        "difference_rule": p[5] + p[12] - (p[8] + p[9]),
        "p5_plus_p15": p[5] + p[15] - kappa,
        "p8_plus_p14": p[8] + p[14] - (1 - kappa),
    }
    satisfied = all(abs(v) <= tol for v in residuals.values())
    return QuantumConstraintResiduals(residuals, satisfied, tol)


@dataclass(frozen=True)
class ConstrainedFreeParams:
    p4: float
    p5: float
    p8: float
    p9: float
    kappa: float

    def __post_init__(self):
        for name in ("p4", "p5", "p8", "p9", "kappa"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_box(cls, box: ProbabilityBox, kappa: float) -> "ConstrainedFreeParams":
        return cls(box.prob(4), box.prob(5), box.prob(8), box.prob(9), kappa)

    def derived(self) -> dict:
        """The four entries fixed by the constraints, keyed ``p1 p12 p14 p15``."""
        return {
            "p1": self.p4 + self.p5 - self.p8,
            "p12": self.p8 + self.p9 - self.p5,
            "p14": 1.0 - self.kappa - self.p8,
            "p15": self.kappa - self.p5,
        }

    @property
    def margin(self) -> float:
        return self.p8 + self.p9 - self.p4 - self.p5


def _describe(violations):
    return "; ".join(f"{name} = {value:.12g} out of range" for name, value in violations)


def complete_constrained(free: ConstrainedFreeParams) -> ProbabilityBox:
    """Constrained box without any range checking."""
    d = free.derived()
    return complete_from_independent(IndependentOctet(
        d["p1"], free.p4, free.p5, free.p8, free.p9, d["p12"], d["p14"], d["p15"],
    ))


def constrained_violations(free: ConstrainedFreeParams, tol: float = DEFAULT_TOL) -> list:
    """``(name, value)`` for every entry outside [0, 1], free ones included."""
    box = complete_constrained(free)
    return [
        (f"p{i}", v) for i, v in enumerate(box.p, start=1) if v < -tol or v > 1.0 + tol
    ]


def build_constrained_box(
    free: ConstrainedFreeParams, tol: float = DEFAULT_TOL
) -> ProbabilityBox:
    """Constrained box for the free tuple, or :class:`InfeasibleError`.

    Any returned box satisfies normalization and no-signaling identically
    and gives ``Pi(S,S') = Pi(S',S')`` for every game whose ratio is
    ``free.kappa``.
    """
    if not 0.0 <= free.kappa <= 1.0:
        raise ValueError(f"kappa = {free.kappa:.12g} must lie in [0, 1]")
    box = complete_constrained(free)
    violations = [
        (f"p{i}", v) for i, v in enumerate(box.p, start=1) if v < -tol or v > 1.0 + tol
    ]
    if violations:
        raise InfeasibleError(_describe(violations), violations)
    return box


def defection_gain(box: ProbabilityBox, game: GameMatrix) -> float:
    """``omega3 (p1 - p9) + omega2 (p12 - p4)``.

    On constrained boxes this equals ``Pi(S',S) - Pi(S,S)``, the
    coefficient of ``x**2`` in ``Pi(0,x) - Pi(x,x)``.
    """
    om = omegas(game)
    return om.omega3 * (box.prob(1) - box.prob(9)) + om.omega2 * (box.prob(12) - box.prob(4))


@dataclass(frozen=True)
class ReducedChsh:
    delta: float  # CHSH combination evaluated on the completed box
    reduced: float  # 4 (p4 + p9) - 2
    printed: float  # 2 (2 p4 + p9 - 1), the commonly quoted reduction
    reduced_matches: bool
    printed_matches: bool

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "reduced_delta": self.reduced,
            "printed_reduced_delta": self.printed,
            "reduced_matches": self.reduced_matches,
            "printed_matches": self.printed_matches,
        }


def reduced_chsh_formula(p4: float, p9: float) -> float:
    """CHSH value of a constrained box; depends only on ``p4 + p9``.

    The constraints give ``p1 + p12 = p4 + p9`` and
    ``p5 + p8 + p14 + p15 = 1``.
    """
    return 4.0 * (p4 + p9) - 2.0


def printed_chsh_formula(p4: float, p9: float) -> float:
    return 2.0 * (2.0 * p4 + p9 - 1.0)


def reduced_chsh(free: ConstrainedFreeParams, tol: float = DEFAULT_TOL) -> ReducedChsh:
    box = build_constrained_box(free, tol)
    delta = chsh_report(box, tol).delta
    reduced = reduced_chsh_formula(free.p4, free.p9)
    printed = printed_chsh_formula(free.p4, free.p9)
    return ReducedChsh(
        delta, reduced, printed, abs(delta - reduced) <= tol, abs(delta - printed) <= tol
    )


@dataclass(frozen=True)
class QuantumEssReport:
    margin: float  # p8 + p9 - p4 - p5
    coefficient: float  # margin * omega1, the x**2 coefficient of Pi(0,x) - Pi(x,x)
    ne_gap: float  # Pi(S',S') - Pi(S,S'), row player
    ne_preserved: bool
    is_ess: bool  # coefficient > tol; row-player identity only
    delta_reduced: float
    violates_chsh: bool  # some CHSH variant outside [-2, 2]

    def to_dict(self) -> dict:
        return {
            "margin": self.margin,
            "ess_coefficient": self.coefficient,
            "ne_gap": self.ne_gap,
            "ne_preserved": self.ne_preserved,
            "is_ess": self.is_ess,
            "reduced_delta": self.delta_reduced,
            "violates_chsh": self.violates_chsh,
        }


def ess_margin(
    free: ConstrainedFreeParams, game: GameMatrix, tol: float = DEFAULT_TOL
) -> QuantumEssReport:
    """ESS test for defection on the constrained box built from ``free``.

    ``Pi(0,x) - Pi(x,x) = x**2 (p8 + p9 - p4 - p5) omega1``, so defection is
    an ESS exactly when that coefficient is positive.  The verdict is a
    row-player identity; whether the box also plays a symmetric game is
    checked separately with
    :func:`~epr_ess.joint_box.exchange_symmetry_residuals`.
    """
    constraints = classical_embedding(game)
    if abs(constraints.kappa - free.kappa) > tol:
        raise ValueError(
            f"free parameters carry kappa = {free.kappa:.12g} but the game has "
            f"kappa = {constraints.kappa:.12g}"
        )
    box = build_constrained_box(free, tol)
    table = pure_payoffs(box, game, tol)
    ne_gap = table.pi_a_SpSp - table.pi_a_SSp
    margin = free.margin
    coefficient = margin * constraints.omegas.omega1
    return QuantumEssReport(
        margin=margin,
        coefficient=coefficient,
        ne_gap=ne_gap,
        ne_preserved=abs(ne_gap) <= tol,
        is_ess=coefficient > tol,
        delta_reduced=reduced_chsh_formula(free.p4, free.p9),
        violates_chsh=not chsh_report(box, tol).is_local_range,
    )
