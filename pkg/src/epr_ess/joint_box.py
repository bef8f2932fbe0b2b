"""The 16-entry joint probability box of a two-setting, two-outcome EPR-Bohm run.

Entries are stored 0-based in :attr:`ProbabilityBox.p` but every public
name and report uses the 1-based labels ``p1 .. p16``.  Settings
``(a, b)`` select a group of four: ``(1,1) -> p1..p4``, ``(1,2) -> p5..p8``,
``(2,1) -> p9..p12``, ``(2,2) -> p13..p16``.  Inside a group the outcome
pairs run ``(+1,+1), (+1,-1), (-1,+1), (-1,-1)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .game_model import DEFAULT_TOL

CIRELSON_BOUND = 2.0 * math.sqrt(2.0)
LOCAL_BOUND = 2.0

#: Setting pairs ``(a, b)`` in group order.
SETTING_PAIRS = ((1, 1), (1, 2), (2, 1), (2, 2))

# (lhs indices, rhs indices), 1-based; player marginals must not depend on
# the other player's setting
_NO_SIGNALING = (
    ((1, 2), (5, 6)),
    ((1, 3), (9, 11)),
    ((9, 10), (13, 14)),
    ((5, 7), (13, 15)),
    ((3, 4), (7, 8)),
    ((11, 12), (15, 16)),
    ((2, 4), (10, 12)),
    ((6, 8), (14, 16)),
)

# pairs swapped when the two players exchange roles
_EXCHANGE_PAIRS = ((5, 9), (6, 11), (7, 10), (8, 12), (2, 3), (14, 15))

OCTET_INDICES = (1, 4, 5, 8, 9, 12, 14, 15)


def outcome_index(pi1: int, pi2: int, a: int, b: int) -> int:
    """1-based box index of outcome ``(pi1, pi2)`` under settings ``(a, b)``."""
    if pi1 not in (1, -1) or pi2 not in (1, -1):
        raise ValueError(f"outcomes must be +1 or -1, got ({pi1}, {pi2})")
    if a not in (1, 2) or b not in (1, 2):
        raise ValueError(f"settings must be 1 or 2, got ({a}, {b})")
    return 1 + (1 - pi2) // 2 + 2 * ((1 - pi1) // 2) + 4 * (b - 1) + 8 * (a - 1)


@dataclass(frozen=True)
class ProbabilityBox:
    """Sixteen joint probabilities; validity is checked separately."""

    p: tuple

    def __post_init__(self):
        values = tuple(float(v) for v in self.p)
        if len(values) != 16:
            raise ValueError(f"a box needs exactly 16 probabilities, got {len(values)}")
        if not all(map(math.isfinite, values)):
            bad = next(i for i, v in enumerate(values, start=1) if not math.isfinite(v))
            raise ValueError(f"p{bad} must be finite, got {values[bad - 1]!r}")
        object.__setattr__(self, "p", values)

    @classmethod
    def uniform(cls) -> "ProbabilityBox":
        return cls((0.25,) * 16)

    def prob(self, index: int) -> float:
        """Entry by its 1-based label."""
        if not 1 <= index <= 16:
            raise IndexError(f"box index must be in 1..16, got {index}")
        return self.p[index - 1]

    def group(self, a: int, b: int) -> tuple:
        start = 4 * (b - 1) + 8 * (a - 1)
        return self.p[start:start + 4]

    def octet(self) -> "IndependentOctet":
        return IndependentOctet(*(self.p[i - 1] for i in OCTET_INDICES))

    def as_array(self) -> np.ndarray:
        return np.array(self.p)


@dataclass(frozen=True)
class FactorizableParams:
    """Single-party probabilities of outcome +1.

    ``r`` / ``s``: player 1 under setting S / S'; ``r_prime`` / ``s_prime``:
    player 2 likewise.
    """

    r: float
    s: float
    r_prime: float
    s_prime: float

    def __post_init__(self):
        for name in ("r", "s", "r_prime", "s_prime"):
            value = float(getattr(self, name))
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
            object.__setattr__(self, name, value)

    def as_tuple(self) -> tuple:
        return (self.r, self.s, self.r_prime, self.s_prime)


@dataclass(frozen=True)
class IndependentOctet:
    p1: float
    p4: float
    p5: float
    p8: float
    p9: float
    p12: float
    p14: float
    p15: float

    def as_tuple(self) -> tuple:
        return (self.p1, self.p4, self.p5, self.p8,
                self.p9, self.p12, self.p14, self.p15)


@dataclass(frozen=True)
class BoxValidation:
    valid: bool
    tol: float
    range_violations: list = field(default_factory=list)  # [(index, value)]
    normalization_residuals: tuple = ()  # group sum - 1, per setting pair
    no_signaling_residuals: tuple = ()  # lhs - rhs, per marginal equality

    @property
    def max_residual(self) -> float:
        residuals = self.normalization_residuals + self.no_signaling_residuals
        return max(abs(r) for r in residuals)

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "tol": self.tol,
            "range_violations": [
                {"index": i, "value": v} for i, v in self.range_violations
            ],
            "normalization_residuals": list(self.normalization_residuals),
            "no_signaling_residuals": list(self.no_signaling_residuals),
        }


def validate_box(box: ProbabilityBox, tol: float = DEFAULT_TOL) -> BoxValidation:
    """Check range, normalization and no-signaling; never raises on bad boxes."""
    p = box.p
    range_violations = [
        (i, v) for i, v in enumerate(p, start=1) if v < -tol or v > 1.0 + tol
    ]
    normalization = tuple(
        p[4 * g] + p[4 * g + 1] + p[4 * g + 2] + p[4 * g + 3] - 1.0
        for g in range(4)
    )
    no_signaling = tuple(
        (p[i - 1] + p[j - 1]) - (p[k - 1] + p[m - 1])
        for (i, j), (k, m) in _NO_SIGNALING
    )
    valid = (
        not range_violations
        and all(abs(r) <= tol for r in normalization)
        and all(abs(r) <= tol for r in no_signaling)
    )
    return BoxValidation(valid, tol, range_violations, normalization, no_signaling)


def box_from_factorizable(params: FactorizableParams) -> ProbabilityBox:
    """Product box: each setting group is ``(q, 1-q) (x) (q', 1-q')``."""
    r, s, rp, sp = params.as_tuple()
    p = []
    for q1, q2 in ((r, rp), (r, sp), (s, rp), (s, sp)):
        p += [q1 * q2, q1 * (1.0 - q2), (1.0 - q1) * q2, (1.0 - q1) * (1.0 - q2)]
    return ProbabilityBox(tuple(p))


def _clip_unit(value: float, tol: float) -> Optional[float]:
    if -tol <= value < 0.0:
        return 0.0
    if 1.0 < value <= 1.0 + tol:
        return 1.0
    if 0.0 <= value <= 1.0:
        return value
    return None


def product_form_test(
    box: ProbabilityBox, tol: float = DEFAULT_TOL
) -> Optional[FactorizableParams]:
    """Return marginal parameters if ``box`` is a product box, else ``None``.

    Marginals are read from the groups that carry them directly
    (``r = p1+p2``, ``s = p9+p10``, ``r' = p1+p3``, ``s' = p5+p7``); the
    alternative groups are tried next, and any candidate whose products
    reproduce all sixteen entries within ``tol`` is accepted.
    """
    p = box.p
    candidates = (
        (p[0] + p[1], p[8] + p[9], p[0] + p[2], p[4] + p[6]),
        (p[4] + p[5], p[12] + p[13], p[8] + p[10], p[12] + p[14]),
    )
    for candidate in candidates:
        clipped = [_clip_unit(v, tol) for v in candidate]
        if any(v is None for v in clipped):
            continue
        params = FactorizableParams(*clipped)
        rebuilt = box_from_factorizable(params).p
        if all(abs(x - y) <= tol for x, y in zip(rebuilt, p)):
            return params
    return None


def complete_from_independent(octet: IndependentOctet) -> ProbabilityBox:
    """Fill in the eight dependent entries from normalization and no-signaling.

    The result satisfies both families of equalities identically for any
    real input; whether every entry lies in [0, 1] is left to
    :func:`validate_box`.
    """
    p1, p4, p5, p8, p9, p12, p14, p15 = octet.as_tuple()
    p2 = (1 - p1 - p4 + p5 - p8 - p9 + p12 + p14 - p15) / 2
    p3 = (1 - p1 - p4 - p5 + p8 + p9 - p12 - p14 + p15) / 2
    p6 = (1 + p1 - p4 - p5 - p8 - p9 + p12 + p14 - p15) / 2
    p7 = (1 - p1 + p4 - p5 - p8 + p9 - p12 - p14 + p15) / 2
    p10 = (1 - p1 + p4 + p5 - p8 - p9 - p12 + p14 - p15) / 2
    p11 = (1 + p1 - p4 - p5 + p8 - p9 - p12 - p14 + p15) / 2
    p13 = (1 - p1 + p4 + p5 - p8 + p9 - p12 - p14 - p15) / 2
    p16 = (1 + p1 - p4 - p5 + p8 - p9 + p12 - p14 - p15) / 2
    return ProbabilityBox((p1, p2, p3, p4, p5, p6, p7, p8,
                           p9, p10, p11, p12, p13, p14, p15, p16))


@dataclass(frozen=True)
class SymmetryReport:
    residuals: dict  # "|p5-p9|" -> value
    symmetric: bool
    tol: float


def exchange_symmetry_residuals(
    box: ProbabilityBox, tol: float = DEFAULT_TOL
) -> SymmetryReport:
    """Residuals of the entry pairs swapped by exchanging the players.

    A box with all residuals zero yields a symmetric game for every
    transpose-symmetric payoff matrix.
    """
    p = box.p
    residuals = {
        f"|p{i}-p{j}|": abs(p[i - 1] - p[j - 1]) for i, j in _EXCHANGE_PAIRS
    }
    symmetric = all(v <= tol for v in residuals.values())
    return SymmetryReport(residuals, symmetric, tol)


@dataclass(frozen=True)
class ChshReport:
    delta: float
    variant_deltas: tuple
    is_local_range: bool
    within_cirelson: bool

    def to_dict(self) -> dict:
        return asdict(self) | {"variant_deltas": list(self.variant_deltas)}


def correlators(box: ProbabilityBox) -> tuple:
    """``E(a, b) = P(same outcome) - P(different outcome)`` per setting pair."""
    p = box.p
    return tuple(
        (p[4 * g] + p[4 * g + 3]) - (p[4 * g + 1] + p[4 * g + 2]) for g in range(4)
    )


def chsh_report(box: ProbabilityBox, tol: float = DEFAULT_TOL) -> ChshReport:
    """CHSH combination and its seven relabelled siblings.

    ``delta`` puts the anticorrelation role on settings (2, 2).  The variants
    move that role to each setting pair in turn, with both overall signs;
    for no-signaling boxes all eight lie in [-2, 2] exactly when the box is
    local.
    """
    p = box.p
    delta = 2.0 * (p[0] + p[3] + p[4] + p[7] + p[8] + p[11] + p[13] + p[14] - 2.0)
    e = correlators(box)
    total = sum(e)
    variants = [delta, -delta]
    for k in range(3):
        value = total - 2.0 * e[k]
        variants += [value, -value]
    is_local = all(abs(v) <= LOCAL_BOUND + tol for v in variants)
    within_cirelson = all(abs(v) <= CIRELSON_BOUND + tol for v in variants)
    return ChshReport(delta, tuple(variants), is_local, within_cirelson)
