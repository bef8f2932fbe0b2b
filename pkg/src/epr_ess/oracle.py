"""Brute-force cross-checks of every closed form, plus feasibility sweeps.

The "direct" side of each check never goes through the closed forms or the
payoff tables of :mod:`epr_ess.payoff_engine`: it sums game entries times
box entries over outcome indices, and solves the normalization and
no-signaling equations with a least-squares solve where completion is
checked.  Reports are plain reductions (sums, maxima, sorted lists), so
partial reports from disjoint grid partitions merge in any order.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .embedding import (
    ConstrainedFreeParams,
    build_constrained_box,
    classical_embedding,
    classical_ess_difference,
    defection_gain,
    factorizable_deltas,
    printed_chsh_formula,
    reduced_chsh_formula,
    sample_classical_params,
)
from .exceptions import InfeasibleError, UndefinedEmbeddingError
from .game_model import DEFAULT_TOL, GameMatrix, PD_KAPPA_NOTE, omegas
from .joint_box import (
    OCTET_INDICES,
    FactorizableParams,
    IndependentOctet,
    ProbabilityBox,
    box_from_factorizable,
    chsh_report,
    complete_from_independent,
    exchange_symmetry_residuals,
    outcome_index,
)
from .payoff_engine import ess_deltas, ess_parts, pure_payoffs

_OUTCOMES = ((1, 1), (1, -1), (-1, 1), (-1, -1))
_UNIT_PARAMS = ("r", "r_prime", "p4", "p5", "p8", "p9", "x")

CSV_COLUMNS = ("p4", "p5", "p8", "p9", "feasible", "symmetric", "margin", "delta", "local_range")


# -- grids --------------------------------------------------------------------

@dataclass(frozen=True)
class SweepGrid:
    """Lattice ranges ``name -> (low, high, step)`` plus seeded random fill-in.

    ``sample_count`` extra points are drawn uniformly inside the same ranges
    from ``numpy.random.default_rng(seed)``.
    """

    ranges: dict
    seed: int = 0
    sample_count: int = 0

    def __post_init__(self):
        for name, (low, high, step) in self.ranges.items():
            if step <= 0:
                raise ValueError(f"step for {name} must be positive, got {step}")
            if low > high:
                raise ValueError(f"empty range for {name}: {low} > {high}")
            if name in _UNIT_PARAMS and (low < 0.0 or high > 1.0):
                raise ValueError(f"range for {name} must stay inside [0, 1]")
        if self.sample_count < 0:
            raise ValueError("sample_count must be non-negative")

    @classmethod
    def uniform(cls, names, step, seed=0, sample_count=0, low=0.0, high=1.0):
        return cls({n: (low, high, step) for n in names}, seed, sample_count)

    def axis(self, name) -> np.ndarray:
        low, high, step = self.ranges[name]
        n = int(math.floor((high - low) / step + 1e-9)) + 1
        return np.round(low + step * np.arange(n), 12)

    def lattice(self, names):
        return itertools.product(*(self.axis(n).tolist() for n in names))

    def random_points(self, names):
        rng = np.random.default_rng(self.seed)
        lows = np.array([self.ranges[n][0] for n in names])
        highs = np.array([self.ranges[n][1] for n in names])
        draws = rng.uniform(lows, highs, size=(self.sample_count, len(names)))
        return [tuple(row) for row in draws.tolist()]

    def points(self, names):
        yield from self.lattice(names)
        yield from self.random_points(names)


def _x_values(grid):
    if "x" in grid.ranges:
        return [x for x in grid.axis("x").tolist() if x > 0.0]
    return [round(0.1 * k, 12) for k in range(1, 11)]


# -- direct (oracle-side) arithmetic --------------------------------------------

_SETTINGS = ((1, 1), (1, 2), (2, 1), (2, 2))
# 0-based box positions of the four outcomes, per setting pair
_POSITIONS = tuple(
    tuple(outcome_index(pi1, pi2, sa, sb) - 1 for pi1, pi2 in _OUTCOMES)
    for sa, sb in _SETTINGS
)


def direct_corner_payoffs(p, a) -> tuple:
    """Row payoffs at the setting pairs ``(1,1), (1,2), (2,1), (2,2)``."""
    return tuple(
        a[0] * p[i] + a[1] * p[j] + a[2] * p[k] + a[3] * p[m]
        for i, j, k, m in _POSITIONS
    )


def direct_payoff(corners, x, y) -> float:
    c11, c12, c21, c22 = corners
    return x * y * c11 + x * (1 - y) * c12 + (1 - x) * y * c21 + (1 - x) * (1 - y) * c22


def direct_chsh(p) -> float:
    """``E11 + E12 + E21 - E22`` from outcome products."""
    corr = [
        sum(pi1 * pi2 * p[pos] for (pi1, pi2), pos in zip(_OUTCOMES, positions))
        for positions in _POSITIONS
    ]
    return corr[0] + corr[1] + corr[2] - corr[3]


def _no_signaling_system():
    rows, rhs = [], []
    for sa, sb in itertools.product((1, 2), repeat=2):
        row = np.zeros(16)
        for pi1, pi2 in _OUTCOMES:
            row[outcome_index(pi1, pi2, sa, sb) - 1] = 1.0
        rows.append(row)
        rhs.append(1.0)
    # marginal of one player is the same under both settings of the other
    for own, pi in itertools.product((1, 2), (1, -1)):
        row = np.zeros(16)
        for other in (-1, 1):
            row[outcome_index(pi, other, own, 1) - 1] += 1.0
            row[outcome_index(pi, other, own, 2) - 1] -= 1.0
        rows.append(row)
        rhs.append(0.0)
        row = np.zeros(16)
        for other in (-1, 1):
            row[outcome_index(other, pi, 1, own) - 1] += 1.0
            row[outcome_index(other, pi, 2, own) - 1] -= 1.0
        rows.append(row)
        rhs.append(0.0)
    return np.array(rows), np.array(rhs)


_NS_MATRIX, _NS_RHS = _no_signaling_system()
_DEPENDENT = [i for i in range(16) if i + 1 not in OCTET_INDICES]
_INDEPENDENT = [i - 1 for i in OCTET_INDICES]
_DEPENDENT_SOLVER = np.linalg.pinv(_NS_MATRIX[:, _DEPENDENT])


def solve_completion(octet) -> np.ndarray:
    """Dependent entries from a least-squares solve of the linear constraints."""
    known = np.asarray(octet, dtype=float)
    rhs = _NS_RHS - _NS_MATRIX[:, _INDEPENDENT] @ known
    dependent = _DEPENDENT_SOLVER @ rhs
    full = np.zeros(16)
    full[_INDEPENDENT] = known
    full[_DEPENDENT] = dependent
    return full


def _feasible_free_points(points, kappa, tol):
    """Split free tuples by whether their completed box stays inside [0, 1]."""
    free = np.asarray(points, dtype=float).reshape(-1, 4)
    p4, p5, p8, p9 = free.T
    octets = np.column_stack([p4 + p5 - p8, p4, p5, p8, p9, p8 + p9 - p5,
                              1 - kappa - p8, kappa - p5])
    rhs = _NS_RHS[:, None] - _NS_MATRIX[:, _INDEPENDENT] @ octets.T
    boxes = np.column_stack([octets, (_DEPENDENT_SOLVER @ rhs).T])
    return np.all((boxes >= -tol) & (boxes <= 1 + tol), axis=1)


# -- identities -----------------------------------------------------------------

class _FactorizableCase:
    def __init__(self, game, inputs):
        self.game = game
        self.inputs = inputs
        self.params = FactorizableParams(
            inputs["r"], inputs["s"], inputs["r_prime"], inputs["s_prime"]
        )
        self.box = box_from_factorizable(self.params)
        self.table = pure_payoffs(self.box, game)
        self.corners = direct_corner_payoffs(self.box.p, game.row_payoffs)

    def direct(self, x, y):
        return direct_payoff(self.corners, x, y)


class _ConstrainedCase:
    def __init__(self, game, inputs):
        self.game = game
        self.inputs = inputs
        self.kappa = classical_embedding(game).kappa
        self.free = ConstrainedFreeParams(
            inputs["p4"], inputs["p5"], inputs["p8"], inputs["p9"], self.kappa
        )
        self.box = build_constrained_box(self.free)
        self.table = pure_payoffs(self.box, game)
        self.corners = direct_corner_payoffs(self.box.p, game.row_payoffs)

    def direct(self, x, y):
        return direct_payoff(self.corners, x, y)


def _ess_first_part(c):
    xs, x = c.inputs["x_star"], c.inputs["x"]
    d1, d2 = ess_deltas(c.table, require_symmetric=False)
    return ess_parts(xs, x, d1, d2)[0], c.direct(xs, xs) - c.direct(x, xs)


def _ess_second_part(c):
    xs, x = c.inputs["x_star"], c.inputs["x"]
    d1, d2 = ess_deltas(c.table, require_symmetric=False)
    return ess_parts(xs, x, d1, d2)[1], c.direct(xs, x) - c.direct(x, x)


def _factorizable_delta1(c):
    d = c.direct
    return factorizable_deltas(c.params, c.game)[0], d(1, 1) - d(0, 1) - d(1, 0) + d(0, 0)


def _factorizable_delta2(c):
    return factorizable_deltas(c.params, c.game)[1], c.direct(1, 0) - c.direct(0, 0)


def _classical_first(c):
    x = c.inputs["x"]
    return classical_ess_difference(c.params, c.game, x)[0], c.direct(0, 0) - c.direct(x, 0)


def _classical_second(c):
    x = c.inputs["x"]
    return classical_ess_difference(c.params, c.game, x)[1], c.direct(0, x) - c.direct(x, x)


def _classical_second_simplified(c):
    x = c.inputs["x"]
    closed = -x * x * (c.params.r - c.params.s) ** 2 * omegas(c.game).omega1
    return closed, c.direct(0, x) - c.direct(x, x)


def _completion(c):
    octet = [c.box.prob(i) for i in OCTET_INDICES]
    closed = complete_from_independent(IndependentOctet(*octet)).p
    return tuple(closed), tuple(solve_completion(octet).tolist())


def _ne_preservation(c):
    return 0.0, c.direct(0, 0) - c.direct(1, 0)


def _ne_first_part(c):
    x = c.inputs["x"]
    return x * (c.table.pi_a_SpSp - c.table.pi_a_SSp), c.direct(0, 0) - c.direct(x, 0)


def _defection_gain(c):
    return defection_gain(c.box, c.game), c.direct(0, 1) - c.direct(1, 1)


def _quantum_ess(c):
    x = c.inputs["x"]
    closed = x * x * c.free.margin * omegas(c.game).omega1
    return closed, c.direct(0, x) - c.direct(x, x)


def _reduced_chsh(c):
    return reduced_chsh_formula(c.free.p4, c.free.p9), direct_chsh(c.box.p)


def _chsh_report_delta(c):
    return chsh_report(c.box).delta, direct_chsh(c.box.p)


#: identity name -> (case family, evaluator)
IDENTITIES = {
    "ess_first_part": ("factorizable", _ess_first_part),
    "ess_second_part": ("factorizable", _ess_second_part),
    "factorizable_delta1": ("factorizable", _factorizable_delta1),
    "factorizable_delta2": ("factorizable", _factorizable_delta2),
    "classical_first_part": ("factorizable", _classical_first),
    "classical_second_part": ("factorizable", _classical_second),
    "classical_second_simplified": ("factorizable", _classical_second_simplified),
    "completion": ("constrained", _completion),
    "ne_preservation": ("constrained", _ne_preservation),
    "ne_first_part": ("constrained", _ne_first_part),
    "defection_gain": ("constrained", _defection_gain),
    "quantum_ess_second_part": ("constrained", _quantum_ess),
    "reduced_chsh": ("constrained", _reduced_chsh),
    "chsh_report_delta": ("constrained", _chsh_report_delta),
}

_FACTORIZABLE_X = ("ess_first_part", "ess_second_part", "classical_first_part",
                   "classical_second_part", "classical_second_simplified")
_CONSTRAINED_X = ("ne_first_part", "quantum_ess_second_part")
_ESS_X_STARS = (0.0, 0.5, 1.0)


def _make_case(family, game, inputs):
    if family == "factorizable":
        return _FactorizableCase(game, inputs)
    return _ConstrainedCase(game, inputs)


def _discrepancy(closed, direct) -> float:
    if isinstance(closed, float) and isinstance(direct, float):
        return abs(closed - direct)
    return float(np.max(np.abs(np.subtract(closed, direct))))


def evaluate_identity(name, game: GameMatrix, inputs: dict):
    """``(closed_form, direct)`` for one identity at one input point."""
    family, fn = IDENTITIES[name]
    return fn(_make_case(family, game, inputs))


@dataclass(frozen=True)
class Counterexample:
    identity: str
    inputs: dict
    closed: object
    direct: object

    def to_dict(self) -> dict:
        return {"identity": self.identity, "inputs": self.inputs,
                "closed": self.closed, "direct": self.direct}

    def sort_key(self):
        return (self.identity, json.dumps(self.inputs, sort_keys=True))


def replay(counterexample: Counterexample, game: GameMatrix):
    return evaluate_identity(counterexample.identity, game, counterexample.inputs)


@dataclass
class OracleReport:
    tol: float = DEFAULT_TOL
    checks_run: int = 0
    identity_checks: dict = field(default_factory=dict)
    max_abs_discrepancy: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)
    samples: dict = field(default_factory=lambda: {"factorizable": 0, "constrained": 0})
    skipped_infeasible: int = 0
    printed_chsh_checked: int = 0
    printed_chsh_mismatches: int = 0

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    @property
    def printed_chsh_mismatch_rate(self) -> float:
        if not self.printed_chsh_checked:
            return 0.0
        return self.printed_chsh_mismatches / self.printed_chsh_checked

    def record(self, name, inputs, closed, direct):
        gap = _discrepancy(closed, direct)
        self.checks_run += 1
        self.identity_checks[name] = self.identity_checks.get(name, 0) + 1
        self.max_abs_discrepancy[name] = max(self.max_abs_discrepancy.get(name, 0.0), gap)
        if not gap <= self.tol:
            self.counterexamples.append(Counterexample(name, dict(inputs), closed, direct))

    def merge(self, other: "OracleReport") -> "OracleReport":
        if self.tol != other.tol:
            raise ValueError("cannot merge reports with different tolerances")
        names = set(self.identity_checks) | set(other.identity_checks)
        merged = OracleReport(
            tol=self.tol,
            checks_run=self.checks_run + other.checks_run,
            identity_checks={n: self.identity_checks.get(n, 0) + other.identity_checks.get(n, 0)
                             for n in names},
            max_abs_discrepancy={n: max(self.max_abs_discrepancy.get(n, 0.0),
                                        other.max_abs_discrepancy.get(n, 0.0))
                                 for n in names},
            counterexamples=sorted(self.counterexamples + other.counterexamples,
                                   key=Counterexample.sort_key),
            samples={k: self.samples.get(k, 0) + other.samples.get(k, 0)
                     for k in set(self.samples) | set(other.samples)},
            skipped_infeasible=self.skipped_infeasible + other.skipped_infeasible,
            printed_chsh_checked=self.printed_chsh_checked + other.printed_chsh_checked,
            printed_chsh_mismatches=self.printed_chsh_mismatches + other.printed_chsh_mismatches,
        )
        return merged

    def to_dict(self) -> dict:
        return {
            "tol": self.tol,
            "passed": self.passed,
            "checks_run": self.checks_run,
            "identity_checks": dict(sorted(self.identity_checks.items())),
            "max_abs_discrepancy": dict(sorted(self.max_abs_discrepancy.items())),
            "samples": dict(sorted(self.samples.items())),
            "skipped_infeasible": self.skipped_infeasible,
            "printed_chsh_checked": self.printed_chsh_checked,
            "printed_chsh_mismatches": self.printed_chsh_mismatches,
            "printed_chsh_mismatch_rate": self.printed_chsh_mismatch_rate,
            "counterexamples": [c.to_dict() for c in
                                sorted(self.counterexamples, key=Counterexample.sort_key)],
        }


def _check_factorizable(report, game, inputs, x_values):
    case = _FactorizableCase(game, inputs)
    for name in ("factorizable_delta1", "factorizable_delta2"):
        report.record(name, inputs, *IDENTITIES[name][1](case))
    for x in x_values:
        for x_star in _ESS_X_STARS:
            case.inputs = inputs | {"x_star": x_star, "x": x}
            for name in ("ess_first_part", "ess_second_part"):
                report.record(name, case.inputs, *IDENTITIES[name][1](case))
        case.inputs = inputs | {"x": x}
        for name in ("classical_first_part", "classical_second_part",
                     "classical_second_simplified"):
            report.record(name, case.inputs, *IDENTITIES[name][1](case))


def _check_constrained(report, game, inputs, x_values):
    case = _ConstrainedCase(game, inputs)
    for name in ("completion", "ne_preservation", "defection_gain",
                 "reduced_chsh", "chsh_report_delta"):
        report.record(name, inputs, *IDENTITIES[name][1](case))
    for x in x_values:
        case.inputs = inputs | {"x": x}
        for name in _CONSTRAINED_X:
            report.record(name, case.inputs, *IDENTITIES[name][1](case))
    report.printed_chsh_checked += 1
    printed = printed_chsh_formula(case.free.p4, case.free.p9)
    if abs(printed - direct_chsh(case.box.p)) > report.tol:
        report.printed_chsh_mismatches += 1


def verify_identities(
    game: GameMatrix,
    grid: SweepGrid,
    tol: float = DEFAULT_TOL,
    families=("factorizable", "constrained"),
) -> OracleReport:
    """Compare every closed form against direct arithmetic over ``grid``.

    Factorizable samples come from the ``r``/``r_prime`` axes completed by
    the embedding; constrained samples from the ``p4 p5 p8 p9`` axes.  The
    ``x`` axis (default ``0.1 .. 1.0``) supplies mutant strategies.
    Infeasible draws are skipped and counted.
    """
    report = OracleReport(tol=tol)
    constraints = classical_embedding(game)
    if not constraints.feasible:
        raise InfeasibleError(f"kappa = {constraints.kappa:.12g} is not a probability")
    x_values = _x_values(grid)
    if "factorizable" in families and {"r", "r_prime"} <= set(grid.ranges):
        for r, rp in grid.points(("r", "r_prime")):
            try:
                params = sample_classical_params(constraints, r, rp)
            except InfeasibleError:
                report.skipped_infeasible += 1
                continue
            report.samples["factorizable"] += 1
            inputs = {"r": params.r, "s": params.s,
                      "r_prime": params.r_prime, "s_prime": params.s_prime}
            _check_factorizable(report, game, inputs, x_values)
    if "constrained" in families and {"p4", "p5", "p8", "p9"} <= set(grid.ranges):
        points = list(grid.points(("p4", "p5", "p8", "p9")))
        # margin keeps borderline points for the library to judge
        mask = _feasible_free_points(points, constraints.kappa, 2 * tol)
        report.skipped_infeasible += int(len(points) - mask.sum())
        for (p4, p5, p8, p9), keep in zip(points, mask):
            if not keep:
                continue
            inputs = {"p4": p4, "p5": p5, "p8": p8, "p9": p9}
            try:
                _check_constrained(report, game, inputs, x_values)
            except InfeasibleError:
                report.skipped_infeasible += 1
                continue
            report.samples["constrained"] += 1
    return report


# -- sweeps -------------------------------------------------------------------

@dataclass
class FactorizableSweepReport:
    embedding_defined: bool
    kappa: object
    points: int = 0
    embedded_count: int = 0
    positive_count: int = 0  # samples with Pi(0,x) - Pi(x,x) > tol at some x
    max_second_difference: float = -math.inf
    max_abs_discrepancy: float = 0.0  # closed form vs direct

    def to_dict(self) -> dict:
        return {
            "embedding_defined": self.embedding_defined,
            "kappa": self.kappa,
            "points": self.points,
            "embedded_count": self.embedded_count,
            "positive_count": self.positive_count,
            "ess_count": self.positive_count,
            "max_second_difference": (None if self.embedded_count == 0
                                      else self.max_second_difference),
            "max_abs_discrepancy": self.max_abs_discrepancy,
        }


def sweep_factorizable(
    game: GameMatrix, grid: SweepGrid, tol: float = DEFAULT_TOL
) -> FactorizableSweepReport:
    """Scan embedded product boxes for a positive second ESS difference.

    For ``omega1 > 0`` none exists: ``Pi(0,x) - Pi(x,x) = -x**2 (r-s)**2 omega1``.
    A game with ``omega1 = 0`` has no embedding and yields an empty scan.
    """
    try:
        constraints = classical_embedding(game)
    except UndefinedEmbeddingError:
        report = FactorizableSweepReport(False, None)
        report.points = sum(1 for _ in grid.points(("r", "r_prime")))
        return report
    report = FactorizableSweepReport(True, constraints.kappa)
    x_values = _x_values(grid)
    omega1 = constraints.omegas.omega1
    for r, rp in grid.points(("r", "r_prime")):
        report.points += 1
        try:
            params = sample_classical_params(constraints, r, rp)
        except InfeasibleError:
            continue
        report.embedded_count += 1
        corners = direct_corner_payoffs(box_from_factorizable(params).p, game.row_payoffs)
        positive = False
        for x in x_values:
            direct = direct_payoff(corners, 0.0, x) - direct_payoff(corners, x, x)
            closed = -x * x * (params.r - params.s) ** 2 * omega1
            report.max_abs_discrepancy = max(report.max_abs_discrepancy, abs(direct - closed))
            report.max_second_difference = max(report.max_second_difference, direct)
            positive = positive or direct > tol
        report.positive_count += positive
    return report


@dataclass(frozen=True)
class SweepRow:
    p4: float
    p5: float
    p8: float
    p9: float
    feasible: bool
    symmetric: object = None  # None when infeasible
    margin: float = math.nan
    delta: object = None
    local_range: object = None


@dataclass
class ConstrainedSweepReport:
    kappa: object
    kappa_usable: bool
    points: int = 0
    feasible_count: int = 0
    ess_count: int = 0
    symmetric_count: int = 0
    symmetric_ess_count: int = 0
    ess_without_violation_count: int = 0
    chsh_violation_count: int = 0
    delta_min: float = math.inf
    delta_max: float = -math.inf
    note: str = ""

    def merge(self, other: "ConstrainedSweepReport") -> "ConstrainedSweepReport":
        if (self.kappa, self.kappa_usable) != (other.kappa, other.kappa_usable):
            raise ValueError("cannot merge sweeps of different games")
        counts = ("points", "feasible_count", "ess_count", "symmetric_count",
                  "symmetric_ess_count", "ess_without_violation_count",
                  "chsh_violation_count")
        merged = ConstrainedSweepReport(self.kappa, self.kappa_usable, note=self.note)
        for name in counts:
            setattr(merged, name, getattr(self, name) + getattr(other, name))
        merged.delta_min = min(self.delta_min, other.delta_min)
        merged.delta_max = max(self.delta_max, other.delta_max)
        return merged

    def to_dict(self) -> dict:
        has = self.feasible_count > 0
        return {
            "kappa": self.kappa,
            "kappa_usable": self.kappa_usable,
            "points": self.points,
            "feasible_count": self.feasible_count,
            "ess_count": self.ess_count,
            "symmetric_count": self.symmetric_count,
            "symmetric_ess_count": self.symmetric_ess_count,
            "ess_without_violation_count": self.ess_without_violation_count,
            "chsh_violation_count": self.chsh_violation_count,
            "delta_min": self.delta_min if has else None,
            "delta_max": self.delta_max if has else None,
            "note": self.note,
        }


def sweep_constrained(
    game: GameMatrix, grid: SweepGrid, tol: float = DEFAULT_TOL
) -> tuple[ConstrainedSweepReport, list]:
    """Enumerate free tuples ``(p4, p5, p8, p9)`` and classify each completion.

    Returns the summary and one :class:`SweepRow` per grid point.  Games
    whose ratio is undefined or outside (0, 1) produce only infeasible rows.
    """
    om = omegas(game)
    kappa = om.kappa
    usable = kappa is not None and 0.0 < kappa < 1.0
    note = "" if usable else PD_KAPPA_NOTE
    report = ConstrainedSweepReport(kappa, usable, note=note)
    rows = []
    for p4, p5, p8, p9 in grid.points(("p4", "p5", "p8", "p9")):
        report.points += 1
        margin = p8 + p9 - p4 - p5
        if not usable:
            rows.append(SweepRow(p4, p5, p8, p9, False, margin=margin))
            continue
        try:
            box = build_constrained_box(ConstrainedFreeParams(p4, p5, p8, p9, kappa), tol)
        except InfeasibleError:
            rows.append(SweepRow(p4, p5, p8, p9, False, margin=margin))
            continue
        symmetric = exchange_symmetry_residuals(box, tol).symmetric
        chsh = chsh_report(box, tol)
        is_ess = margin * om.omega1 > tol
        report.feasible_count += 1
        report.ess_count += is_ess
        report.symmetric_count += symmetric
        report.symmetric_ess_count += is_ess and symmetric
        report.ess_without_violation_count += is_ess and symmetric and chsh.is_local_range
        report.chsh_violation_count += not chsh.is_local_range
        report.delta_min = min(report.delta_min, chsh.delta)
        report.delta_max = max(report.delta_max, chsh.delta)
        rows.append(SweepRow(p4, p5, p8, p9, True, symmetric, margin, chsh.delta,
                             chsh.is_local_range))
    return report, rows


def _csv_value(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(float(value))


def rows_to_csv(rows) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_csv_value(getattr(row, c)) for c in CSV_COLUMNS])
    return out.getvalue()


def report_to_json(report) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"
