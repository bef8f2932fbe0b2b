import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import BOX_A, BOX_B, FREE_A, FREE_B
from epr_ess import (
    ConstrainedFreeParams,
    EssStatus,
    FactorizableParams,
    GameMatrix,
    InfeasibleError,
    ProbabilityBox,
    StrategyProfile,
    UndefinedEmbeddingError,
    box_from_factorizable,
    build_constrained_box,
    chsh_report,
    classical_embedding,
    classical_ess_difference,
    ess_classify,
    ess_margin,
    exchange_symmetry_residuals,
    nash_check,
    pure_payoffs,
    quantum_constraint_residuals,
    reduced_chsh,
    sample_classical_params,
)
from epr_ess.embedding import (
    complete_constrained,
    constrained_violations,
    defection_gain,
    factorizable_deltas,
    printed_chsh_formula,
    reduced_chsh_formula,
)
from epr_ess.payoff_engine import symmetric_payoff

KAPPA = 0.4
unit = st.floats(0, 1, allow_nan=False)
cents = st.integers(-1000, 1000).map(lambda v: v / 100)


@st.composite
def embeddable_games(draw):
    """Games with omega1 > 0 and 0 < kappa < 1."""
    omega1 = draw(st.integers(1, 1000)) / 100
    kappa = draw(st.integers(1, 99)) / 100
    a2, a4 = draw(cents), None
    a4 = a2 + kappa * omega1
    a1 = draw(cents)
    a3 = a1 - a2 + a4 - omega1
    return GameMatrix(a1, a2, a3, a4)


@st.composite
def feasible_free(draw, kappa=None):
    """Feasible constrained tuples, built by rejection on a fine lattice."""
    if kappa is None:
        kappa = draw(st.integers(1, 99)) / 100
    p4, p5, p8, p9 = (draw(st.integers(0, 100)) / 100 for _ in range(4))
    free = ConstrainedFreeParams(p4, p5, p8, p9, kappa)
    assume(not constrained_violations(free))
    return free


# -- classical embedding --------------------------------------------------------

def test_embedding_reference_game(game_g):
    c = classical_embedding(game_g)
    assert c.kappa == pytest.approx(0.4) and c.feasible
    assert c.to_dict()["difference_rule"] == "r - s = r' - s'"


@pytest.mark.parametrize("a, kappa", [((4, 0, 5, 2), 2.0), ((3, 0, 5, 1), -1.0)])
def test_embedding_infeasible(a, kappa):
    c = classical_embedding(GameMatrix(*a))
    assert c.kappa == pytest.approx(kappa) and not c.feasible


def test_embedding_undefined():
    with pytest.raises(UndefinedEmbeddingError):
        classical_embedding(GameMatrix(1, 2, 2, 3))


def test_sample_params(game_g):
    c = classical_embedding(game_g)
    assert sample_classical_params(c, 0.7, 0.6).as_tuple() == pytest.approx((0.7, 0.5, 0.6, 0.4))
    assert sample_classical_params(c, 0.4, 0.4).as_tuple() == pytest.approx((0.4,) * 4)
    with pytest.raises(InfeasibleError) as err:
        sample_classical_params(c, 0.1, 0.9)
    assert err.value.violations[0][0] == "s"
    assert err.value.violations[0][1] == pytest.approx(-0.4)


def test_sample_params_refuses_infeasible_kappa():
    with pytest.raises(InfeasibleError):
        sample_classical_params(classical_embedding(GameMatrix(3, 0, 5, 1)), 0.5, 0.5)


@pytest.mark.parametrize("params, x, expected", [
    ((0.7, 0.5, 0.6, 0.4), 1.0, (0.0, -0.2)),
    ((0.4, 0.4, 0.4, 0.4), 1.0, (0.0, 0.0)),
    ((0.7, 0.5, 0.6, 0.4), 0.5, (0.0, -0.05)),
])
def test_classical_ess_difference(game_g, params, x, expected):
    assert classical_ess_difference(FactorizableParams(*params), game_g, x) == pytest.approx(expected, abs=1e-12)


def test_classical_ess_difference_rejects_unembedded(game_g):
    with pytest.raises(ValueError, match="embedding"):
        classical_ess_difference(FactorizableParams(0.7, 0.5, 0.6, 0.5), game_g, 1.0)


@given(embeddable_games(), unit, unit, unit)
def test_classical_identity_matches_direct(game, r, r_prime, x):
    c = classical_embedding(game)
    try:
        params = sample_classical_params(c, r, r_prime)
    except InfeasibleError:
        assume(False)
    table = pure_payoffs(box_from_factorizable(params), game)
    first, second = classical_ess_difference(params, game, x)
    direct_first = symmetric_payoff(0, 0, table) - symmetric_payoff(x, 0, table)
    direct_second = symmetric_payoff(0, x, table) - symmetric_payoff(x, x, table)
    assert first == pytest.approx(direct_first, abs=1e-9)
    assert second == pytest.approx(direct_second, abs=1e-9)
    assert second == pytest.approx(-x * x * (params.r - params.s) ** 2 * c.omegas.omega1, abs=1e-9)
    assert second <= 1e-12
    d1, d2 = factorizable_deltas(params, game)
    assert d2 == pytest.approx(0.0, abs=1e-9)


# -- quantum constraints ----------------------------------------------------------

@pytest.mark.parametrize("box", [BOX_A, BOX_B])
def test_constraint_residuals_vanish(game_g, box):
    report = quantum_constraint_residuals(ProbabilityBox(box), game_g)
    assert report.satisfied
    assert max(abs(v) for v in report.residuals.values()) <= 1e-12


def test_constraint_residuals_uniform(uniform_box, game_g):
    report = quantum_constraint_residuals(uniform_box, game_g)
    assert not report.satisfied
    assert report.residuals["p5_plus_p15"] == pytest.approx(0.1)


@pytest.mark.parametrize("free, box", [(FREE_A, BOX_A), (FREE_B, BOX_B)])
def test_build_reference_boxes(free, box):
    built = build_constrained_box(ConstrainedFreeParams(*free, KAPPA))
    assert built.p == pytest.approx(box, abs=1e-15)


def test_build_derived_values():
    d = ConstrainedFreeParams(*FREE_A, KAPPA).derived()
    assert d == pytest.approx({"p1": 0.0, "p12": 0.3, "p14": 0.3, "p15": 0.3})
    d = ConstrainedFreeParams(*FREE_B, KAPPA).derived()
    assert d == pytest.approx({"p1": 0.0, "p12": 0.4, "p14": 0.4, "p15": 0.3})


def test_build_infeasible_reports_violations():
    with pytest.raises(InfeasibleError, match=r"p15 = -0\.1 out of range") as err:
        build_constrained_box(ConstrainedFreeParams(0, 0.5, 0, 0, KAPPA))
    names = [name for name, _ in err.value.violations]
    assert "p15" in names


def test_build_rejects_bad_kappa():
    with pytest.raises(ValueError, match="kappa"):
        build_constrained_box(ConstrainedFreeParams(*FREE_A, -1.0))


def test_from_box_round_trip(box_b):
    free = ConstrainedFreeParams.from_box(box_b, KAPPA)
    assert (free.p4, free.p5, free.p8, free.p9) == FREE_B


@given(feasible_free())
def test_feasible_tuples_satisfy_all_constraints(free):
    box = build_constrained_box(free)
    game = GameMatrix(1.0, 0.0, free.kappa, free.kappa)  # omega1 = 1, omega2 = kappa
    assert classical_embedding(game).kappa == pytest.approx(free.kappa)
    residuals = quantum_constraint_residuals(box, game).residuals
    assert max(abs(v) for v in residuals.values()) <= 1e-12


@given(embeddable_games(), st.data())
def test_ne_preserved_for_every_feasible_box(game, data):
    kappa = classical_embedding(game).kappa
    free = data.draw(feasible_free(kappa=kappa))
    table = pure_payoffs(build_constrained_box(free), game)
    assert table.pi_a_SSp == pytest.approx(table.pi_a_SpSp, abs=1e-9)
    verdict = nash_check(StrategyProfile(0, 0), table.row_game())
    assert verdict.is_nash
    assert verdict.gap_a == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("kappa", [0.1, 0.25, 0.4, 0.5, 0.75, 0.9])
def test_symmetric_constrained_boxes_keep_bimatrix_nash(kappa):
    # p9 = p5 and p14 = p15 give the exchange-symmetric slice of the family
    game = GameMatrix(2.0, 0.0, 1.0 + kappa, kappa)  # omega1 = 1, omega2 = kappa
    assert classical_embedding(game).kappa == pytest.approx(kappa)
    checked = 0
    for p4 in np.linspace(0, 1, 41):
        for p5 in np.linspace(0, 1, 41):
            free = ConstrainedFreeParams(p4, p5, 1 - 2 * kappa + p5, p5, kappa)
            if constrained_violations(free):
                continue
            box = build_constrained_box(free)
            assert exchange_symmetry_residuals(box, tol=1e-12).symmetric
            assert nash_check(StrategyProfile(0, 0), pure_payoffs(box, game)).is_nash
            checked += 1
    assert checked > 0


def test_asymmetric_constrained_box_can_break_column_nash(game_g):
    # the constraints only fix the row player's deviation gain
    box = build_constrained_box(ConstrainedFreeParams(0.0, 0.0, 0.0, 0.1, KAPPA))
    table = pure_payoffs(box, game_g)
    verdict = nash_check(StrategyProfile(0, 0), table)
    assert verdict.gap_a == pytest.approx(0.0, abs=1e-12)
    assert verdict.gap_b == pytest.approx(-0.5) and not verdict.is_nash
    assert nash_check(StrategyProfile(0, 0), table.row_game()).is_nash


@given(embeddable_games(), st.data())
def test_row_player_identities(game, data):
    kappa = classical_embedding(game).kappa
    free = data.draw(feasible_free(kappa=kappa))
    box = build_constrained_box(free)
    table = pure_payoffs(box, game)
    gain = table.pi_a_SpS - table.pi_a_SS
    omega1 = classical_embedding(game).omegas.omega1
    assert defection_gain(box, game) == pytest.approx(gain, abs=1e-9)
    assert gain == pytest.approx(free.margin * omega1, abs=1e-9)
    for x in np.linspace(0.1, 1.0, 10):
        direct = symmetric_payoff(0, x, table) - symmetric_payoff(x, x, table)
        assert direct == pytest.approx(x * x * omega1 * free.margin, abs=1e-9)


# -- ESS margin -----------------------------------------------------------------

def test_ess_margin_box_a(game_g, box_a):
    report = ess_margin(ConstrainedFreeParams(*FREE_A, KAPPA), game_g)
    assert report.margin == pytest.approx(0.1)
    assert report.coefficient == pytest.approx(0.5)
    assert report.ne_preserved and report.is_ess and not report.violates_chsh
    verdict = ess_classify(0.0, pure_payoffs(box_a, game_g))
    assert verdict.status is EssStatus.ESS_BY_CONDITION_2
    assert verdict.margin == pytest.approx(report.coefficient)


def test_ess_margin_box_b(game_g, box_b):
    report = ess_margin(ConstrainedFreeParams(*FREE_B, KAPPA), game_g)
    assert report.margin == pytest.approx(0.3)
    assert report.coefficient == pytest.approx(1.5)
    table = pure_payoffs(box_b, game_g)
    assert table.pi_a_SpS == pytest.approx(3.1) and table.pi_a_SS == pytest.approx(1.6)
    assert not exchange_symmetry_residuals(box_b).symmetric


def test_ess_margin_neutral(game_g):
    free = ConstrainedFreeParams(0.2, 0.2, 0.2, 0.2, KAPPA)
    assert free.derived() == pytest.approx({"p1": 0.2, "p12": 0.2, "p14": 0.4, "p15": 0.2})
    report = ess_margin(free, game_g)
    assert report.margin == pytest.approx(0.0, abs=1e-15)
    assert not report.is_ess


def test_ess_margin_rejects_kappa_mismatch(game_g):
    with pytest.raises(ValueError, match="kappa"):
        ess_margin(ConstrainedFreeParams(*FREE_A, 0.5), game_g)


def test_ess_margin_rejects_infeasible(game_g):
    with pytest.raises(InfeasibleError):
        ess_margin(ConstrainedFreeParams(0, 0.5, 0, 0, KAPPA), game_g)


# -- reduced CHSH ---------------------------------------------------------------

def test_reduced_chsh_box_a():
    r = reduced_chsh(ConstrainedFreeParams(*FREE_A, KAPPA))
    assert r.delta == pytest.approx(-0.8, abs=1e-12)
    assert r.reduced_matches
    assert r.printed == pytest.approx(-1.0) and not r.printed_matches


def test_reduced_chsh_box_b():
    r = reduced_chsh(ConstrainedFreeParams(*FREE_B, KAPPA))
    assert r.delta == pytest.approx(-0.4, abs=1e-12)
    assert r.printed == pytest.approx(-1.0) and not r.printed_matches


def test_reduced_chsh_zero():
    free = ConstrainedFreeParams(0.25, 0.2, 0.3, 0.25, KAPPA)
    r = reduced_chsh(free)
    assert r.delta == pytest.approx(0.0, abs=1e-12) and r.reduced_matches


@given(feasible_free())
def test_reduced_chsh_depends_only_on_p4_plus_p9(free):
    box = build_constrained_box(free)
    delta = chsh_report(box).delta
    assert delta == pytest.approx(reduced_chsh_formula(free.p4, free.p9), abs=1e-12)
    total = free.p4 + free.p9
    assert reduced_chsh_formula(total, 0.0) == pytest.approx(delta, abs=1e-12)
    # the printed reduction agrees only when p9 vanishes
    agrees = abs(printed_chsh_formula(free.p4, free.p9) - delta) <= 1e-9
    assert agrees == (abs(free.p9) <= 1e-9)


def test_s_prime_constraint_is_half_the_printed_sum():
    # p5 + p7 from the completion equals half of the printed bracket
    for free in (ConstrainedFreeParams(*FREE_A, KAPPA), ConstrainedFreeParams(*FREE_B, KAPPA)):
        box = complete_constrained(free)
        p = (None,) + box.p
        bracket = 1 - p[1] + p[4] + p[5] - p[8] + p[9] - p[12] - p[14] + p[15]
        assert p[5] + p[7] == pytest.approx(bracket / 2)
        assert p[5] + p[7] == pytest.approx(KAPPA)
