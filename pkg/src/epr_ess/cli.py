"""Command-line front end.

Exit codes: 0 success, 1 domain-level failure (invalid box, infeasible
construction, failed oracle check), 2 input or usage error.
"""

from __future__ import annotations

import argparse
import functools
import json
import logging
import math
import sys
from pathlib import Path

from .embedding import (
    ConstrainedFreeParams,
    build_constrained_box,
    defection_gain,
    ess_margin,
    quantum_constraint_residuals,
    reduced_chsh,
)
from .exceptions import InfeasibleError
from .game_model import DEFAULT_TOL, PD_KAPPA_NOTE, GameMatrix, classify_ordering, omegas
from .joint_box import (
    ProbabilityBox,
    chsh_report,
    exchange_symmetry_residuals,
    product_form_test,
    validate_box,
)
from .oracle import (
    SweepGrid,
    report_to_json,
    rows_to_csv,
    sweep_constrained,
    sweep_factorizable,
    verify_identities,
)
from .payoff_engine import (
    StrategyProfile,
    ess_classify,
    nash_check,
    pure_payoffs,
    symmetry_residuals,
)

log = logging.getLogger("epr_ess")

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class InputError(Exception):
    """Malformed input file or flag; maps to exit status 2."""


def _read_json(path, what):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"{what} file {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} file {path}: invalid JSON ({exc.msg})") from exc


def _numbers(doc, key, count, what):
    if not isinstance(doc, dict) or key not in doc:
        raise InputError(f"{what} file: missing field '{key}'")
    values = doc[key]
    if not isinstance(values, list) or len(values) != count:
        got = len(values) if isinstance(values, list) else type(values).__name__
        raise InputError(f"{what} file: field '{key}' must hold {count} numbers, got {got}")
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise InputError(f"{what} file: field '{key}'[{i}] is not a finite number: {v!r}")
    return [float(v) for v in values]


def load_game(path) -> GameMatrix:
    return GameMatrix(*_numbers(_read_json(path, "game"), "a", 4, "game"))


def load_box(path) -> ProbabilityBox:
    return ProbabilityBox(tuple(_numbers(_read_json(path, "box"), "p", 16, "box")))


def write_box(box: ProbabilityBox, path):
    Path(path).write_text(json.dumps({"p": list(box.p)}) + "\n", encoding="utf-8")


def _emit(doc, out=None):
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def game_section(game: GameMatrix) -> dict:
    om = omegas(game)
    ordering = classify_ordering(game)
    section = {
        "payoffs": list(game.row_payoffs),
        "omega1": om.omega1,
        "omega2": om.omega2,
        "omega3": om.omega3,
        "kappa": om.kappa,
        "ordering": {
            "is_strict_pd": ordering.is_strict_pd,
            "satisfies_generalized_pd_inequality": ordering.satisfies_generalized_pd_inequality,
            "kappa_in_unit_interval": ordering.kappa_in_unit_interval,
            "label": ordering.label.value,
        },
    }
    if ordering.is_strict_pd:
        section["note"] = PD_KAPPA_NOTE
    return section


def _kappa_usable(game):
    kappa = omegas(game).kappa
    if kappa is None:
        return None, "kappa undefined (omega1 = 0)"
    if not 0.0 < kappa < 1.0:
        return kappa, f"kappa = {kappa:.12g} outside (0,1)"
    return kappa, None


def cmd_validate(args) -> int:
    box = load_box(args.box)
    report = validate_box(box, args.tol)
    _emit(report.to_dict(), args.out)
    return EXIT_OK if report.valid else EXIT_DOMAIN


def cmd_classify(args) -> int:
    game = load_game(args.game)
    doc = game_section(game)
    _, problem = _kappa_usable(game)
    doc["embedding_feasible"] = problem is None
    if problem:
        doc["embedding_problem"] = problem
    _emit(doc, args.out)
    return EXIT_OK


def analyze(game: GameMatrix, box: ProbabilityBox, tol=DEFAULT_TOL, x_star=0.0) -> dict:
    """Every analysis section for one game/box pair, as a JSON-ready dict."""
    validation = validate_box(box, tol)
    doc = {"game": game_section(game), "box": validation.to_dict()}
    if not validation.valid:
        return doc
    om = omegas(game)
    params = product_form_test(box, tol)
    doc["factorizable"] = None if params is None else {
        "r": params.r, "s": params.s, "r_prime": params.r_prime, "s_prime": params.s_prime,
    }
    exchange = exchange_symmetry_residuals(box, tol)
    doc["exchange_symmetry"] = {"residuals": exchange.residuals, "symmetric": exchange.symmetric}

    table = pure_payoffs(box, game, tol)
    sym = symmetry_residuals(table, tol)
    doc["pure_payoffs"] = table.to_dict()
    doc["symmetric_game"] = {"residuals": list(sym.residuals), "symmetric": sym.symmetric}
    nash = nash_check(StrategyProfile(x_star, x_star), table, tol)
    row_nash = nash_check(StrategyProfile(x_star, x_star), table.row_game(), tol)
    doc["nash"] = {"profile": [x_star, x_star], "is_nash": nash.is_nash,
                   "gap_a": nash.gap_a, "gap_b": nash.gap_b,
                   "row_game_is_nash": row_nash.is_nash}

    margin = box.prob(8) + box.prob(9) - box.prob(4) - box.prob(5)
    doc["row_player_identities"] = {
        "ne_gap": table.pi_a_SpSp - table.pi_a_SSp,
        "defection_gain": table.pi_a_SpS - table.pi_a_SS,
        "defection_gain_closed_form": defection_gain(box, game),
        "margin": margin,
        "ess_coefficient": margin * om.omega1,
    }
    if om.kappa is not None:
        residuals = quantum_constraint_residuals(box, game, tol)
        doc["embedding_constraints"] = {"kappa": om.kappa, "residuals": residuals.residuals,
                                        "satisfied": residuals.satisfied}
        if residuals.satisfied and 0.0 <= om.kappa <= 1.0:
            free = ConstrainedFreeParams.from_box(box, om.kappa)
            doc["quantum_ess"] = ess_margin(free, game, tol).to_dict()
            doc["reduced_chsh"] = reduced_chsh(free, tol).to_dict()
    if sym.symmetric:
        doc["ess"] = ess_classify(x_star, table, tol).to_dict()
    doc["chsh"] = chsh_report(box, tol).to_dict()
    return doc


def cmd_analyze(args) -> int:
    game, box = load_game(args.game), load_box(args.box)
    doc = analyze(game, box, args.tol, args.x_star)
    _emit(doc, args.out)
    return EXIT_OK if doc["box"]["valid"] else EXIT_DOMAIN


def cmd_build(args) -> int:
    game = load_game(args.game)
    kappa, problem = _kappa_usable(game)
    if problem:
        sys.stderr.write(f"error: {problem}\n{PD_KAPPA_NOTE}\n")
        return EXIT_USAGE
    free = ConstrainedFreeParams(*args.free, kappa)
    try:
        box = build_constrained_box(free, args.tol)
    except InfeasibleError as exc:
        _emit({"feasible": False, "violations": [
            {"name": n, "value": v, "message": f"{n} = {v:.12g} out of range"}
            for n, v in exc.violations]})
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    if args.out:
        write_box(box, args.out)
    report = ess_margin(free, game, args.tol)
    _emit({"feasible": True, "box": {"p": list(box.p)}, "quantum_ess": report.to_dict(),
           "chsh": chsh_report(box, args.tol).to_dict()})
    return EXIT_OK


def _grid(args, names):
    return SweepGrid.uniform(names, args.step, seed=args.seed, sample_count=args.samples)


def cmd_sweep(args) -> int:
    game = load_game(args.game)
    report, rows = sweep_constrained(game, _grid(args, ("p4", "p5", "p8", "p9")), args.tol)
    summary = {"constrained": report.to_dict()}
    kappa = omegas(game).kappa
    if kappa is not None and 0.0 <= kappa <= 1.0:
        summary["factorizable"] = sweep_factorizable(
            game, _grid(args, ("r", "r_prime")), args.tol).to_dict()
    if args.out:
        Path(args.out).write_text(rows_to_csv(rows), encoding="utf-8")
    _emit(summary, args.summary)
    return EXIT_OK


def cmd_oracle(args) -> int:
    game = load_game(args.game)
    _, problem = _kappa_usable(game)
    if problem:
        sys.stderr.write(f"error: {problem}; the identity checks need 0 < kappa < 1\n")
        return EXIT_DOMAIN
    grid = _grid(args, ("r", "r_prime", "p4", "p5", "p8", "p9"))
    report = verify_identities(game, grid, args.tol)
    text = report_to_json(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_DOMAIN


def _positive(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _probability(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {text}")
    return value


def _count(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epr-ess",
        description="Quantum 2x2 games played through EPR-Bohm joint probability boxes.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive, default=DEFAULT_TOL,
                        help="absolute tolerance for equality checks (default 1e-9)")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a box file")
    p.add_argument("box")
    p.add_argument("--out", help="also write the JSON report here")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classify", parents=[common], help="omegas and ordering of a game")
    p.add_argument("game")
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("analyze", parents=[common], help="full analysis of a game/box pair")
    p.add_argument("game")
    p.add_argument("box")
    p.add_argument("--x-star", type=_probability, default=0.0,
                   help="incumbent strategy for the Nash/ESS tests (default 0)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("build", parents=[common], help="constrained box from p4 p5 p8 p9")
    p.add_argument("game")
    p.add_argument("--free", nargs=4, type=float, required=True,
                   metavar=("P4", "P5", "P8", "P9"))
    p.add_argument("--out", help="write the box file here")
    p.set_defaults(func=cmd_build)

    for name, func, text in (("sweep", cmd_sweep, "grid sweep of constrained boxes"),
                             ("oracle", cmd_oracle, "brute-force identity checks")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("game")
        p.add_argument("--step", type=_positive, default=0.1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=_count, default=0,
                       help="seeded random points added to the lattice")
        p.add_argument("--out", help="CSV rows (sweep) or JSON report (oracle)")
        if name == "sweep":
            p.add_argument("--summary", help="also write the JSON summary here")
        p.set_defaults(func=func)
    return parser


@functools.lru_cache(maxsize=1)
def _shared_parser() -> argparse.ArgumentParser:
    return build_parser()


def main(argv=None) -> int:
    args = _shared_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        log.debug("rejected input", exc_info=True)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
