import itertools
import json

import pytest

from epr_ess import GameMatrix, ProbabilityBox, outcome_index

# reference game, kappa = 2/5
GAME_G = (5.0, 1.0, 2.0, 3.0)

BOX_A = (0.0, 0.4, 0.4, 0.2,
         0.1, 0.3, 0.3, 0.3,
         0.1, 0.3, 0.3, 0.3,
         0.1, 0.3, 0.3, 0.3)

# satisfies the embedding constraints but is not exchange-symmetric
BOX_B = (0.0, 0.5, 0.4, 0.1,
         0.1, 0.4, 0.3, 0.2,
         0.3, 0.2, 0.1, 0.4,
         0.1, 0.4, 0.3, 0.2)

PR_BOX = (0.5, 0.0, 0.0, 0.5,
          0.5, 0.0, 0.0, 0.5,
          0.5, 0.0, 0.0, 0.5,
          0.0, 0.5, 0.5, 0.0)

FREE_A = (0.2, 0.1, 0.3, 0.1)
FREE_B = (0.1, 0.1, 0.2, 0.3)


def swap_players(p):
    """Entry-wise image of a box under exchanging the two players."""
    out = [0.0] * 16
    for pi1, pi2, a, b in itertools.product((1, -1), (1, -1), (1, 2), (1, 2)):
        out[outcome_index(pi2, pi1, b, a) - 1] = p[outcome_index(pi1, pi2, a, b) - 1]
    return tuple(out)


@pytest.fixture
def game_g():
    return GameMatrix(*GAME_G)


@pytest.fixture
def box_a():
    return ProbabilityBox(BOX_A)


@pytest.fixture
def box_b():
    return ProbabilityBox(BOX_B)


@pytest.fixture
def uniform_box():
    return ProbabilityBox.uniform()


@pytest.fixture
def write_json(tmp_path):
    def write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)
    return write


# -- acceptance gate reporting --------------------------------------------------

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.failed):
        detail = dict(report.user_properties).get("detail", "")
        _CRITERIA[number] = (title, report.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed, detail = _CRITERIA[number]
        line = f"{'PASS' if passed else 'FAIL'}  criterion {number}: {title}"
        terminalreporter.write_line(f"{line} ({detail})" if detail else line)
