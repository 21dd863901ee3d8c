import sys

import pytest

from knowsat import THEORIES
from knowsat.dsl import load, parse_term

sys.setrecursionlimit(20_000)

CORPUS = sorted(p.stem for p in THEORIES.glob("*.th"))


def theory(name: str):
    return load(THEORIES / f"{name}.th")


def term(th, text: str, variables=("x", "y", "z")):
    return parse_term(text, th.symbols, variables)


@pytest.fixture(scope="session")
def enc():
    return theory("e_enc_ex34")


@pytest.fixture(scope="session")
def hom():
    return theory("e_hom_ex35")


@pytest.fixture(scope="session")
def pref():
    return theory("e_pref")


@pytest.fixture(scope="session")
def blind():
    return theory("e_blind")


@pytest.fixture(scope="session")
def mal():
    return theory("e_mal")


# -- acceptance report ---------------------------------------------------------

_CRITERIA: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    if rep.passed and not hasattr(rep, "wasxfail"):
        note = None
    elif hasattr(rep, "wasxfail"):
        note = f"{item.name} xfail: {rep.wasxfail}"
    else:
        note = f"{item.name} {rep.outcome}"
    _CRITERIA.setdefault(mark.args[0], []).append(note)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        notes = [x for x in _CRITERIA[n] if x is not None]
        verdict = "FAIL" if notes else "PASS"
        terminalreporter.write_line(f"criterion {n}: {verdict}" +
                                    ("" if not notes else "  (" + "; ".join(notes) + ")"))
