import warnings

import pytest

from atmoqkd.channel import LinkScenario, ModelValidityWarning, derive_params, season_scenario

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(label: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else ""))


@pytest.fixture
def acceptance():
    return record_acceptance


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def quiet_params(scenario: LinkScenario):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ModelValidityWarning)
        return derive_params(scenario)


@pytest.fixture
def summer_10km():
    sc = season_scenario("summer", distance=10e3)
    return sc, quiet_params(sc)


@pytest.fixture
def winter_10km():
    sc = season_scenario("winter", distance=10e3)
    return sc, quiet_params(sc)


@pytest.fixture
def summer_1km():
    sc = season_scenario("summer", distance=1e3)
    return sc, quiet_params(sc)
