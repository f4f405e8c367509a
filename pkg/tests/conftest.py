from pathlib import Path

import pytest

from hpmkill.scenario import baseline_scenario

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def baseline():
    return baseline_scenario()


@pytest.fixture
def config_dir():
    return CONFIG_DIR


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Return a recorder that prints and stores one pass/fail line for an acceptance criterion."""

    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        line = f"criterion {number} {'PASS' if passed else 'FAIL'}: {title} ({detail})"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
