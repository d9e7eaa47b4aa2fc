import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import worked_example as example  # noqa: E402
from isoperturb import Graph  # noqa: E402

DATA = Path(__file__).parent / "data"

_acceptance: list[tuple[str, str, str]] = []


@pytest.fixture
def example_graphs():
    return Graph.from_edges(6, example.EDGES_A), Graph.from_edges(6, example.EDGES_B)


@pytest.fixture
def data_dir():
    return DATA


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    result = yield
    rep = result.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        _acceptance.append((marker.args[0], status, getattr(item, "detail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for label, status, detail in sorted(_acceptance):
        line = f"{status}  {label}"
        terminalreporter.write_line(f"{line}  ({detail})" if detail else line)
