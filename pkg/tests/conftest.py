from pathlib import Path

import pytest

from cyclepoly.multigraph import DirectedMultigraph

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

_acceptance: list[tuple[str, str]] = []


@pytest.fixture(scope="session")
def pyramid_graph() -> DirectedMultigraph:
    """Two vertices, a loop and two parallel edges each way; its polytope is a square pyramid."""
    return DirectedMultigraph.from_json((FIXTURES / "square_pyramid.json").read_text())


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "acceptance" in report.keywords:
        doc = report.nodeid.split("::")[-1]
        _acceptance.append((doc, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"[{outcome}] {name}")
