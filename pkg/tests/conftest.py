import sys
from pathlib import Path

import pytest

from tagscore import build_inventory

sys.path.insert(0, str(Path(__file__).parent))

# Example inventory: two top-level senses; A.1 and B have the arities that
# make Pr(A.1a | A) = 1/4 and Pr(B.2 | B) = 1/3.
EXAMPLE_RECORDS = [
    ("w", "A", None), ("w", "A.1", "A"), ("w", "A.2", "A"),
    ("w", "A.1a", "A.1"), ("w", "A.1b", "A.1"),
    ("w", "B", None), ("w", "B.1", "B"), ("w", "B.2", "B"), ("w", "B.3", "B"),
]

EXAMPLE_INVENTORY_TEXT = "".join(
    f"{lex}\t{tag}\t{parent or '-'}\n" for lex, tag, parent in EXAMPLE_RECORDS)


@pytest.fixture(scope="session")
def example_inv():
    return build_inventory(EXAMPLE_RECORDS)


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8", newline="")
        return str(p)
    return _write


# -- acceptance reporting ----------------------------------------------------

_acceptance: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and report.passed:
        return
    key = marker.args
    ok = report.passed and _acceptance.get(key, True)
    _acceptance[key] = ok


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), ok in sorted(_acceptance.items()):
        terminalreporter.write_line(f"criterion {number} ({title}): {'PASS' if ok else 'FAIL'}")
