"""Shared fixtures and the acceptance-criteria reporter.

Acceptance tests register one line per criterion; the summary hook prints
them all at the end of the run so the pass/fail ledger is visible regardless
of output capturing.
"""

import numpy as np
import pytest

ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


def record_criterion(label: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_LINES.append((label, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in ACCEPTANCE_LINES:
        status = "PASS" if passed else "FAIL"
        line = f"{status}  {label}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_full_params_array(rng, n):
    """Uniform draws over the eight-angle box, as an (n, 8) array."""
    lo = np.zeros(8)
    hi = np.array([np.pi / 2] * 3 + [2 * np.pi] * 5)
    return rng.uniform(lo, hi, size=(n, 8))
