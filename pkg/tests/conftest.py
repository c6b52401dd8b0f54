import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the summary prints them all at the end of the run."""

    def record(name, passed, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_features():
    """Labelled features of a modest synthetic dataset (40 + 40 two-second recordings)."""
    from swdetect.harness import featurize_dataset
    from swdetect.synthgen import gen_dataset

    return featurize_dataset(gen_dataset(40, 40, seed=11))
