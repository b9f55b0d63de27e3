from __future__ import annotations

import pytest
from hypothesis import settings

from bmsinfer.experiment import generate_synthetic_corpus
from bmsinfer.ingest import SidecarLabels, load_corpus

settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    """The 5-type x 40-file synthetic corpus used across suites."""
    return generate_synthetic_corpus(tmp_path_factory.mktemp("corpus"), 5, 40, 960, seed=7)


@pytest.fixture(scope="session")
def corpus(corpus_dir):
    return load_corpus(corpus_dir, SidecarLabels(corpus_dir / "labels.csv"))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
