import numpy as np
import pytest

from eyemouth.synth import generate_corpus

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    """20-face synthetic corpus with templates, shared across the session."""
    d = tmp_path_factory.mktemp("corpus")
    generate_corpus(20, 7, d)
    return d
