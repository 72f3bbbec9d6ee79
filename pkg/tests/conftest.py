from pathlib import Path

import pytest

from chesscrypt.pgn import PgnReader

DATA = Path(__file__).parent / "data"
FIXTURE_CORPUS = DATA / "fixture_corpus.pgn"


@pytest.fixture(scope="session")
def corpus_path():
    return FIXTURE_CORPUS


@pytest.fixture(scope="session")
def corpus_records():
    with open(FIXTURE_CORPUS, "rb") as fh:
        return list(PgnReader(fh, "strict"))


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line; returns ``ok`` so the caller can assert on it."""

    def record(name, ok, detail, status=None):
        status = status or ("PASS" if ok else "FAIL")
        line = f"[{status}] {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
