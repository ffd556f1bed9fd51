from __future__ import annotations

from pathlib import Path

import pytest

import fixture_gen
from revcurate.corpus import Corpus, read_corpus
from revcurate.judge import JudgeConfig, MockBackend

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"


@pytest.fixture(scope="session")
def corpus200() -> Corpus:
    return read_corpus(FIXTURES / "corpus200.jsonl")


@pytest.fixture(scope="session")
def judged200(corpus200) -> dict:
    return {sample.id: fixture_gen.plan_judgment(sample.id) for sample in corpus200}


@pytest.fixture(scope="session")
def mock_dir(tmp_path_factory) -> Path:
    directory = tmp_path_factory.mktemp("mock-fixtures")
    fixture_gen.write_mock_fixtures(directory)
    return directory


@pytest.fixture(scope="session")
def mock_backend(mock_dir) -> MockBackend:
    return MockBackend(mock_dir)


@pytest.fixture()
def judge_config() -> JudgeConfig:
    return JudgeConfig(max_retries=2, max_parallel=4, backoff_base=0.0)


@pytest.fixture(scope="session")
def annot10() -> Corpus:
    return read_corpus(FIXTURES / "annot10.jsonl")


def pytest_runtest_logreport(report):
    # One visible pass/fail line per acceptance criterion.
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        status = "PASS" if report.passed else "FAIL"
        print(f"\n[{status}] acceptance: {name}", flush=True)
