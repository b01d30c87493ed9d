from __future__ import annotations

import pytest
from hypothesis import settings

from trc.corpus import load_corpus, run_corpus
from trc.engine import EngineConfig, core_rules

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture(scope="session")
def corpus_report(corpus):
    """One full corpus run, with per-entry registry/ruleset snapshots."""
    return run_corpus(corpus, keep_contexts=True)


@pytest.fixture(scope="session")
def full_rules(corpus_report):
    """Core rules plus every derived rule the corpus run registered."""
    return corpus_report.ruleset


@pytest.fixture(scope="session")
def registry(corpus_report):
    return corpus_report.registry


@pytest.fixture()
def core():
    return core_rules(EngineConfig())
