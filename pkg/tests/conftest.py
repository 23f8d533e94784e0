import numpy as np
import pytest

from neargroup import corpus
from neargroup.tuples import to_tuple


@pytest.fixture(scope="session")
def corpus_mn():
    return corpus.corpus_mn()


@pytest.fixture(scope="session")
def corpus_all():
    return corpus.corpus_all()


@pytest.fixture(scope="session")
def corpus_tuples(corpus_all):
    """Exported admissible tuples for every bundled solution."""
    return {name: to_tuple(s) for name, s in corpus_all.items()}


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260809)
