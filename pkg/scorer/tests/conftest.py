import pytest

from neural_scorer.model import RelevanceScorer


@pytest.fixture(scope="session")
def scorer():
    return RelevanceScorer()
