import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from facadegram import corpus


@pytest.fixture(scope="session")
def corpus_layouts():
    return corpus.corpus()


@pytest.fixture(scope="session")
def corpus_dict(corpus_layouts):
    return dict(corpus_layouts)
