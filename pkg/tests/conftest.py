import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def fixture_corpus():
    """All well-formed BVH fixtures."""
    return sorted(p for p in FIXTURES.glob("*.bvh") if not p.name.startswith("malformed"))


def malformed_corpus():
    return sorted(FIXTURES.glob("malformed_*.bvh"))
