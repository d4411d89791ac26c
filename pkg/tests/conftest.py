import numpy as np
import pytest

from colorfringe.pattern import PatternSpec


@pytest.fixture
def small_spec() -> PatternSpec:
    """Small pattern with the same 12 px/cycle geometry as the default."""
    return PatternSpec(width=96, height=120, cycles=10.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)
