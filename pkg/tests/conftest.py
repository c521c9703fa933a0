"""Shared fixtures for the Z-group test suite"""

import os
import sys

import numpy as np
import pytest

# Add the repository root to Python path so `app`, `modules` and `utils` import
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from modules.demos import exm_spec, laurent_spec  # noqa: E402
from modules.zgroup import UNORDERED, build_model  # noqa: E402


@pytest.fixture(scope="session")
def exm_model():
    """Ordered model with D = Q*d0 at 1 and u at sqrt(2)."""
    return build_model(exm_spec())


@pytest.fixture(scope="session")
def unordered_model():
    """The same group without its order."""
    return build_model(exm_spec(UNORDERED))


@pytest.fixture(scope="session")
def laurent_model():
    """D spanned by the powers of pi, u valued at 1/(pi - 1)."""
    return build_model(laurent_spec())


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
