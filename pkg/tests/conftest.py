"""
Shared fixtures for the nematic-colloids tests.
"""
import os
from unittest.mock import patch

import numpy as np
import pytest


@pytest.fixture
def rng():
    """Fixture providing a seeded random generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def clean_env():
    """Fixture removing every environment variable the package reads."""
    names = [
        "NEMATIC_COLLOIDS_CONFIG",
        "NEMATIC_COLLOIDS_OUTPUT_DIR",
        "NEMATIC_COLLOIDS_THREADS",
        "NEMATIC_COLLOIDS_LOG_FILE",
        "NEMATIC_COLLOIDS_DISABLE_FILE_LOG",
        "LOG_LEVEL",
    ]
    env = {k: v for k, v in os.environ.items() if k not in names}
    with patch.dict(os.environ, env, clear=True):
        yield env


@pytest.fixture
def output_env(tmp_path, clean_env):
    """Fixture directing all outputs into a temporary directory."""
    with patch.dict(os.environ, {"NEMATIC_COLLOIDS_OUTPUT_DIR": str(tmp_path / "results")}):
        yield tmp_path / "results"
