"""Test fixtures and configuration for pytest."""

import json
import os
import random
import tempfile
from pathlib import Path

import pytest

from formalcurves.artin import ArtinSpec, RingElem


SLOW_ENV_VAR = "FORMALCURVES_SLOW_TESTS"


def pytest_collection_modifyitems(config, items):
    """Skip tests marked slow unless FORMALCURVES_SLOW_TESTS=1."""
    if os.environ.get(SLOW_ENV_VAR) == "1":
        return
    skip = pytest.mark.skip(reason=f"set {SLOW_ENV_VAR}=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def tmp_dir():
    """Create a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def sample_config_data():
    """Return sample configuration data."""
    return {
        "ring": {"num_vars": 2, "trunc_order": 4},
        "checks": {
            "seed": 7,
            "trials": 10,
            "num_vars": 1,
            "trunc_order": 2,
            "corolla": {"max_vertices": 1, "max_valence": 2, "max_genus": 1, "max_edges": 2},
            "mutation_threshold": 0.5,
        },
        "output": {"pretty": True, "indent": 4},
        "log_level": "INFO",
    }


@pytest.fixture
def config_file(tmp_dir, sample_config_data):
    """Create a temporary config file."""
    config_path = tmp_dir / "formalcurves.json"
    with open(config_path, "w") as f:
        json.dump(sample_config_data, f)
    return config_path


@pytest.fixture
def fixtures_dir():
    """Return path to test fixtures directory."""
    return Path(__file__).parent / "fixtures"


@pytest.fixture
def spec1():
    """Q[e1]/(e1^4)."""
    return ArtinSpec(1, 3)


@pytest.fixture
def spec2():
    """Q[e1, e2]/m^3."""
    return ArtinSpec(2, 2)


@pytest.fixture
def eps(spec1):
    return RingElem.var(spec1, 1)


@pytest.fixture
def rng():
    return random.Random(20240501)
