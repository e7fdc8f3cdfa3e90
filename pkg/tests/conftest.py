import os
from pathlib import Path

import pytest
from hypothesis import settings

from skodom.distributions import Atoms, Cantor, Gaussian, Uniform, geometric_atoms

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("SKODOM_NIGHTLY") == "1":
        return
    skip = pytest.mark.skip(reason="nightly meta-test; set SKODOM_NIGHTLY=1")
    for item in items:
        if "nightly" in item.keywords:
            item.add_marker(skip)


BERNOULLI = Atoms((-1.0, 1.0), (0.5, 0.5))
THREE_ATOM = Atoms((-1.0, 0.0, 2.0), (0.4, 0.4, 0.2))


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def golden_dir():
    return GOLDEN


def shipped():
    """Every fixture distribution, keyed by name."""
    return {
        "uniform": Uniform(),
        "bernoulli": BERNOULLI,
        "three_atom": THREE_ATOM,
        "gaussian": Gaussian(),
        "cantor": Cantor(),
        "geometric": geometric_atoms(),
    }
