import time
from types import SimpleNamespace

import pytest

from mzres.io_store import cached_distribution
from mzres.resonator import RadialPotential, resonances


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    return str(tmp_path_factory.mktemp("profile-cache"))


@pytest.fixture(scope="session")
def dist3(cache_dir):
    return cached_distribution(3, 1e-9, cache_dir)


@pytest.fixture(scope="session")
def dist5(cache_dir):
    return cached_distribution(5, 1e-9, cache_dir)


@pytest.fixture(scope="session")
def rs60():
    """The acceptance resonance set: d=3, a=1, v=6, searched up to R=60."""
    t0 = time.monotonic()
    rs = resonances(RadialPotential(3, [(1.0, 6.0)]), 60.0)
    return SimpleNamespace(rs=rs, seconds=time.monotonic() - t0)
