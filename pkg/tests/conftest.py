import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from huygens_relay.beamform import SurfaceGeometry  # noqa: E402
from huygens_relay.circuit import calibrate  # noqa: E402
from huygens_relay.pattern import BiasGrid, extract_codebook, sweep_pattern  # noqa: E402


@pytest.fixture(scope="session")
def cell():
    return calibrate()


@pytest.fixture(scope="session")
def huygens_pattern(cell):
    return sweep_pattern(cell, BiasGrid.uniform(), 10.0, 15.0)


@pytest.fixture(scope="session")
def dl_codebook(huygens_pattern):
    return extract_codebook(huygens_pattern, "dl", "transmit", 32)


@pytest.fixture(scope="session")
def joint_codebook(huygens_pattern):
    return extract_codebook(huygens_pattern, "dl", "transmit", 32, min_amplitude=0.3, secondary_bins=32)


@pytest.fixture(scope="session")
def geometry():
    return SurfaceGeometry()
