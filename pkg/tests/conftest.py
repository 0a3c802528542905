import numpy as np
import pytest
from hypothesis import settings

from mfsi import backends, forward, geometry

# Property tests must be reproducible run to run.
settings.register_profile("deterministic", derandomize=True)
settings.load_profile("deterministic")


@pytest.fixture(params=backends.available())
def backend(request):
    """Run the test under every importable kernel backend."""
    previous = backends.active()
    backends.select(request.param)
    yield request.param
    backends.select(previous.NAME)


@pytest.fixture(scope="session")
def paper_grid():
    """Default band: centered at zero, half width 3*pi, 48 samples."""
    return forward.FrequencyGrid(kappa=0.0, half_band=3 * np.pi, n=48)


@pytest.fixture(scope="session")
def disk_scene():
    """Unit disk at the origin, default polynomial amplitude, pulse at t=4."""
    return forward.SourceScene(
        shape=geometry.Ball(1.0),
        profile=forward.Polynomial2D(),
        trajectory=geometry.FixedPoint((0.0, 0.0)),
        pulses=[4.0],
    )


@pytest.fixture(scope="session")
def testing_grid_2d():
    return geometry.SamplingGrid((-6.0, -6.0), (6.0, 6.0), (121, 121))
