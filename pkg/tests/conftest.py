import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


# The honest (projection-backed) sector splits are by far the most expensive
# computations in the suite, and several test modules want to poke at the
# same trees.  Build each one once per session.

@pytest.fixture(scope="session")
def third_pi_split():
    from bergsplit.domains import HalfPlane, Sector
    from bergsplit.evaluators import Sum
    from bergsplit.kernels import Kernel
    from bergsplit.sectors import split_sector

    sec = Sector(0.0, 0.0, np.pi / 3)
    f = Sum([Kernel(HalfPlane(0.5 * np.pi, 0.0), 1.1 * np.exp(1j * np.pi / 6)),
             Kernel(HalfPlane(0.5 * np.pi, 0.0), 0.4 + 0.5j)],
            [1.0, 0.6 - 0.2j])
    return f, sec, split_sector(f, sec)


@pytest.fixture(scope="session")
def wide_split():
    from bergsplit.domains import HalfPlane, Sector
    from bergsplit.evaluators import Sum
    from bergsplit.kernels import Kernel
    from bergsplit.sectors import split_sector

    sec = Sector(0.0, 0.0, 0.9 * np.pi)
    f = Sum([Kernel(HalfPlane(0.5 * np.pi, 0.0), 1.0 + 1.4j)], [1.0])
    return f, sec, split_sector(f, sec)


def random_points(rng, n, box=3.0, center=0.0):
    """n random complex points in a square box around ``center``."""
    xy = rng.uniform(-box, box, size=(2, n))
    return center + xy[0] + 1j * xy[1]
