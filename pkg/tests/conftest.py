import numpy as np
import pytest

from geometry import Jet
from lorenz import LorenzParams


CLASSIC = (10.0, 28.0, 8.0 / 3.0)


@pytest.fixture
def classic():
    return LorenzParams(sigma=CLASSIC[0], rho=CLASSIC[1], beta=CLASSIC[2])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_params(rng, count, rho_low=1.5, rho_high=35.0):
    """Parameter triples with sigma, beta away from zero."""
    return [
        LorenzParams(
            sigma=float(rng.uniform(0.5, 12.0)),
            rho=float(rng.uniform(rho_low, rho_high)),
            beta=float(rng.uniform(0.5, 4.0)),
        )
        for _ in range(count)
    ]


def random_jets(rng, count, box=1.0):
    return [
        Jet(x=rng.uniform(-box, box, 2), y=rng.uniform(-box, box, 2))
        for _ in range(count)
    ]
