import math

import numpy as np
import pytest

from qnetcap import ChannelParams, QubitState


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_qubit_state(rng) -> QubitState:
    p = rng.uniform(0.0, 1.0)
    radius = rng.uniform(0.0, 1.0) * math.sqrt(p * (1.0 - p))
    phase = rng.uniform(0.0, 2.0 * math.pi)
    return QubitState(p=p, gamma=radius * np.exp(1j * phase))


def random_channel_params(rng) -> ChannelParams:
    return ChannelParams(eta=rng.uniform(0.0, 1.0), s=rng.uniform(0.0, 1.0))
