import numpy as np
import pytest

from projchan import channels as ch
from projchan import zoo


@pytest.fixture(scope="session")
def wh3():
    return zoo.build(zoo.WernerHolevo(3))


@pytest.fixture(scope="session")
def casred():
    return zoo.build(zoo.CasimirReducibleExample())


@pytest.fixture(scope="session")
def coarse22():
    return zoo.build(zoo.CoarseGraining(2, 2))


def identity_channel(d):
    return ch.QuantumChannel(d, d, (np.eye(d, dtype=complex),), name=f"id:{d}")
