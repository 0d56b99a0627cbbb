import numpy as np
import pytest

from monkeyzipf import ensemble, keyboard, spacings
from monkeyzipf.cli import DEFAULT_SEED


@pytest.fixture(scope="session")
def seed():
    return DEFAULT_SEED


@pytest.fixture(scope="session")
def uniform26(seed):
    """Uniform spacings, K=26, s=0.18: the default cutoff-ensemble keyboard."""
    return keyboard.make_keyboard(spacings.make_spacings(spacings.UNIFORM, 26, seed), 0.18)


@pytest.fixture(scope="session")
def miller26():
    return keyboard.Keyboard.equal(26, 0.18)


@pytest.fixture(scope="session")
def cut_uniform26(uniform26):
    return ensemble.enumerate_cutoff(uniform26, 4)


@pytest.fixture
def fib_keyboard():
    return keyboard.Keyboard(np.array([0.5, 0.25]), 0.25)
