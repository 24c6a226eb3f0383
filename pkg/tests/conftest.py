import numpy as np
import pytest

from twoslit.synthetic import reference_camera_pair


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def reference_pair():
    return reference_camera_pair()
