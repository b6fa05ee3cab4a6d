import numpy as np
import pytest

from lcpa import draw_channels, gains_from_channels, two_user_cnn_svm


@pytest.fixture(scope="session")
def scenario():
    """Reference two-user scenario at N = 10."""
    return two_user_cnn_svm()


@pytest.fixture(scope="session")
def scenario_n4():
    """Same scenario with a small 4-antenna array (visible interference)."""
    return two_user_cnn_svm(num_antennas=4)


def draw_gains(config, seed):
    return gains_from_channels(draw_channels(config, seed))
