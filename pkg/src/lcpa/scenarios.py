"""Reference experiment scenario used by the CLI defaults and the test suite."""

from __future__ import annotations

from .channel import SystemConfig
from .config_io import db_to_linear, dbm_to_watts
from .error_model import LearningTask

__all__ = ["two_user_cnn_svm"]


def two_user_cnn_svm(num_antennas: int = 10, time_budget_s: float = 5.0):
    """Two-user uplink benchmark: a CNN task on 28x28 grayscale digit images
    and an SVM task on 8x8 digit images.

    System side: 180 kHz bandwidth, -87 dBm noise power, 13 dBm total budget,
    -100 dB path loss for both users. Task side: the CNN curve (a, b) =
    (7.3, 0.69) with 6276 bits per image (8*28*28 + 4, label bits included)
    and 300 initial samples; the SVM curve (5.2, 0.72) with 324 bits per image
    (5*8*8 + 4) and 200 initial samples, weighted rho = 1.2 because its curve
    fit is the looser of the two. Returns (config, tasks).
    """
    config = SystemConfig(
        bandwidth_hz=180e3,
        time_budget_s=time_budget_s,
        noise_power_w=dbm_to_watts(-87.0),
        total_power_w=dbm_to_watts(13.0),
        num_users=2,
        num_antennas=num_antennas,
        path_loss_linear=db_to_linear(-100.0),
    )
    tasks = [
        LearningTask(a=7.3, b=0.69, rho=1.0, bits_per_sample=6276, initial_samples=300.0),
        LearningTask(a=5.2, b=0.72, rho=1.2, bits_per_sample=324, initial_samples=200.0),
    ]
    return config, tasks
