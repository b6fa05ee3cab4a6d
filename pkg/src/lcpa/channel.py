"""Uplink channel generation, MRC composite gains, per-user rates and sample counts.

Channels are i.i.d. Rayleigh: user k transmits over h_k in C^N with entries
CN(0, varrho_k), where varrho_k is the linear-scale path loss. The receiver
applies maximal ratio combining, which collapses the antenna dimension into a
K x K matrix of composite gains

    G[k, k] = ||h_k||^2,      G[k, l] = |h_k^H h_l|^2 / ||h_k||^2   (l != k).

All quantities are linear (watts, Hz, seconds); dB/dBm conversions happen only
at the config-parsing boundary (see :mod:`lcpa.config_io`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SystemConfig",
    "ChannelRealization",
    "GainMatrix",
    "DegenerateChannelError",
    "draw_channels",
    "gains_from_channels",
    "rate",
    "rates",
    "sample_count",
]


class DegenerateChannelError(ValueError):
    """Raised when a channel vector has zero norm and MRC gains are undefined."""


@dataclass
class SystemConfig:
    """Static system parameters.

    Attributes
    ----------
    bandwidth_hz : float
        Transmission bandwidth B in Hz.
    time_budget_s : float
        Total transmission time T in seconds.
    noise_power_w : float
        Receiver noise power sigma^2 in watts.
    total_power_w : float
        Total transmit power budget P_sum in watts, shared by all users.
    num_users : int
        Number of users K.
    num_antennas : int
        Number of receive antennas N.
    path_loss_linear : float or array-like
        Per-user linear path loss varrho_k (dimensionless). A scalar is
        broadcast to all users.
    """

    bandwidth_hz: float
    time_budget_s: float
    noise_power_w: float
    total_power_w: float
    num_users: int
    num_antennas: int
    path_loss_linear: object = 1.0

    def __post_init__(self) -> None:
        for name in ("bandwidth_hz", "time_budget_s", "noise_power_w", "total_power_w"):
            val = float(getattr(self, name))
            if not (val > 0.0 and math.isfinite(val)):
                raise ValueError(f"{name} must be strictly positive, got {val!r}")
            setattr(self, name, val)
        self.num_users = int(self.num_users)
        self.num_antennas = int(self.num_antennas)
        if self.num_users < 1:
            raise ValueError("num_users must be >= 1")
        if self.num_antennas < 1:
            raise ValueError("num_antennas must be >= 1")
        pl = np.atleast_1d(np.asarray(self.path_loss_linear, dtype=float))
        if pl.size == 1:
            pl = np.full(self.num_users, float(pl[0]))
        if pl.shape != (self.num_users,):
            raise ValueError(
                f"path_loss_linear must be scalar or length {self.num_users}, got shape {pl.shape}"
            )
        if np.any(pl < 0.0) or not np.all(np.isfinite(pl)):
            raise ValueError("path_loss_linear entries must be finite and >= 0")
        self.path_loss_linear = pl


@dataclass
class ChannelRealization:
    """One draw of the K user channel vectors, stacked as a (K, N) complex array."""

    vectors: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim != 2:
            raise ValueError("vectors must be a (K, N) array")
        if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
            raise ValueError("channel entries must be finite")
        self.vectors = v


@dataclass
class GainMatrix:
    """Composite MRC channel gains, shape (K, K), linear W/W."""

    gains: np.ndarray

    def __post_init__(self) -> None:
        g = np.asarray(self.gains, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("gains must be a square matrix")
        if np.any(g < 0.0):
            raise ValueError("gains must be nonnegative")
        self.gains = g

    @property
    def num_users(self) -> int:
        return self.gains.shape[0]

    def diagonal(self) -> np.ndarray:
        return np.diag(self.gains).copy()


def draw_channels(config: SystemConfig, seed: int) -> ChannelRealization:
    """Draw one seeded realization of all K channel vectors.

    Entries are i.i.d. circularly-symmetric complex Gaussian with per-user
    variance varrho_k (real and imaginary parts each varrho_k / 2). The
    generator is PCG64 seeded with ``seed`` and the Gaussians come from an
    explicit Box-Muller transform of its uniforms, so identical (config, seed)
    pairs give bit-identical realizations on any platform.
    """
    k, n = config.num_users, config.num_antennas
    rng = np.random.Generator(np.random.PCG64(seed))
    u1 = rng.random((k, n))
    u2 = rng.random((k, n))
    # Box-Muller; 1 - u1 keeps the log argument in (0, 1].
    r = np.sqrt(-2.0 * np.log1p(-u1))
    z = r * (np.cos(2.0 * np.pi * u2) + 1j * np.sin(2.0 * np.pi * u2))
    scale = np.sqrt(config.path_loss_linear / 2.0)[:, None]
    return ChannelRealization(vectors=scale * z)


def gains_from_channels(ch: ChannelRealization) -> GainMatrix:
    """Reduce channel vectors to the composite MRC gain matrix."""
    h = ch.vectors
    norms_sq = np.sum(np.abs(h) ** 2, axis=1)
    if np.any(norms_sq == 0.0):
        bad = int(np.flatnonzero(norms_sq == 0.0)[0])
        raise DegenerateChannelError(f"channel vector of user {bad} has zero norm")
    cross = np.abs(h.conj() @ h.T) ** 2  # |h_k^H h_l|^2
    g = cross / norms_sq[:, None]
    np.fill_diagonal(g, norms_sq)
    return GainMatrix(gains=g)


def rate(g: GainMatrix, p: np.ndarray, noise_power_w: float, k: int) -> float:
    """Spectral efficiency of user k in bits/s/Hz under MRC.

    rate_k = log2(1 + G[k,k] p_k / (sum_{l != k} G[k,l] p_l + sigma^2))
    """
    return float(rates(g, p, noise_power_w)[k])


def rates(g: GainMatrix, p: np.ndarray, noise_power_w: float) -> np.ndarray:
    """Vector of all K user rates in bits/s/Hz."""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0.0):
        raise ValueError("powers must be nonnegative")
    gm = g.gains
    total = gm @ p + noise_power_w
    interference = total - np.diag(gm) * p
    return np.log2(total / interference)


def sample_count(config: SystemConfig, rate_k: float, task, continuous: bool = True) -> float:
    """Training samples collected from one user: B*T*rate/D_k (+ floor) + A_k.

    ``continuous=True`` returns the real-valued relaxation used inside the
    optimizers; ``continuous=False`` floors the transmitted-sample term, which
    is what reports quote.
    """
    if rate_k < 0.0:
        raise ValueError("rate must be nonnegative")
    transmitted = config.bandwidth_hz * config.time_budget_s * rate_k / task.bits_per_sample
    if not continuous:
        transmitted = math.floor(transmitted)
    return transmitted + task.initial_samples
