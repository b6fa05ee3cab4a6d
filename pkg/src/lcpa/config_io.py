"""Experiment config files: INI with a [system] section and one [task.*]
section per user, units carried in the key names.

Example::

    [system]
    bandwidth_khz = 180
    time_budget_s = 5
    noise_power_dbm = -87
    total_power_dbm = 13
    num_antennas = 10
    path_loss_db = -100

    [task.cnn]
    a = 7.3
    b = 0.69
    rho = 1.0
    bits_per_sample = 6276
    initial_samples = 300

dB/dBm quantities are converted to linear watts here, once, so nothing past
this boundary ever sees logarithmic units. A task section may override
path_loss_db for its user.
"""

from __future__ import annotations

import configparser

from .channel import SystemConfig
from .error_model import LearningTask

__all__ = ["ConfigError", "dbm_to_watts", "db_to_linear", "load_config"]


class ConfigError(ValueError):
    """Raised for missing sections/keys or unparsable values in a config file."""


def dbm_to_watts(dbm: float) -> float:
    return 1e-3 * 10.0 ** (dbm / 10.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def _get_float(section, key, where):
    if key not in section:
        raise ConfigError(f"missing key '{key}' in [{where}]")
    try:
        return float(section[key])
    except ValueError:
        raise ConfigError(f"key '{key}' in [{where}] is not a number: {section[key]!r}") from None


def load_config(path) -> tuple[SystemConfig, list[LearningTask]]:
    """Parse an experiment config file into (SystemConfig, tasks)."""
    parser = configparser.ConfigParser()
    read = parser.read(path, encoding="utf-8")
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    if "system" not in parser:
        raise ConfigError("missing [system] section")
    sys_sec = parser["system"]
    task_names = [s for s in parser.sections() if s.startswith("task.") or s == "task"]
    if not task_names:
        raise ConfigError("no [task.*] sections found")

    default_pl_db = _get_float(sys_sec, "path_loss_db", "system")
    path_loss = []
    tasks = []
    for name in task_names:
        sec = parser[name]
        rho = float(sec["rho"]) if "rho" in sec else 1.0
        try:
            tasks.append(
                LearningTask(
                    a=_get_float(sec, "a", name),
                    b=_get_float(sec, "b", name),
                    rho=rho,
                    bits_per_sample=int(_get_float(sec, "bits_per_sample", name)),
                    initial_samples=_get_float(sec, "initial_samples", name),
                )
            )
        except ValueError as exc:
            raise ConfigError(f"invalid task parameters in [{name}]: {exc}") from None
        pl_db = float(sec["path_loss_db"]) if "path_loss_db" in sec else default_pl_db
        path_loss.append(db_to_linear(pl_db))

    try:
        config = SystemConfig(
            bandwidth_hz=1e3 * _get_float(sys_sec, "bandwidth_khz", "system"),
            time_budget_s=_get_float(sys_sec, "time_budget_s", "system"),
            noise_power_w=dbm_to_watts(_get_float(sys_sec, "noise_power_dbm", "system")),
            total_power_w=dbm_to_watts(_get_float(sys_sec, "total_power_dbm", "system")),
            num_users=len(tasks),
            num_antennas=int(_get_float(sys_sec, "num_antennas", "system")),
            path_loss_linear=path_loss,
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [system] values: {exc}") from None
    return config, tasks
