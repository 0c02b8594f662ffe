"""Job configuration shared by the CLI and the HTTP service."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .forecast import DEFAULT_LEVELS, check_levels
from .market import Horizon

DATA_DIR_ENV = "CFDCAST_DATA"


@dataclass
class JobConfig:
    data_dir: Path
    profiles_dir: Path | None = None
    horizons: tuple[Horizon, ...] = ()
    n_draws: int = 10_000
    seed: int = 0
    levels: tuple[float, ...] = DEFAULT_LEVELS
    days_per_month: float = 21.0
    drop_stale: bool = False
    noise: bool = False
    workers: int = 1
    max_draw_export: int = 1_000
    port: int = 8000

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)
        if not self.data_dir.is_dir():
            raise ConfigError(f"data directory not found: {self.data_dir}")
        if self.profiles_dir is not None:
            self.profiles_dir = Path(self.profiles_dir)
        if self.n_draws < 1:
            raise ConfigError("n_draws must be at least 1")
        self.levels = check_levels(self.levels)
        if self.days_per_month <= 0:
            raise ConfigError("days_per_month must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    @staticmethod
    def resolve_data_dir(explicit) -> Path:
        """CLI flag wins; otherwise the environment override."""
        if explicit:
            return Path(explicit)
        env = os.environ.get(DATA_DIR_ENV)
        if env:
            return Path(env)
        raise ConfigError(f"no data directory given (flag or ${DATA_DIR_ENV})")


def parse_horizons(values) -> tuple[Horizon, ...]:
    out = []
    for v in values:
        try:
            out.append(Horizon(v))
        except ValueError:
            valid = ", ".join(h.value for h in Horizon)
            raise ConfigError(f"unknown horizon {v!r} (valid: {valid})")
    return tuple(out)
