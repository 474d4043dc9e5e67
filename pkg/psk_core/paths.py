"""Per-user locations: the user-level ``psk.toml`` and the default store for generated instances."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from platformdirs import user_config_dir, user_data_dir

APP_NAME = "prodsketch"
CONFIG_DIR_ENV = "PSK_CONFIG_DIR"
DATA_DIR_ENV = "PSK_DATA_DIR"


@dataclass(frozen=True)
class UserDirs:
    """Platform directories, each replaceable by an explicit root (tests, ``PSK_*_DIR``)."""

    config_root: Path | None = None
    data_root: Path | None = None

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None) -> "UserDirs":
        source = os.environ if env is None else env
        config, data = source.get(CONFIG_DIR_ENV), source.get(DATA_DIR_ENV)
        return cls(config_root=Path(config) if config else None, data_root=Path(data) if data else None)

    def config_dir(self) -> Path:
        return self.config_root or Path(user_config_dir(APP_NAME, appauthor=False))

    def data_dir(self) -> Path:
        return self.data_root or Path(user_data_dir(APP_NAME, appauthor=False))

    def config_file(self, filename: str) -> Path:
        return self.config_dir() / filename

    def instances_dir(self) -> Path:
        """Where ``psk gen`` stores instances when no ``--out`` is given."""

        return self.data_dir() / "instances"
