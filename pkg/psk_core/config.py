"""Layered configuration for protocol constants.

Settings resolve in order: CLI overrides, environment, workspace ``psk.toml``
(searched upward from the start directory), user ``psk.toml`` in the platform
config directory, then the dataclass defaults.
"""

from __future__ import annotations

import logging
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

import tomllib

from .errors import ConfigError
from .paths import UserDirs

logger = logging.getLogger(__name__)

CONFIG_FILE_NAME = "psk.toml"

_ENV_KEY_MAP: dict[str, str] = {
    "sketch_constant": "PSK_SKETCH_CONSTANT",
    "c_rho": "PSK_C_RHO",
    "c_gamma": "PSK_C_GAMMA",
    "c_alpha": "PSK_C_ALPHA",
    "hh_constant": "PSK_HH_CONSTANT",
    "blocked_group_size": "PSK_BLOCKED_GROUP_SIZE",
    "oracle_cutoff": "PSK_ORACLE_CUTOFF",
    "max_entry": "PSK_MAX_ENTRY",
    "sampler_repetitions": "PSK_SAMPLER_REPETITIONS",
    "boost_reps": "PSK_BOOST_REPS",
}


def resolve_env_value(value: Any) -> Any:
    """Expand a ``${ENV_NAME}`` string from the environment; other values pass through."""

    if isinstance(value, str) and value.startswith("${") and value.endswith("}"):
        env_name = value[2:-1].strip()
        if env_name:
            return os.getenv(env_name, "")
    return value


def _as_float(key: str, value: Any) -> float:
    value = resolve_env_value(value)
    try:
        parsed = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, value, "expected a number") from exc
    if parsed <= 0:
        raise ConfigError(key, value, "must be positive")
    return parsed


def _as_int(key: str, value: Any, *, minimum: int = 1) -> int:
    value = resolve_env_value(value)
    if isinstance(value, bool):
        raise ConfigError(key, value, "expected an integer")
    try:
        parsed = int(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, value, "expected an integer") from exc
    if parsed < minimum:
        raise ConfigError(key, value, f"must be >= {minimum}")
    return parsed


@dataclass(frozen=True)
class ProtocolConstants:
    """Tunable constants; the asymptotic worst-case constants are far larger."""

    sketch_constant: float = 6.0
    c_rho: float = 8.0
    c_gamma: float = 8.0
    c_alpha: float = 1.0
    hh_constant: float = 8.0
    blocked_group_size: int = 6
    oracle_cutoff: int = 512
    max_entry: int = 2**32 - 1
    sampler_repetitions: int = 0
    boost_reps: int = 1

    def __post_init__(self) -> None:
        if self.boost_reps % 2 == 0:
            raise ConfigError("boost_reps", self.boost_reps, "must be odd")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ProtocolConstants":
        """Parse known keys from ``data``; unknown keys are ignored with a debug log."""

        return cls(**_parse_constants(data))

    def with_overrides(self, overrides: Mapping[str, Any]) -> "ProtocolConstants":
        parsed = _parse_constants(overrides)
        return replace(self, **parsed) if parsed else self

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


_FLOAT_KEYS = {item.name for item in fields(ProtocolConstants) if item.type in ("float", float)}
_INT_KEYS = {item.name for item in fields(ProtocolConstants) if item.type in ("int", int)}


def _parse_constants(data: Mapping[str, Any]) -> dict[str, Any]:
    parsed: dict[str, Any] = {}
    for key, raw in data.items():
        normalized = str(key).replace("-", "_")
        if raw is None:
            continue
        if normalized in _FLOAT_KEYS:
            parsed[normalized] = _as_float(normalized, raw)
        elif normalized in _INT_KEYS:
            minimum = 0 if normalized == "sampler_repetitions" else 1
            parsed[normalized] = _as_int(normalized, raw, minimum=minimum)
        else:
            logger.debug("ignoring unknown constant %s", key)
    return parsed


def _load_config_from_file(path: Path) -> dict[str, Any]:
    if not path.is_file():
        return {}
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        logger.warning("unable to read %s: %s", path, exc)
        return {}
    section = data.get("constants", data)
    if not isinstance(section, Mapping):
        return {}
    return dict(section)


@dataclass
class ConfigResolver:
    """Resolve protocol constants while honoring layered configuration."""

    config_filename: str = CONFIG_FILE_NAME
    user_dirs: UserDirs | None = None
    cli_overrides: Mapping[str, Any] | None = None
    env: Mapping[str, str] | None = None

    def __post_init__(self) -> None:
        self.user_dirs = self.user_dirs or UserDirs.from_env(self.env)
        self.cli_overrides = {
            str(key).replace("-", "_"): value for key, value in (self.cli_overrides or {}).items() if value is not None
        }
        self.env = self.env if self.env is not None else os.environ

    def find_workspace_config(self, start_dir: Path | None = None) -> Path | None:
        """Look for ``psk.toml`` by walking parent directories."""
        start = (Path(start_dir) if start_dir else Path.cwd()).resolve()
        for current in (start, *start.parents):
            candidate = current / self.config_filename
            if candidate.is_file():
                return candidate
        return None

    def resolve_setting(self, key: str, start_dir: Path | None = None) -> Any | None:
        """Return the raw value for `key` using CLI, env, workspace, user order."""
        assert self.cli_overrides is not None
        if (value := self.cli_overrides.get(key)) is not None:
            return value
        if value := self._env_value(key):
            return value
        workspace_path = self.find_workspace_config(start_dir)
        if workspace_path is not None and (value := _load_config_from_file(workspace_path).get(key)) is not None:
            return value
        if (value := self._user_config_layer().get(key)) is not None:
            return value
        return None

    def load_constants(self, start_dir: Path | None = None) -> ProtocolConstants:
        """Collect every resolvable constant and build a validated ``ProtocolConstants``."""
        layered: dict[str, Any] = {}
        for key in sorted(_FLOAT_KEYS | _INT_KEYS):
            value = self.resolve_setting(key, start_dir)
            if value is not None and value != "":
                layered[key] = value
        constants = ProtocolConstants.from_mapping(layered)
        logger.debug("resolved constants %s", constants)
        return constants

    def _env_value(self, key: str) -> str | None:
        assert self.env is not None
        alias = _ENV_KEY_MAP.get(key)
        if alias:
            return self.env.get(alias) or None
        return None

    def _user_config_layer(self) -> dict[str, Any]:
        assert self.user_dirs is not None
        return _load_config_from_file(self.user_dirs.config_file(self.config_filename))
