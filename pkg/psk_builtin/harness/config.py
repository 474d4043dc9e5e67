"""Experiment configuration: one protocol over one instance family."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

import yaml

from psk_core.api import ProtocolRequest
from psk_core.config import ProtocolConstants, resolve_env_value
from psk_core.errors import ConfigError

logger = logging.getLogger(__name__)

FAMILIES = ("random-density", "planted-max", "planted-hh", "disj-embed", "sum-instance", "file")
CONSTANT_KEYS = ("c_rho", "c_gamma", "c_alpha", "sketch_constant", "hh_constant", "oracle_cutoff")


@dataclass(frozen=True)
class ExperimentConfig:
    protocol: str
    family: str = "random-density"
    n: int = 32
    density: float = 0.1
    p: float = 1.0
    eps: float = 0.25
    phi: float = 0.5
    kappa: float = 4.0
    trials: int = 10
    seed: int = 0
    boost_reps: int = 1
    oracle: bool = True
    record_timing: bool = False
    workers: int = 1
    file: Path | None = None
    constants: ProtocolConstants = field(default_factory=ProtocolConstants)

    def __post_init__(self) -> None:
        if not self.protocol:
            raise ConfigError("protocol", self.protocol, "a protocol name is required")
        if self.family not in FAMILIES:
            raise ConfigError("family", self.family, f"expected one of {', '.join(FAMILIES)}")
        if self.n < 2:
            raise ConfigError("n", self.n, "must be >= 2")
        if not 0 <= self.density <= 1:
            raise ConfigError("density", self.density, "must lie in [0, 1]")
        if not 0 <= self.p <= 2:
            raise ConfigError("p", self.p, "must lie in [0, 2]")
        if not 0 < self.eps < 1:
            raise ConfigError("eps", self.eps, "must lie in (0, 1)")
        if not 0 < self.phi <= 1:
            raise ConfigError("phi", self.phi, "must lie in (0, 1]")
        if self.kappa < 1:
            raise ConfigError("kappa", self.kappa, "must be >= 1")
        if self.trials < 0:
            raise ConfigError("trials", self.trials, "must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", self.seed, "must be a 64-bit unsigned value")
        if self.boost_reps < 1 or self.boost_reps % 2 == 0:
            raise ConfigError("boost_reps", self.boost_reps, "must be a positive odd integer")
        if self.workers < 1:
            raise ConfigError("workers", self.workers, "must be >= 1")
        if self.family == "disj-embed" and self.n % 2:
            raise ConfigError("n", self.n, "disj-embed needs an even n")
        if self.family == "file" and self.file is None:
            raise ConfigError("file", None, "the file family needs an instance path")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], *, constants: ProtocolConstants | None = None) -> "ExperimentConfig":
        """Build a config from plain keys; constant overrides sit at top level or under ``constants``."""

        known = {item.name for item in fields(cls)} - {"constants"}
        values: dict[str, Any] = {}
        overrides: dict[str, Any] = dict(data.get("constants") or {})
        for raw_key, raw_value in data.items():
            key = str(raw_key).replace("-", "_")
            value = resolve_env_value(raw_value)
            if key == "constants" or value is None:
                continue
            if key in CONSTANT_KEYS:
                overrides[key] = value
            elif key in known:
                values[key] = _coerce(key, value)
            else:
                logger.debug("ignoring unknown experiment key %s", raw_key)
        values.setdefault("protocol", "")
        base = constants or ProtocolConstants()
        return cls(constants=base.with_overrides(overrides), **values)

    @classmethod
    def from_yaml(
        cls,
        path: Path,
        *,
        constants: ProtocolConstants | None = None,
        overrides: Mapping[str, Any] | None = None,
    ) -> "ExperimentConfig":
        """Load a YAML experiment; non-``None`` ``overrides`` win over file values."""

        try:
            raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError("config", str(path), f"unreadable experiment file: {exc}") from exc
        if not isinstance(raw, Mapping):
            raise ConfigError("config", str(path), "expected a mapping at the top level")
        merged = {**raw, **{key: value for key, value in (overrides or {}).items() if value is not None}}
        return cls.from_mapping(merged, constants=constants)

    def with_overrides(self, overrides: Mapping[str, Any]) -> "ExperimentConfig":
        """Apply non-``None`` overrides (CLI flags) on top of this config."""

        merged = {key: value for key, value in overrides.items() if value is not None}
        if not merged:
            return self
        constant_overrides = {key: merged.pop(key) for key in list(merged) if key in CONSTANT_KEYS}
        updated = replace(self, **{key: _coerce(key, value) for key, value in merged.items()})
        if constant_overrides:
            updated = replace(updated, constants=updated.constants.with_overrides(constant_overrides))
        return updated

    def request(self) -> ProtocolRequest:
        return ProtocolRequest(
            p=self.p,
            eps=self.eps,
            phi=self.phi,
            kappa=self.kappa,
            boost_reps=self.boost_reps,
            constants=self.constants,
        )

    def oracle_enabled(self) -> bool:
        if not self.oracle:
            return False
        if self.n > self.constants.oracle_cutoff:
            cutoff = self.constants.oracle_cutoff
            logger.warning("n=%d exceeds the oracle cutoff %d; oracle column left empty", self.n, cutoff)
            return False
        return True

    def to_dict(self) -> dict[str, Any]:
        payload = asdict(self)
        payload["file"] = str(self.file) if self.file else None
        payload["constants"] = self.constants.to_dict()
        return payload


_INT_FIELDS = {"n", "trials", "seed", "boost_reps", "workers"}
_FLOAT_FIELDS = {"density", "p", "eps", "phi", "kappa"}
_BOOL_FIELDS = {"oracle", "record_timing"}


def _coerce(key: str, value: Any) -> Any:
    try:
        if key in _INT_FIELDS:
            if isinstance(value, bool):
                raise ValueError("booleans are not integers")
            return int(value)
        if key in _FLOAT_FIELDS:
            return float(value)
        if key in _BOOL_FIELDS:
            return _as_bool(value)
        if key == "file":
            return Path(value)
        return str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, value, str(exc)) from exc


def _as_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    normalized = str(value).strip().lower()
    if normalized in {"1", "true", "yes", "on"}:
        return True
    if normalized in {"0", "false", "no", "off"}:
        return False
    raise ValueError(f"cannot read {value!r} as a boolean")
