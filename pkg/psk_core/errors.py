"""Error hierarchy shared by the prodsketch runtime."""

from __future__ import annotations


class PSKError(Exception):
    """Base class for prodsketch errors."""


class InvalidInputError(PSKError, ValueError):
    """Raised when a matrix, vector or parameter violates a precondition."""


class ProtocolViolationError(PSKError):
    """Raised when a protocol misuses its session or endpoints."""


class CodecError(PSKError):
    """Raised when a wire element cannot be encoded or decoded."""


class ConfigError(PSKError):
    """Raised when a configuration value cannot be parsed."""

    def __init__(self, key: str, value: object, reason: str) -> None:
        super().__init__(f"invalid value for {key!r}: {value!r} ({reason})")
        self.key = key
        self.value = value


class MalformedCSVError(PSKError):
    """Raised when an experiment CSV does not match the versioned schema."""
