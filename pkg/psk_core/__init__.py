"""Core runtime pieces for prodsketch: configuration, events, registry, matrices and the metered channel."""

from .config import ConfigResolver, ProtocolConstants
from .errors import (
    CodecError,
    ConfigError,
    InvalidInputError,
    MalformedCSVError,
    ProtocolViolationError,
    PSKError,
)
from .events import Event, EventBus
from .paths import UserDirs

__all__ = [
    "CodecError",
    "ConfigError",
    "ConfigResolver",
    "Event",
    "EventBus",
    "InvalidInputError",
    "MalformedCSVError",
    "PSKError",
    "ProtocolConstants",
    "ProtocolViolationError",
    "UserDirs",
]
