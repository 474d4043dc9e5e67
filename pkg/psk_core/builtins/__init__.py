"""Helper utilities for registering built-in prodsketch commands."""

from __future__ import annotations

from typing import Sequence

from psk_core.registry import FeatureRegistry

from .commands import HelpCommand
from .gen import GenCommand
from .run import RunCommand
from .summarize import SummarizeCommand

__all__ = [
    "GenCommand",
    "HelpCommand",
    "RunCommand",
    "SummarizeCommand",
    "register_builtin_commands",
]

_BUILTIN_FEATURES: Sequence[type] = (
    RunCommand,
    SummarizeCommand,
    GenCommand,
    HelpCommand,
)


def register_builtin_commands(registry: FeatureRegistry) -> None:
    """Register the built-in command classes with the supplied registry."""

    registry.register_features(_BUILTIN_FEATURES, origin="builtin")
