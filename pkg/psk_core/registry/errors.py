"""Resolution failures of the feature registry.

These stay outside :class:`psk_core.errors.PSKError`: the CLI reports them as
unknown commands (exit 1) and the harness turns them into a ``ConfigError``.
"""

from __future__ import annotations

from difflib import get_close_matches
from typing import Iterable, Sequence


class FeatureRegistryError(Exception):
    """Base class for feature registry errors."""


class FeatureCollisionError(FeatureRegistryError):
    def __init__(self, qualified_name: str, existing_origin: str) -> None:
        super().__init__(f"{qualified_name} is already registered (origin: {existing_origin})")
        self.qualified_name = qualified_name
        self.existing_origin = existing_origin


class FeatureNotFoundError(FeatureRegistryError):
    """No entry of the requested kind answers to ``name``; ``suggestions`` holds close known names."""

    def __init__(self, name: str, *, kind: str | None = None, known: Iterable[str] = ()) -> None:
        self.name = name
        self.kind = kind
        self.suggestions = tuple(get_close_matches(name, sorted(set(known)), n=3, cutoff=0.6))
        label = f"{kind} {name!r}" if kind else repr(name)
        hint = f"; did you mean {', '.join(self.suggestions)}?" if self.suggestions else ""
        super().__init__(f"{label} is not registered{hint}")


class AmbiguousFeatureError(FeatureRegistryError):
    """Raised when multiple entries share the same simple name."""

    def __init__(self, name: str, candidates: Sequence[str]) -> None:
        super().__init__(f"{name!r} matches multiple entries: {', '.join(candidates)}")
        self.name = name
        self.candidates = tuple(candidates)
