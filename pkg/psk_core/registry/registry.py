"""In-memory registry for protocols and commands."""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable

from .entry import PSKRegistryEntry
from .errors import AmbiguousFeatureError, FeatureCollisionError, FeatureNotFoundError


class FeatureRegistry:
    """Features indexed by ``group:name`` and by ``(kind, name)``.

    A protocol and a command may share a simple name; within one kind a
    shared name is ambiguous and must be resolved with its group.
    """

    def __init__(self) -> None:
        self._qualified: dict[str, PSKRegistryEntry] = {}
        self._named: dict[tuple[str, str], list[PSKRegistryEntry]] = defaultdict(list)

    def __len__(self) -> int:
        return len(self._qualified)

    def __contains__(self, qualified_name: object) -> bool:
        return qualified_name in self._qualified

    def register(self, entry: PSKRegistryEntry) -> None:
        existing = self._qualified.get(entry.qualified_name)
        if existing is not None:
            raise FeatureCollisionError(entry.qualified_name, existing.origin)
        self._qualified[entry.qualified_name] = entry
        self._named[(entry.kind, entry.name)].append(entry)

    def register_features(self, features: Iterable[type], *, origin: str) -> None:
        """Register every decorated class in ``features`` under ``origin``."""

        for feature in features:
            self.register(PSKRegistryEntry.from_feature(feature, origin=origin))

    def resolve(self, name_or_qualified: str, *, kind: str | None = None) -> PSKRegistryEntry:
        """Resolve a simple name or a qualified ``group:name``, optionally within one kind."""

        if ":" in name_or_qualified:
            entry = self._qualified.get(name_or_qualified)
            if entry is not None and kind in (None, entry.kind):
                return entry
            raise FeatureNotFoundError(name_or_qualified, kind=kind, known=self._known(kind, qualified=True))

        kinds = (kind,) if kind is not None else sorted({entry_kind for entry_kind, _ in self._named})
        matches = [entry for each in kinds for entry in self._named.get((each, name_or_qualified), [])]
        if len(matches) == 1:
            return matches[0]
        if not matches:
            raise FeatureNotFoundError(name_or_qualified, kind=kind, known=self._known(kind))
        raise AmbiguousFeatureError(name_or_qualified, sorted(entry.qualified_name for entry in matches))

    def display_names(self, *, kind: str | None = None) -> tuple[str, ...]:
        """Simple names, or ``group:name`` for each entry whose simple name is shared."""

        by_name: dict[str, list[PSKRegistryEntry]] = defaultdict(list)
        for entry in self.entries(kind=kind):
            by_name[entry.name].append(entry)
        shown: list[str] = []
        for name in sorted(by_name):
            group = by_name[name]
            shown.extend([name] if len(group) == 1 else sorted(entry.qualified_name for entry in group))
        return tuple(shown)

    def entries(self, *, kind: str | None = None) -> tuple[PSKRegistryEntry, ...]:
        """Registered entries sorted by qualified name."""

        return tuple(
            self._qualified[key] for key in sorted(self._qualified) if kind in (None, self._qualified[key].kind)
        )

    def _known(self, kind: str | None, *, qualified: bool = False) -> list[str]:
        return [
            entry.qualified_name if qualified else entry.name
            for entry in self._qualified.values()
            if kind in (None, entry.kind)
        ]
