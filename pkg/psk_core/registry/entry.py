"""Registry entries: one per registered command or protocol class."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Type

FEATURE_ATTRIBUTE = "__psk_feature__"
KINDS = ("command", "protocol")


def _component(label: str, value: str) -> str:
    if not value:
        raise ValueError(f"{label} cannot be empty.")
    if ":" in value:
        raise ValueError(f"{label} may not contain ':'.")
    return value


@dataclass(frozen=True)
class PSKRegistryEntry:
    """A feature class plus where it came from.

    ``origin`` is ``builtin`` for everything shipped with prodsketch; tests
    and embedding code pass their own label so collisions can name both sides.
    """

    group: str
    name: str
    target: Type[Any]
    kind: str
    origin: str

    def __post_init__(self) -> None:
        for label in ("group", "name", "origin"):
            _component(label, getattr(self, label))
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {', '.join(KINDS)}; got {self.kind!r}.")
        if not isinstance(self.target, type):
            raise TypeError("target must be a class type.")

    @property
    def qualified_name(self) -> str:
        return f"{self.group}:{self.name}"

    @property
    def metadata(self) -> Mapping[str, Any]:
        return getattr(self.target, FEATURE_ATTRIBUTE, None) or {}

    @property
    def summary(self) -> str:
        """First docstring line, as shown by ``psk help``."""

        return str(self.metadata.get("summary", ""))

    @property
    def statistic(self) -> str | None:
        return self.metadata.get("statistic")

    @property
    def guarantee(self) -> str:
        return str(self.metadata.get("guarantee", ""))

    @property
    def requires_binary(self) -> bool:
        return bool(self.metadata.get("requires_binary", False))

    @classmethod
    def from_feature(cls, feature: type, *, origin: str) -> "PSKRegistryEntry":
        """Build an entry from a class decorated with ``@pskcommand`` or ``@pskprotocol``."""

        metadata = getattr(feature, FEATURE_ATTRIBUTE, None)
        if metadata is None:
            raise TypeError(f"{feature.__name__} is not a decorated prodsketch feature.")
        return cls(
            group=str(metadata["group"]),
            name=str(metadata["name"]),
            target=feature,
            kind=str(metadata["kind"]),
            origin=origin,
        )
