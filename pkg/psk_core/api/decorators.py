"""``@pskcommand`` and ``@pskprotocol``: mark classes for the feature registry.

Protocol classes are checked at decoration time: they must name a known
statistic and state their guarantee, since both end up in ``psk run --list``
and in the experiment CSV.
"""

from __future__ import annotations

import inspect
import re
from typing import Any, Callable, TypeVar

from psk_core.registry.entry import FEATURE_ATTRIBUTE

from .abc import PSKAbstractCommand, PSKAbstractProtocol

STATISTICS = ("lp", "l1", "linf", "hh", "sample")
FEATURE_NAME = re.compile(r"^[a-z][a-z0-9]*(?:-[a-z0-9]+)*$")

_T = TypeVar("_T", bound=type)
_ROLE_SUFFIXES = ("Protocol", "Command")


def default_feature_name(cls: type) -> str:
    """``LinfTwoEpsProtocol`` -> ``linf-two-eps``."""

    stem = cls.__name__
    for suffix in _ROLE_SUFFIXES:
        if stem.endswith(suffix) and stem != suffix:
            stem = stem[: -len(suffix)]
            break
    return re.sub(r"(?<=[a-z0-9])(?=[A-Z])", "-", stem).lower()


def _summary(cls: type) -> str:
    doc = inspect.getdoc(cls) or ""
    return doc.strip().splitlines()[0] if doc.strip() else ""


def _protocol_metadata(cls: type) -> dict[str, Any]:
    statistic = getattr(cls, "statistic", None)
    if statistic not in STATISTICS:
        raise ValueError(f"{cls.__name__}.statistic must be one of {', '.join(STATISTICS)}; got {statistic!r}.")
    guarantee = str(getattr(cls, "guarantee", "") or "").strip()
    if not guarantee:
        raise ValueError(f"{cls.__name__} must state its guarantee.")
    return {
        "statistic": statistic,
        "guarantee": guarantee,
        "requires_binary": bool(getattr(cls, "requires_binary", False)),
    }


def _feature_decorator(base: type, kind: str) -> Callable[..., Any]:
    def decorator(
        cls: _T | None = None,
        *,
        name: str | None = None,
        group: str | None = None,
    ) -> Callable[[_T], _T] | _T:
        def wrap(target: _T) -> _T:
            if not isinstance(target, type) or not issubclass(target, base):
                label = getattr(target, "__name__", repr(target))
                raise TypeError(f"{label} must subclass {base.__name__} to be registered as a {kind}.")
            feature_name = name or default_feature_name(target)
            if not FEATURE_NAME.match(feature_name):
                raise ValueError(f"{kind} name {feature_name!r} must be lowercase words joined by '-'.")
            feature_group = group or target.__module__.split(".")[0] or "psk"
            metadata: dict[str, Any] = {
                "kind": kind,
                "name": feature_name,
                "group": feature_group,
                "qualified_name": f"{feature_group}:{feature_name}",
                "summary": _summary(target),
            }
            if kind == "protocol":
                metadata.update(_protocol_metadata(target))
            setattr(target, FEATURE_ATTRIBUTE, metadata)
            return target

        return wrap if cls is None else wrap(cls)

    return decorator


pskcommand = _feature_decorator(PSKAbstractCommand, "command")
pskprotocol = _feature_decorator(PSKAbstractProtocol, "protocol")
