"""Lifecycle events published by protocol sessions and the experiment harness.

Only names from :data:`SESSION_EVENTS` and :data:`HARNESS_EVENTS` may be
subscribed to or emitted; a typo in an event name fails loudly instead of
silently never firing.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import count
from typing import Any, Callable, Mapping

__all__ = ["Event", "EventHandler", "EventBus", "SESSION_EVENTS", "HARNESS_EVENTS", "KNOWN_EVENTS"]

SESSION_EVENTS = (
    "session_opened",
    "seed_charged",
    "message_sent",
    "session_finished",
)
HARNESS_EVENTS = (
    "trial_finished",
    "experiment_finished",
)
KNOWN_EVENTS = frozenset(SESSION_EVENTS + HARNESS_EVENTS)


@dataclass(frozen=True)
class Event:
    """A named lifecycle notification with a read-only payload."""

    name: str
    payload: Mapping[str, Any] = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        return self.payload[key]


EventHandler = Callable[[Event], None]
Unsubscribe = Callable[[], None]


def _check_name(event_name: str) -> None:
    if event_name not in KNOWN_EVENTS:
        known = ", ".join(sorted(KNOWN_EVENTS))
        raise ValueError(f"unknown event {event_name!r}; expected one of: {known}")


class EventBus:
    """Synchronous dispatcher; higher priority first, then subscription order."""

    def __init__(self) -> None:
        self._handlers: dict[str, list[tuple[int, int, EventHandler]]] = defaultdict(list)
        self._ticket = count()
        self.emitted: dict[str, int] = defaultdict(int)

    def on(self, event_name: str, handler: EventHandler, priority: int = 0) -> Unsubscribe:
        """Subscribe ``handler``; the returned callable removes it again."""

        _check_name(event_name)
        slot = (-priority, next(self._ticket), handler)
        bucket = self._handlers[event_name]
        bucket.append(slot)
        bucket.sort(key=lambda item: item[:2])

        def unsubscribe() -> None:
            if slot in bucket:
                bucket.remove(slot)

        return unsubscribe

    def emit(self, event_name: str, payload: Mapping[str, Any] | None = None) -> None:
        _check_name(event_name)
        self.emitted[event_name] += 1
        bucket = self._handlers.get(event_name)
        if not bucket:
            return
        event = Event(event_name, dict(payload or {}))
        # handlers may unsubscribe while being called
        for _, _, handler in list(bucket):
            handler(event)

    def has_listeners(self, event_name: str) -> bool:
        return bool(self._handlers.get(event_name))
