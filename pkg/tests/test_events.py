"""Unit tests for the prodsketch EventBus and the session events it carries."""

import pytest

from psk_core.channel import Party, ProtocolSession, ScalarEstimate, UInt
from psk_core.events import HARNESS_EVENTS, SESSION_EVENTS, EventBus


def test_event_handlers_run_in_priority_order() -> None:
    bus = EventBus()
    seen: list[str] = []

    def make_handler(label: str):
        def handler(event):
            seen.append(f"{label}:{event.payload['value']}")

        return handler

    bus.on("trial_finished", make_handler("one"), priority=0)
    bus.on("trial_finished", make_handler("two"), priority=0)
    bus.on("trial_finished", make_handler("high"), priority=5)
    bus.on("trial_finished", make_handler("low"), priority=-1)
    bus.emit("trial_finished", {"value": "ok"})

    assert seen == ["high:ok", "one:ok", "two:ok", "low:ok"]


def test_emit_without_listeners_is_a_no_op() -> None:
    bus = EventBus()
    bus.emit("session_opened", {})
    assert not bus.has_listeners("session_opened")


def test_standard_events_are_listed() -> None:
    assert SESSION_EVENTS == ("session_opened", "seed_charged", "message_sent", "session_finished")
    assert HARNESS_EVENTS == ("trial_finished", "experiment_finished")


def test_session_emits_lifecycle_events_and_charges_seed_once() -> None:
    bus = EventBus()
    recorded: list[str] = []
    for name in SESSION_EVENTS:
        bus.on(name, lambda event: recorded.append(event.name))

    session = ProtocolSession(7, protocol="toy", events=bus)
    alice = session.endpoint(Party.ALICE, None)
    alice.shared_generator("label")
    alice.shared_generator("other")
    alice.send(UInt(3, 4))
    alice.output(ScalarEstimate(1.0))
    session.finish()

    assert recorded == ["session_opened", "seed_charged", "message_sent", "session_finished"]


def test_unknown_event_names_are_rejected() -> None:
    bus = EventBus()
    with pytest.raises(ValueError, match="trial_finished"):
        bus.on("trial_finishd", lambda event: None)
    with pytest.raises(ValueError):
        bus.emit("experiment_done", {})


def test_unsubscribe_stops_delivery_and_counts_emits() -> None:
    bus = EventBus()
    seen: list[int] = []
    stop = bus.on("trial_finished", lambda event: seen.append(event["trial"]))
    bus.emit("trial_finished", {"trial": 0})
    stop()
    stop()
    bus.emit("trial_finished", {"trial": 1})

    assert seen == [0]
    assert not bus.has_listeners("trial_finished")
    assert bus.emitted["trial_finished"] == 2
