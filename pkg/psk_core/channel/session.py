"""Metered two-party session.

A :class:`ProtocolSession` owns the transcript. Protocol code never touches it
directly: each party works through an :class:`Endpoint` that exposes only that
party's input, the messages addressed to it and its randomness.
"""

from __future__ import annotations

import hashlib
import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Any, Generic, TypeVar

import numpy as np

from psk_core.errors import ProtocolViolationError
from psk_core.events import EventBus

from .codec import WireElement, decode_element, encode_element
from .report import EstimateReport, EstimateResult

logger = logging.getLogger(__name__)

SEED_BITS = 64
_SHARED_TAG = 1
_PRIVATE_TAG = 2

InputT = TypeVar("InputT")
ElementT = TypeVar("ElementT", bound=WireElement)


class Party(str, Enum):
    ALICE = "alice"
    BOB = "bob"

    @property
    def other(self) -> "Party":
        return Party.BOB if self is Party.ALICE else Party.ALICE

    @property
    def code(self) -> int:
        return 0 if self is Party.ALICE else 1


@dataclass(frozen=True)
class Message:
    sender: Party
    kind: str
    payload: bytes
    bit_length: int
    round_index: int

    def __post_init__(self) -> None:
        padding = 8 * len(self.payload) - self.bit_length
        if not 0 <= padding < 8:
            raise ProtocolViolationError(
                f"bit length {self.bit_length} inconsistent with {len(self.payload)} payload bytes"
            )

    @property
    def padding(self) -> int:
        return 8 * len(self.payload) - self.bit_length


def _label_key(label: str) -> int:
    return int.from_bytes(hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest(), "big")


class ProtocolSession:
    """Single-threaded transcript with exact bit and round meters."""

    def __init__(self, seed: int, *, protocol: str = "", events: EventBus | None = None) -> None:
        if not 0 <= int(seed) < 2**SEED_BITS:
            raise ProtocolViolationError(f"seed must be a 64-bit unsigned value, got {seed}")
        self.seed = int(seed)
        self.protocol = protocol
        self.messages: list[Message] = []
        self.round_count = 0
        self.bits_by_party: dict[Party, int] = {Party.ALICE: 0, Party.BOB: 0}
        self.seed_bits = 0
        self.rng_draws: dict[Party, int] = {Party.ALICE: 0, Party.BOB: 0}
        self._events = events
        self._pending: dict[Party, deque[Message]] = {Party.ALICE: deque(), Party.BOB: deque()}
        self._private: dict[Party, np.random.Generator] = {}
        self._details: dict[str, Any] = {}
        self._output: tuple[Party, EstimateResult] | None = None
        self._report: EstimateReport | None = None
        self._emit("session_opened", {"protocol": protocol, "seed": self.seed})

    # ---------- State ----------

    @property
    def is_finished(self) -> bool:
        return self._report is not None

    @property
    def bits_total(self) -> int:
        return sum(self.bits_by_party.values()) + self.seed_bits

    def endpoint(self, party: Party, data: InputT) -> "Endpoint[InputT]":
        return Endpoint(self, party, data)

    # ---------- Messaging ----------

    def send(self, sender: Party, element: WireElement) -> Message:
        self._ensure_open("send")
        payload, bit_length = encode_element(element)
        if not self.messages or self.messages[-1].sender is not sender:
            self.round_count += 1
        message = Message(sender, element.kind, payload, bit_length, self.round_count)
        self.messages.append(message)
        self.bits_by_party[sender] += bit_length
        self._pending[sender.other].append(message)
        logger.debug("sent %s bits=%d round=%d", element.kind, bit_length, self.round_count)
        self._emit(
            "message_sent",
            {"sender": sender.value, "kind": element.kind, "bits": bit_length, "round": self.round_count},
        )
        return message

    def receive(self, party: Party, element_type: type[ElementT], **schema: Any) -> ElementT:
        self._ensure_open("receive")
        queue = self._pending[party]
        if not queue:
            raise ProtocolViolationError(f"{party.value} has no pending message to read")
        message = queue.popleft()
        if message.kind != element_type.kind:
            raise ProtocolViolationError(
                f"{party.value} expected a {element_type.kind} element but the next message is {message.kind}"
            )
        element = decode_element(element_type, message.payload, message.bit_length, **schema)
        return element  # type: ignore[return-value]

    # ---------- Randomness ----------

    def shared_generator(self, party: Party, label: str) -> np.random.Generator:
        """Generator whose stream depends only on the session seed and ``label``."""

        self._ensure_open("draw shared randomness")
        self._charge_seed()
        self.rng_draws[party] += 1
        sequence = np.random.SeedSequence(self.seed, spawn_key=(_SHARED_TAG, _label_key(label)))
        return np.random.default_rng(sequence)

    def draw_shared_randomness(self, party: Party, n_bits: int, draw_index: int) -> np.ndarray:
        """``n_bits`` shared random bits; identical at both parties for the same ``draw_index``."""

        generator = self.shared_generator(party, f"draw:{int(draw_index)}")
        return generator.integers(0, 2, size=int(n_bits), dtype=np.uint8)

    def private_generator(self, party: Party) -> np.random.Generator:
        """Party-local randomness; free and invisible to the other party."""

        if party not in self._private:
            sequence = np.random.SeedSequence(self.seed, spawn_key=(_PRIVATE_TAG, party.code))
            self._private[party] = np.random.default_rng(sequence)
        return self._private[party]

    # ---------- Output ----------

    def declare_output(self, party: Party, result: EstimateResult) -> None:
        self._ensure_open("declare output")
        if self._output is not None:
            raise ProtocolViolationError("output already declared")
        self._output = (party, result)

    def add_detail(self, key: str, value: Any) -> None:
        self._details[key] = value

    def finish(self) -> EstimateReport:
        if self._report is not None:
            raise ProtocolViolationError("session already finished")
        if self._output is None:
            raise ProtocolViolationError("finish called before any party declared an output")
        party, result = self._output
        self._report = EstimateReport(
            protocol=self.protocol,
            result=result,
            bits_total=self.bits_total,
            rounds=self.round_count,
            seed=self.seed,
            bits_by_party={p.value: bits for p, bits in self.bits_by_party.items()},
            seed_bits=self.seed_bits,
            output_party=party.value,
            messages=len(self.messages),
            details=dict(self._details),
        )
        self._emit(
            "session_finished",
            {"protocol": self.protocol, "bits_total": self._report.bits_total, "rounds": self._report.rounds},
        )
        return self._report

    # ---------- Internal helpers ----------

    def _charge_seed(self) -> None:
        if self.seed_bits:
            return
        self.seed_bits = SEED_BITS
        self._emit("seed_charged", {"bits": SEED_BITS})

    def _ensure_open(self, action: str) -> None:
        if self._report is not None:
            raise ProtocolViolationError(f"cannot {action} after the session finished")

    def _emit(self, name: str, payload: dict[str, Any]) -> None:
        if self._events is not None:
            self._events.emit(name, payload)


class Endpoint(Generic[InputT]):
    """One party's view of a session."""

    def __init__(self, session: ProtocolSession, party: Party, data: InputT) -> None:
        self._session = session
        self.party = party
        self.input = data

    @property
    def seed(self) -> int:
        return self._session.seed

    def send(self, element: WireElement) -> Message:
        return self._session.send(self.party, element)

    def receive(self, element_type: type[ElementT], **schema: Any) -> ElementT:
        return self._session.receive(self.party, element_type, **schema)

    def shared_generator(self, label: str) -> np.random.Generator:
        return self._session.shared_generator(self.party, label)

    def draw_shared_randomness(self, n_bits: int, draw_index: int) -> np.ndarray:
        return self._session.draw_shared_randomness(self.party, n_bits, draw_index)

    def private_generator(self) -> np.random.Generator:
        return self._session.private_generator(self.party)

    def output(self, result: EstimateResult, **details: Any) -> None:
        self._session.declare_output(self.party, result)
        for key, value in details.items():
            self._session.add_detail(key, value)

    def note(self, key: str, value: Any) -> None:
        """Attach a diagnostic to the report without affecting the transcript."""

        self._session.add_detail(key, value)
