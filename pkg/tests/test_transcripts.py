"""Transcript bytes: fixed goldens, determinism per protocol and what Alice's messages depend on."""

from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from psk_builtin.protocols import run_l1_exact, run_l1_sample
from psk_core.api import ProtocolRequest
from psk_core.app import PSKApp
from psk_core.channel import Message, Party, ProtocolSession, dump_transcript, load_transcript, transcript_digest
from psk_core.matrix import SparseIntMatrix

ROOT = Path(__file__).resolve().parents[1]

# sender 0, 10 bits: width header 2, then column sums 2 and 2
L1_EXACT_ONES = bytes.fromhex("000000000a" "0a80")

# column sums [0, 0, 2, 0, 0, 0] at width 2, then row picks [0, 0, 3, 0, 0, 0] at width 3
L1_SAMPLE_SINGLE_PATH = bytes.fromhex("0000000012" "082000" "0000000012" "018000")


def _protocol_names() -> tuple[str, ...]:
    return PSKApp().bootstrap().feature_registry.display_names(kind="protocol")


def _binary_pair(n: int = 16) -> tuple[SparseIntMatrix, SparseIntMatrix]:
    rng = np.random.default_rng(5)
    return (
        SparseIntMatrix.from_dense((rng.random((n, n)) < 0.3).astype(np.int64)),
        SparseIntMatrix.from_dense((rng.random((n, n)) < 0.3).astype(np.int64)),
    )


def _messages(name: str, seed: int = 2024) -> list[Message]:
    registry = PSKApp().bootstrap().feature_registry
    a, b = _binary_pair()
    session = ProtocolSession(seed, protocol=name)
    registry.resolve(name, kind="protocol").target().run(a, b, session, ProtocolRequest())
    return session.messages


def _transcript(name: str) -> bytes:
    return dump_transcript(_messages(name))


def transcript_digests() -> dict[str, str]:
    return {name: transcript_digest(_messages(name)) for name in _protocol_names()}


def test_l1_exact_golden_bytes() -> None:
    ones = SparseIntMatrix.from_dense([[1, 1], [1, 1]])
    session = ProtocolSession(0)
    run_l1_exact(ones, ones, session)
    assert dump_transcript(session.messages) == L1_EXACT_ONES


def test_l1_sample_golden_bytes() -> None:
    a = SparseIntMatrix(6, 6, {(3, 2): 2})
    b = SparseIntMatrix(6, 6, {(2, 4): 5})
    for seed in (0, 1, 99):
        session = ProtocolSession(seed)
        run_l1_sample(a, b, session)
        data = dump_transcript(session.messages)
        assert data == L1_SAMPLE_SINGLE_PATH
        assert [(r.sender, r.bit_length) for r in load_transcript(data)] == [(Party.ALICE, 18), (Party.ALICE, 18)]


@pytest.mark.parametrize("name", _protocol_names())
def test_same_seed_gives_identical_transcript_bytes(name: str) -> None:
    first = _transcript(name)
    assert first
    assert _transcript(name) == first


def test_transcripts_do_not_depend_on_the_interpreter_process() -> None:
    script = (
        "import json\n"
        "from tests.test_transcripts import transcript_digests\n"
        "print(json.dumps(transcript_digests()))"
    )
    env = {**os.environ, "PYTHONHASHSEED": "12345", "PYTHONPATH": str(ROOT)}
    completed = subprocess.run(
        [sys.executable, "-c", script], cwd=ROOT, env=env, capture_output=True, text=True, check=True
    )
    assert json.loads(completed.stdout) == transcript_digests()


def test_l1_exact_ignores_how_alice_spreads_a_column() -> None:
    b = SparseIntMatrix.from_dense([[1, 2], [0, 3]])
    first, second = ProtocolSession(8), ProtocolSession(8)
    report = run_l1_exact(SparseIntMatrix.from_dense([[2, 0], [1, 3]]), b, first)
    moved = run_l1_exact(SparseIntMatrix.from_dense([[0, 1], [3, 2]]), b, second)
    assert dump_transcript(first.messages) == dump_transcript(second.messages)
    assert report.value == moved.value


def test_lp_baseline_transcript_ignores_alice_input() -> None:
    registry = PSKApp().bootstrap().feature_registry
    protocol = registry.resolve("lp-baseline", kind="protocol").target()
    a, b = _binary_pair()
    other = SparseIntMatrix.identity(16)
    first, second = ProtocolSession(3), ProtocolSession(3)
    protocol.run(a, b, first, ProtocolRequest())
    protocol.run(other, b, second, ProtocolRequest())
    assert all(message.sender is Party.BOB for message in first.messages)
    assert dump_transcript(first.messages) == dump_transcript(second.messages)
