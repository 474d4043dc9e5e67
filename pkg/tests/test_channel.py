"""Metered session, wire codec and transcript dumps."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from psk_builtin.protocols import run_l1_sample
from psk_core.channel import (
    Float64,
    IndexLists,
    IndexSet,
    Party,
    ProbabilityVector,
    ProtocolSession,
    QuantizedMatrix,
    ScalarEstimate,
    SignedIntMatrix,
    SizedUIntVector,
    SparseRows,
    UInt,
    UIntVector,
    decode_element,
    dump_transcript,
    encode_element,
    index_width,
    load_transcript,
    transcript_digest,
    varint_bits,
    write_transcript,
)
from psk_core.errors import CodecError, ProtocolViolationError
from psk_core.matrix import SparseIntMatrix


def _session(seed: int = 1) -> ProtocolSession:
    return ProtocolSession(seed, protocol="test")


def test_fixed_width_vector_costs_exactly_its_payload() -> None:
    session = _session()
    alice = session.endpoint(Party.ALICE, None)
    bob = session.endpoint(Party.BOB, None)

    alice.send(UIntVector(np.arange(1000), 20))
    received = bob.receive(UIntVector, count=1000, width=20)
    bob.output(ScalarEstimate(0.0))
    report = session.finish()

    assert np.array_equal(received.values, np.arange(1000))
    assert report.bits_total == 20_000
    assert report.rounds == 1
    assert report.bits_by_party == {"alice": 20_000, "bob": 0}


def test_rounds_count_sender_alternations() -> None:
    session = _session()
    alice = session.endpoint(Party.ALICE, None)
    bob = session.endpoint(Party.BOB, None)

    alice.send(UInt(1, 1))
    alice.send(UInt(1, 1))
    bob.receive(UInt, width=1)
    bob.send(UInt(0, 1))
    alice.send(UInt(3, 2))

    assert session.round_count == 3
    assert [message.round_index for message in session.messages] == [1, 1, 2, 3]


def test_index_set_uses_delta_varints() -> None:
    element = IndexSet((0, 1, 2, 3, 5, 8, 13, 21, 34, 300))
    payload, bits = encode_element(element)
    assert bits == 96
    assert decode_element(IndexSet, payload, bits).indices == element.indices


def test_sized_vector_header_and_width() -> None:
    payload, bits = encode_element(SizedUIntVector(np.array([0, 5, 7])))
    assert bits == 6 + 3 * 3
    decoded = decode_element(SizedUIntVector, payload, bits, count=3)
    assert decoded.values.tolist() == [0, 5, 7]


def test_width_helpers() -> None:
    assert index_width(1) == 1
    assert index_width(2) == 1
    assert index_width(1000) == 10
    assert varint_bits(0) == 8
    assert varint_bits(127) == 8
    assert varint_bits(128) == 16


def test_index_lists_with_and_without_values() -> None:
    lists = ((1, 3), (), (0,))
    payload, bits = encode_element(IndexLists(lists, 8))
    assert bits == IndexLists.payload_bits([2, 0, 1], 8) == 9
    assert decode_element(IndexLists, payload, bits, lengths=[2, 0, 1], universe=8).lists == lists

    valued = IndexLists(lists, 8, ((5, 1), (), (300,)))
    payload, bits = encode_element(valued)
    decoded = decode_element(IndexLists, payload, bits, lengths=[2, 0, 1], universe=8, with_values=True)
    assert decoded.values == ((5, 1), (), (300,))


def test_sparse_rows_binary_flag_drops_values() -> None:
    rows = {4: {0: 1, 9: 1}, 1: {2: 1}}
    payload, bits = encode_element(SparseRows(rows))
    assert decode_element(SparseRows, payload, bits).rows == {1: {2: 1}, 4: {0: 1, 9: 1}}

    weighted = {0: {3: 7}}
    payload, weighted_bits = encode_element(SparseRows(weighted))
    assert decode_element(SparseRows, payload, weighted_bits).rows == weighted


def test_numeric_elements_decode_to_their_values() -> None:
    signed = np.array([[-3, 0], [5, -1]])
    payload, bits = encode_element(SignedIntMatrix(signed))
    assert np.array_equal(decode_element(SignedIntMatrix, payload, bits, shape=(2, 2)).values, signed)

    small = np.array([[12, -40], [0, 7]])
    payload, bits = encode_element(QuantizedMatrix(small))
    assert bits == 6 + 4 * 32
    assert np.array_equal(decode_element(QuantizedMatrix, payload, bits, shape=(2, 2)).values, small)

    payload, bits = encode_element(Float64(2.5))
    assert bits == 64
    assert decode_element(Float64, payload, bits).value == 2.5

    assert ProbabilityVector.quantize(0.25) == 0.25
    assert ProbabilityVector.quantize(0.3) >= 0.3
    with pytest.raises(CodecError):
        ProbabilityVector.code(0.0)


def test_value_too_wide_for_its_field() -> None:
    with pytest.raises(CodecError):
        encode_element(UInt(8, 3))


def test_output_only_session_costs_nothing() -> None:
    session = _session()
    session.endpoint(Party.BOB, None).output(ScalarEstimate(0.0))
    report = session.finish()
    assert report.bits_total == 0
    assert report.rounds == 0
    assert report.output_party == "bob"


def test_report_serializes_with_its_true_value() -> None:
    session = _session()
    session.endpoint(Party.ALICE, None).output(ScalarEstimate(4.0), chosen_level=2)
    report = session.finish().with_true_value(5.0)
    payload = report.to_dict()
    assert payload["result"] == {"type": "scalar", "value": 4.0}
    assert payload["true_value"] == 5.0
    assert payload["details"] == {"chosen_level": 2}
    assert report.value == 4.0


def test_send_after_finish_is_rejected() -> None:
    session = _session()
    alice = session.endpoint(Party.ALICE, None)
    alice.output(ScalarEstimate(1.0))
    session.finish()
    with pytest.raises(ProtocolViolationError):
        alice.send(UInt(1, 1))
    with pytest.raises(ProtocolViolationError):
        session.finish()


def test_receive_checks_kind_and_queue() -> None:
    session = _session()
    alice = session.endpoint(Party.ALICE, None)
    bob = session.endpoint(Party.BOB, None)
    with pytest.raises(ProtocolViolationError):
        bob.receive(UInt, width=1)
    alice.send(UInt(1, 1))
    with pytest.raises(ProtocolViolationError):
        bob.receive(Float64)


def test_finish_requires_an_output() -> None:
    with pytest.raises(ProtocolViolationError):
        _session().finish()


def test_seed_must_fit_in_64_bits() -> None:
    with pytest.raises(ProtocolViolationError):
        ProtocolSession(2**64)


def test_shared_randomness_is_identical_and_charged_once() -> None:
    session = _session(42)
    alice = session.endpoint(Party.ALICE, None)
    bob = session.endpoint(Party.BOB, None)

    assert np.array_equal(alice.draw_shared_randomness(128, 0), bob.draw_shared_randomness(128, 0))
    assert not np.array_equal(alice.draw_shared_randomness(128, 0), alice.draw_shared_randomness(128, 1))
    assert alice.shared_generator("x").integers(0, 2**32) == bob.shared_generator("x").integers(0, 2**32)

    alice.output(ScalarEstimate(0.0))
    report = session.finish()
    assert report.seed_bits == 64
    assert report.bits_total == 64


def test_private_randomness_is_free() -> None:
    session = _session(5)
    session.endpoint(Party.ALICE, None).private_generator().random(10)
    session.endpoint(Party.ALICE, None).output(ScalarEstimate(0.0))
    assert session.finish().seed_bits == 0


def _l1_sample_session(seed: int) -> ProtocolSession:
    rng = np.random.default_rng(9)
    a = SparseIntMatrix.from_dense(rng.integers(0, 3, size=(6, 6)))
    b = SparseIntMatrix.from_dense(rng.integers(0, 3, size=(6, 6)))
    session = ProtocolSession(seed, protocol="l1-sample")
    run_l1_sample(a, b, session)
    return session


def test_same_seed_gives_identical_transcripts(tmp_path: Path) -> None:
    first = _l1_sample_session(17)
    second = _l1_sample_session(17)
    assert dump_transcript(first.messages) == dump_transcript(second.messages)
    assert transcript_digest(first.messages) == transcript_digest(second.messages)

    path = tmp_path / "t.bin"
    write_transcript(path, first.messages)
    records = load_transcript(path.read_bytes())
    assert [record.sender for record in records] == [Party.ALICE, Party.ALICE]
    assert [record.bit_length for record in records] == [message.bit_length for message in first.messages]


def test_truncated_transcript_is_rejected() -> None:
    data = dump_transcript(_l1_sample_session(3).messages)
    with pytest.raises(CodecError):
        load_transcript(data[:-1])
