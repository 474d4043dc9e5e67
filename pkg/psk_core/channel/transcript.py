"""Binary transcript dumps for golden tests.

Each record is one sender byte (0 Alice, 1 Bob), a 4-byte big-endian payload
length in bits, then the payload bytes.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from psk_core.errors import CodecError

from .session import Message, Party

_HEADER = struct.Struct(">BI")


@dataclass(frozen=True)
class TranscriptRecord:
    sender: Party
    payload: bytes
    bit_length: int


def dump_transcript(messages: Iterable[Message]) -> bytes:
    chunks: list[bytes] = []
    for message in messages:
        chunks.append(_HEADER.pack(message.sender.code, message.bit_length))
        chunks.append(message.payload)
    return b"".join(chunks)


def load_transcript(data: bytes) -> list[TranscriptRecord]:
    records: list[TranscriptRecord] = []
    offset = 0
    while offset < len(data):
        if offset + _HEADER.size > len(data):
            raise CodecError("truncated transcript header")
        sender_code, bit_length = _HEADER.unpack_from(data, offset)
        if sender_code not in (0, 1):
            raise CodecError(f"unknown sender byte {sender_code}")
        offset += _HEADER.size
        size = (bit_length + 7) // 8
        if offset + size > len(data):
            raise CodecError("truncated transcript payload")
        sender = Party.ALICE if sender_code == 0 else Party.BOB
        records.append(TranscriptRecord(sender, bytes(data[offset : offset + size]), bit_length))
        offset += size
    return records


def transcript_digest(messages: Iterable[Message]) -> str:
    return hashlib.sha256(dump_transcript(messages)).hexdigest()


def write_transcript(path: Path, messages: Iterable[Message]) -> None:
    path.write_bytes(dump_transcript(messages))
