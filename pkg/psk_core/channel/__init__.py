"""Metered two-party channel: codec, session, reports and transcripts."""

from .codec import (
    BitReader,
    BitWriter,
    Float64,
    IndexLists,
    IndexSet,
    ProbabilityVector,
    QuantizedMatrix,
    SignedIntMatrix,
    SizedUIntVector,
    SparseRows,
    UInt,
    UIntVector,
    WireElement,
    bit_width,
    decode_element,
    encode_element,
    index_width,
    varint_bits,
)
from .report import EstimateReport, EstimateResult, PairSample, SampleStatus, ScalarEstimate
from .session import Endpoint, Message, Party, ProtocolSession
from .transcript import TranscriptRecord, dump_transcript, load_transcript, transcript_digest, write_transcript

__all__ = [
    "BitReader",
    "BitWriter",
    "Endpoint",
    "EstimateReport",
    "EstimateResult",
    "Float64",
    "IndexLists",
    "IndexSet",
    "Message",
    "PairSample",
    "Party",
    "ProbabilityVector",
    "ProtocolSession",
    "QuantizedMatrix",
    "SampleStatus",
    "ScalarEstimate",
    "SignedIntMatrix",
    "SizedUIntVector",
    "SparseRows",
    "TranscriptRecord",
    "UInt",
    "UIntVector",
    "WireElement",
    "bit_width",
    "decode_element",
    "dump_transcript",
    "encode_element",
    "index_width",
    "load_transcript",
    "transcript_digest",
    "varint_bits",
    "write_transcript",
]
