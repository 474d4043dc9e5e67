"""Bit-exact wire codec.

Every message carries exactly one wire element. Elements whose shape both
parties already know (vector lengths, matrix shapes, list lengths) take that
shape as a decode-time schema, so only payload bits are metered.
"""

from __future__ import annotations

import math
import struct
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar, Iterable, Mapping, Sequence

import numpy as np

from psk_core.errors import CodecError

WIDTH_HEADER_BITS = 6
QUANT_BITS = 32
PROBABILITY_BITS = 32


def bit_width(value: int) -> int:
    """Minimal width able to hold ``value`` (at least one bit)."""

    return max(1, int(value).bit_length())


def index_width(universe: int) -> int:
    """``⌈log₂ universe⌉`` with a floor of one bit."""

    return max(1, math.ceil(math.log2(universe))) if universe > 1 else 1


def varint_bits(value: int) -> int:
    """Size in bits of ``value`` as a LEB128 varint (7 data bits per byte)."""

    return 8 * max(1, math.ceil(int(value).bit_length() / 7))


class BitWriter:
    """Append-only big-endian bit stream."""

    def __init__(self) -> None:
        self._chunks: list[np.ndarray] = []
        self._pending: list[str] = []
        self._length = 0

    @property
    def bit_length(self) -> int:
        return self._length

    def write(self, value: int, width: int) -> None:
        value = int(value)
        if width < 0 or value < 0 or value >> width:
            raise CodecError(f"value {value} does not fit in {width} bits")
        if width == 0:
            return
        self._pending.append(format(value, f"0{width}b"))
        self._length += width

    def write_array(self, values: Any, width: int) -> None:
        array = np.asarray(values)
        if array.size == 0:
            return
        if not 1 <= width <= 63:
            raise CodecError(f"array width {width} outside [1, 63]")
        if array.dtype == object:
            array = np.array([int(v) for v in array.ravel()], dtype=np.int64)
        flat = array.ravel().astype(np.int64)
        if flat.min() < 0 or int(flat.max()) >> width:
            raise CodecError(f"array values do not fit in {width} bits")
        self._flush()
        shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
        bits = ((flat.astype(np.uint64)[:, None] >> shifts) & np.uint64(1)).astype(np.uint8).ravel()
        self._chunks.append(bits)
        self._length += int(bits.size)

    def write_varint(self, value: int) -> None:
        value = int(value)
        if value < 0:
            raise CodecError(f"varint must be nonnegative, got {value}")
        while True:
            group = value & 0x7F
            value >>= 7
            if value:
                self.write(group | 0x80, 8)
            else:
                self.write(group, 8)
                return

    def finish(self) -> tuple[bytes, int]:
        self._flush()
        if not self._chunks:
            return b"", 0
        bits = np.concatenate(self._chunks)
        return np.packbits(bits).tobytes(), int(bits.size)

    def _flush(self) -> None:
        if self._pending:
            text = "".join(self._pending)
            self._chunks.append(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - np.uint8(48))
            self._pending.clear()


class BitReader:
    """Sequential reader over a payload produced by :class:`BitWriter`."""

    def __init__(self, payload: bytes, bit_length: int) -> None:
        if bit_length > 8 * len(payload) or bit_length < 8 * len(payload) - 7:
            raise CodecError(f"bit length {bit_length} inconsistent with {len(payload)} payload bytes")
        self._bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))[:bit_length]
        self._pos = 0

    @property
    def remaining(self) -> int:
        return int(self._bits.size) - self._pos

    def read(self, width: int) -> int:
        if width == 0:
            return 0
        chunk = self._take(width)
        return int((chunk + np.uint8(48)).tobytes().decode("ascii"), 2)

    def read_array(self, count: int, width: int) -> np.ndarray:
        if count == 0:
            return np.zeros(0, dtype=np.int64)
        if not 1 <= width <= 63:
            raise CodecError(f"array width {width} outside [1, 63]")
        chunk = self._take(count * width).reshape(count, width).astype(np.uint64)
        values = np.zeros(count, dtype=np.uint64)
        for column in range(width):
            values = (values << np.uint64(1)) | chunk[:, column]
        return values.astype(np.int64)

    def read_varint(self) -> int:
        value = 0
        shift = 0
        while True:
            group = self.read(8)
            value |= (group & 0x7F) << shift
            shift += 7
            if not group & 0x80:
                return value

    def expect_end(self) -> None:
        if self.remaining:
            raise CodecError(f"{self.remaining} trailing bits after the declared element")

    def _take(self, width: int) -> np.ndarray:
        if self._pos + width > self._bits.size:
            raise CodecError("payload exhausted")
        chunk = self._bits[self._pos : self._pos + width]
        self._pos += width
        return chunk


class WireElement(ABC):
    """One declared element of a message payload."""

    kind: ClassVar[str]

    @abstractmethod
    def encode(self, writer: BitWriter) -> None:
        """Write the element to ``writer``."""

    @classmethod
    @abstractmethod
    def decode(cls, reader: BitReader, **schema: Any) -> "WireElement":
        """Read the element back given the schema both parties share."""


def _int_array(values: Any) -> np.ndarray:
    array = np.asarray(values)
    if array.dtype == object:
        return array
    if array.size and not np.issubdtype(array.dtype, np.integer):
        raise CodecError(f"expected integers, got dtype {array.dtype}")
    return array.astype(np.int64)


@dataclass(frozen=True)
class UInt(WireElement):
    """Unsigned scalar in a schema-declared width."""

    kind: ClassVar[str] = "uint"
    value: int
    width: int

    def encode(self, writer: BitWriter) -> None:
        writer.write(self.value, self.width)

    @classmethod
    def decode(cls, reader: BitReader, **schema: Any) -> "UInt":
        width = int(schema["width"])
        return cls(reader.read(width), width)


@dataclass(frozen=True)
class UIntVector(WireElement):
    """Unsigned values in a schema-declared fixed width; no header bits."""

    kind: ClassVar[str] = "uint_vector"
    values: np.ndarray
    width: int

    def encode(self, writer: BitWriter) -> None:
        writer.write_array(_int_array(self.values), self.width)

    @classmethod
    def decode(cls, reader: BitReader, **schema: Any) -> "UIntVector":
        count, width = int(schema["count"]), int(schema["width"])
        return cls(reader.read_array(count, width), width)


@dataclass(frozen=True)
class SizedUIntVector(WireElement):
    """Unsigned values at the minimal common width, declared by a 6-bit header."""

    kind: ClassVar[str] = "sized_uint_vector"
    values: np.ndarray

    @property
    def width(self) -> int:
        array = _int_array(self.values)
        return bit_width(int(array.max())) if array.size else 1

    def encode(self, writer: BitWriter) -> None:
        width = self.width
        if width > 63:
            raise CodecError(f"values need {width} bits, more than the 63-bit header allows")
        writer.write(width, WIDTH_HEADER_BITS)
        writer.write_array(_int_array(self.values), width)

    @classmethod
    def decode(cls, reader: BitReader, **schema: Any) -> "SizedUIntVector":
        count = int(schema["count"])
        width = reader.read(WIDTH_HEADER_BITS)
        return cls(reader.read_array(count, width) if count else np.zeros(0, dtype=np.int64))


@dataclass(frozen=True)
class IndexSet(WireElement):
    """Sorted index set as a varint count followed by delta varints."""

    kind: ClassVar[str] = "index_set"
    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(set(int(i) for i in self.indices)))
        if ordered and ordered[0] < 0:
            raise CodecError("indices must be nonnegative")
        object.__setattr__(self, "indices", ordered)

    def encode(self, writer: BitWriter) -> None:
        writer.write_varint(len(self.indices))
        previous = -1
        for index in self.indices:
            writer.write_varint(index - previous - 1)
            previous = index

    @classmethod
    def decode(cls, reader: BitReader, **schema: Any) -> "IndexSet":
        count = reader.read_varint()
        indices: list[int] = []
        previous = -1
        for _ in range(count):
            previous = previous + 1 + reader.read_varint()
            indices.append(previous)
        return cls(tuple(indices))


@dataclass(frozen=True)
class IndexLists(WireElement):
    """Per-item index lists whose lengths both parties already know.

    Each index costs ``⌈log₂ universe⌉`` bits. When ``values`` is present every
    index is followed by its value as a varint.
    """

    kind: ClassVar[str] = "index_lists"
    lists: tuple[tuple[int, ...], ...]
    universe: int
    values: tuple[tuple[int, ...], ...] | None = None

    def encode(self, writer: BitWriter) -> None:
        width = index_width(self.universe)
        if self.values is not None and len(self.values) != len(self.lists):
            raise CodecError("values must align with index lists")
        for position, indices in enumerate(self.lists):
            if self.values is None:
                if indices:
                    writer.write_array(np.asarray(indices, dtype=np.int64), width)
                continue
            for index, value in zip(indices, self.values[position], strict=True):
                writer.write(index, width)
                writer.write_varint(value)

    @classmethod
    def decode(cls, reader: BitReader, **schema: Any) -> "IndexLists":
        lengths: Sequence[int] = schema["lengths"]
        universe = int(schema["universe"])
        with_values = bool(schema.get("with_values", False))
        width = index_width(universe)
        lists: list[tuple[int, ...]] = []
        values: list[tuple[int, ...]] = []
        for length in lengths:
            if not with_values:
                lists.append(tuple(int(v) for v in reader.read_array(int(length), width)))
                continue
            indices: list[int] = []
            row_values: list[int] = []
            for _ in range(int(length)):
                indices.append(reader.read(width))
                row_values.append(reader.read_varint())
            lists.append(tuple(indices))
            values.append(tuple(row_values))
        return cls(tuple(lists), universe, tuple(values) if with_values else None)

    @staticmethod
    def payload_bits(lengths: Iterable[int], universe: int) -> int:
        return sum(int(length) for length in lengths) * index_width(universe)


@dataclass(frozen=True)
class SparseRows(WireElement):
    """Sparse rows: count, row-gap varints, nnz varints, column-gap varints, value varints.

    A leading flag bit marks all-ones payloads, which then omit the values.
    """

    kind: ClassVar[str] = "sparse_rows"
    rows: Mapping[int, Mapping[int, int]]

    def encode(self, writer: BitWriter) -> None:
        ordered = sorted((int(i), row) for i, row in self.rows.items() if row)
        binary = all(int(v) == 1 for _, row in ordered for v in row.values())
        writer.write(int(binary), 1)
        writer.write_varint(len(ordered))
        previous_row = -1
        for i, row in ordered:
            writer.write_varint(i - previous_row - 1)
            previous_row = i
            cols = sorted(row)
            writer.write_varint(len(cols))
            previous_col = -1
            for j in cols:
                writer.write_varint(j - previous_col - 1)
                previous_col = j
            if not binary:
                for j in cols:
                    writer.write_varint(int(row[j]))

    @classmethod
    def decode(cls, reader: BitReader, **schema: Any) -> "SparseRows":
        binary = bool(reader.read(1))
        count = reader.read_varint()
        rows: dict[int, dict[int, int]] = {}
        previous_row = -1
        for _ in range(count):
            i = previous_row + 1 + reader.read_varint()
            previous_row = i
            nnz = reader.read_varint()
            cols: list[int] = []
            previous_col = -1
            for _ in range(nnz):
                previous_col = previous_col + 1 + reader.read_varint()
                cols.append(previous_col)
            if binary:
                rows[i] = {j: 1 for j in cols}
            else:
                rows[i] = {j: reader.read_varint() for j in cols}
        return cls(rows)


def _quantize_shift(values: np.ndarray) -> int:
    if values.size == 0:
        return 0
    peak = max(abs(int(values.max())), abs(int(values.min())))
    return max(0, peak.bit_length() - (QUANT_BITS - 1))


@dataclass(frozen=True)
class QuantizedMatrix(WireElement):
    """Integer sketch coordinates as 32-bit block fixed point.

    A shared 6-bit shift ``s`` is chosen so the largest magnitude fits in 31 bits;
    each value travels as ``round(v / 2^s)`` in two's complement. Decoding yields
    the dequantized integers ``q·2^s``.
    """

    kind: ClassVar[str] = "quantized_matrix"
    values: np.ndarray

    def quantized(self) -> tuple[np.ndarray, int]:
        array = _int_array(self.values)
        shift = _quantize_shift(array)
        if shift >= 1 << WIDTH_HEADER_BITS:
            raise CodecError("sketch coordinates too large to quantize")
        limit = (1 << (QUANT_BITS - 1)) - 1
        if shift == 0:
            return array.astype(np.int64), 0
        half = 1 << (shift - 1)
        flat = [int(v) for v in array.ravel()]
        codes = [
            min(limit, (v + half) >> shift) if v >= 0 else -min(limit, (-v + half) >> shift) for v in flat
        ]
        return np.asarray(codes, dtype=np.int64).reshape(array.shape), shift

    def dequantized(self) -> np.ndarray:
        codes, shift = self.quantized()
        return _scale_up(codes, shift)

    def encode(self, writer: BitWriter) -> None:
        codes, shift = self.quantized()
        writer.write(shift, WIDTH_HEADER_BITS)
        writer.write_array(np.mod(codes.ravel(), 1 << QUANT_BITS), QUANT_BITS)

    @classmethod
    def decode(cls, reader: BitReader, **schema: Any) -> "QuantizedMatrix":
        shape = tuple(int(v) for v in schema["shape"])
        shift = reader.read(WIDTH_HEADER_BITS)
        raw = reader.read_array(int(np.prod(shape)), QUANT_BITS)
        codes = np.where(raw >= 1 << (QUANT_BITS - 1), raw - (1 << QUANT_BITS), raw).reshape(shape)
        return cls(_scale_up(codes, shift))


def _scale_up(codes: np.ndarray, shift: int) -> np.ndarray:
    if shift == 0:
        return codes.astype(np.int64)
    if shift + QUANT_BITS <= 63:
        return codes.astype(np.int64) << shift
    return np.vectorize(lambda v: int(v) << shift, otypes=[object])(codes)


@dataclass(frozen=True)
class SignedIntMatrix(WireElement):
    """Exact signed integers, zigzag coded at the minimal width declared in a 6-bit header."""

    kind: ClassVar[str] = "signed_int_matrix"
    values: np.ndarray

    def _zigzag(self) -> np.ndarray:
        array = _int_array(self.values)
        if array.dtype == object:
            array = np.array([int(v) for v in array.ravel()], dtype=np.int64).reshape(array.shape)
        return np.where(array >= 0, 2 * array, -2 * array - 1)

    def encode(self, writer: BitWriter) -> None:
        zigzag = self._zigzag()
        width = bit_width(int(zigzag.max())) if zigzag.size else 1
        if width > 63:
            raise CodecError(f"values need {width} bits")
        writer.write(width, WIDTH_HEADER_BITS)
        writer.write_array(zigzag.ravel(), width)

    @classmethod
    def decode(cls, reader: BitReader, **schema: Any) -> "SignedIntMatrix":
        shape = tuple(int(v) for v in schema["shape"])
        width = reader.read(WIDTH_HEADER_BITS)
        zigzag = reader.read_array(int(np.prod(shape)), width)
        values = np.where(zigzag % 2 == 0, zigzag // 2, -(zigzag + 1) // 2)
        return cls(values.reshape(shape))


@dataclass(frozen=True)
class ProbabilityVector(WireElement):
    """Probabilities in (0, 1] as 32-bit codes ``c`` meaning ``(c + 1) / 2^32``."""

    kind: ClassVar[str] = "probability_vector"
    values: tuple[float, ...]

    @staticmethod
    def code(probability: float) -> int:
        if not 0 < probability <= 1:
            raise CodecError(f"probability {probability} outside (0, 1]")
        return max(0, math.ceil(probability * 2**PROBABILITY_BITS) - 1)

    @staticmethod
    def quantize(probability: float) -> float:
        """Smallest representable probability that is at least ``probability``."""

        return (ProbabilityVector.code(probability) + 1) / 2**PROBABILITY_BITS

    def encode(self, writer: BitWriter) -> None:
        for probability in self.values:
            writer.write(self.code(probability), PROBABILITY_BITS)

    @classmethod
    def decode(cls, reader: BitReader, **schema: Any) -> "ProbabilityVector":
        count = int(schema["count"])
        return cls(tuple((reader.read(PROBABILITY_BITS) + 1) / 2**PROBABILITY_BITS for _ in range(count)))


@dataclass(frozen=True)
class Float64(WireElement):
    """IEEE-754 double, used for scalar estimates handed back to the other party."""

    kind: ClassVar[str] = "float64"
    value: float

    def encode(self, writer: BitWriter) -> None:
        writer.write(int.from_bytes(struct.pack(">d", float(self.value)), "big"), 64)

    @classmethod
    def decode(cls, reader: BitReader, **schema: Any) -> "Float64":
        return cls(struct.unpack(">d", reader.read(64).to_bytes(8, "big"))[0])


def encode_element(element: WireElement) -> tuple[bytes, int]:
    writer = BitWriter()
    element.encode(writer)
    return writer.finish()


def decode_element(element_type: type[WireElement], payload: bytes, bit_length: int, **schema: Any) -> WireElement:
    reader = BitReader(payload, bit_length)
    element = element_type.decode(reader, **schema)
    reader.expect_end()
    return element
