"""Sparse integer matrices and the result types of matrix statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping

import numpy as np

from psk_core.errors import InvalidInputError

DEFAULT_MAX_ENTRY = 2**32 - 1

IndexPair = tuple[int, int]


@dataclass(frozen=True)
class SparseIntMatrix:
    """Immutable nonnegative integer matrix stored as a map of nonzero entries.

    Zeros are never stored. ``is_binary`` is derived from the stored values.
    Row and column indexes are built once at construction.
    """

    n_rows: int
    n_cols: int
    entries: Mapping[IndexPair, int]
    max_entry: int = DEFAULT_MAX_ENTRY
    is_binary: bool = field(init=False)
    _rows: dict[int, dict[int, int]] = field(init=False, repr=False, compare=False)
    _cols: dict[int, dict[int, int]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if int(self.n_rows) < 1 or int(self.n_cols) < 1:
            raise InvalidInputError(f"matrix shape must be positive, got {self.n_rows}x{self.n_cols}")
        cleaned: dict[IndexPair, int] = {}
        rows: dict[int, dict[int, int]] = {}
        cols: dict[int, dict[int, int]] = {}
        binary = True
        for (raw_i, raw_j), raw_value in self.entries.items():
            i, j, value = int(raw_i), int(raw_j), int(raw_value)
            if not (0 <= i < self.n_rows and 0 <= j < self.n_cols):
                raise InvalidInputError(f"index ({i}, {j}) outside {self.n_rows}x{self.n_cols}")
            if value < 0:
                raise InvalidInputError(f"negative entry {value} at ({i}, {j})")
            if value > self.max_entry:
                raise InvalidInputError(f"entry {value} at ({i}, {j}) exceeds bound {self.max_entry}")
            if value == 0:
                continue
            binary = binary and value == 1
            cleaned[(i, j)] = value
            rows.setdefault(i, {})[j] = value
            cols.setdefault(j, {})[i] = value
        object.__setattr__(self, "n_rows", int(self.n_rows))
        object.__setattr__(self, "n_cols", int(self.n_cols))
        object.__setattr__(self, "entries", dict(sorted(cleaned.items())))
        object.__setattr__(self, "is_binary", binary)
        object.__setattr__(self, "_rows", rows)
        object.__setattr__(self, "_cols", cols)

    # ---------- Construction ----------

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "SparseIntMatrix":
        return cls(n_rows, n_cols, {})

    @classmethod
    def identity(cls, n: int) -> "SparseIntMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_dense(cls, dense: Any, *, max_entry: int = DEFAULT_MAX_ENTRY) -> "SparseIntMatrix":
        """Build from any 2-D array-like of nonnegative integers."""

        array = np.asarray(dense)
        if array.ndim != 2:
            raise InvalidInputError(f"expected a 2-D array, got {array.ndim} dimensions")
        if array.size and not np.issubdtype(array.dtype, np.integer) and array.dtype != object:
            if not np.all(np.equal(np.mod(array, 1), 0)):
                raise InvalidInputError("matrix entries must be integers")
        rows, cols = np.nonzero(array)
        entries = {(int(i), int(j)): int(array[i, j]) for i, j in zip(rows, cols)}
        return cls(array.shape[0], array.shape[1], entries, max_entry=max_entry)

    @classmethod
    def from_rows(cls, n_rows: int, n_cols: int, rows: Mapping[int, Mapping[int, int]]) -> "SparseIntMatrix":
        entries = {(int(i), int(j)): int(v) for i, row in rows.items() for j, v in row.items()}
        return cls(n_rows, n_cols, entries)

    # ---------- Queries ----------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def get(self, i: int, j: int) -> int:
        return self.entries.get((i, j), 0)

    def row(self, i: int) -> dict[int, int]:
        """Return a copy of row ``i`` as ``{col: value}``."""

        self._check_row(i)
        return dict(self._rows.get(i, {}))

    def col(self, j: int) -> dict[int, int]:
        """Return a copy of column ``j`` as ``{row: value}``."""

        self._check_col(j)
        return dict(self._cols.get(j, {}))

    def nonzero_rows(self) -> tuple[int, ...]:
        return tuple(sorted(self._rows))

    def nonzero_cols(self) -> tuple[int, ...]:
        return tuple(sorted(self._cols))

    def row_sums(self) -> np.ndarray:
        sums = np.zeros(self.n_rows, dtype=np.int64)
        for i, row in self._rows.items():
            sums[i] = sum(row.values())
        return sums

    def col_sums(self) -> np.ndarray:
        sums = np.zeros(self.n_cols, dtype=np.int64)
        for j, col in self._cols.items():
            sums[j] = sum(col.values())
        return sums

    def row_counts(self) -> np.ndarray:
        counts = np.zeros(self.n_rows, dtype=np.int64)
        for i, row in self._rows.items():
            counts[i] = len(row)
        return counts

    def col_counts(self) -> np.ndarray:
        counts = np.zeros(self.n_cols, dtype=np.int64)
        for j, col in self._cols.items():
            counts[j] = len(col)
        return counts

    def max_value(self) -> int:
        return max(self.entries.values(), default=0)

    def items(self) -> Iterator[tuple[IndexPair, int]]:
        return iter(self.entries.items())

    # ---------- Transformations ----------

    def to_dense(self, dtype: Any = np.int64) -> np.ndarray:
        dense = np.zeros((self.n_rows, self.n_cols), dtype=dtype)
        for (i, j), value in self.entries.items():
            dense[i, j] = value
        return dense

    def transpose(self) -> "SparseIntMatrix":
        return SparseIntMatrix(self.n_cols, self.n_rows, {(j, i): v for (i, j), v in self.entries.items()})

    def keep_rows(self, rows: Iterable[int]) -> "SparseIntMatrix":
        """Zero every row outside ``rows``."""

        keep = set(rows)
        return SparseIntMatrix(
            self.n_rows, self.n_cols, {(i, j): v for (i, j), v in self.entries.items() if i in keep}
        )

    def keep_cols(self, cols: Iterable[int]) -> "SparseIntMatrix":
        """Zero every column outside ``cols``."""

        keep = set(cols)
        return SparseIntMatrix(
            self.n_rows, self.n_cols, {(i, j): v for (i, j), v in self.entries.items() if j in keep}
        )

    def __add__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.shape != other.shape:
            raise InvalidInputError(f"cannot add {self.shape} and {other.shape} matrices")
        merged = dict(self.entries)
        for key, value in other.entries.items():
            merged[key] = merged.get(key, 0) + value
        bound = max(self.max_entry, other.max_entry, max(merged.values(), default=0))
        return SparseIntMatrix(self.n_rows, self.n_cols, merged, max_entry=bound)

    # ---------- Internal helpers ----------

    def _check_row(self, i: int) -> None:
        if not 0 <= i < self.n_rows:
            raise InvalidInputError(f"row {i} outside [0, {self.n_rows})")

    def _check_col(self, j: int) -> None:
        if not 0 <= j < self.n_cols:
            raise InvalidInputError(f"column {j} outside [0, {self.n_cols})")


@dataclass(frozen=True)
class MatrixStats:
    """Value of ``‖C‖_p`` with ``p = 0`` counting nonzeros and ``p = inf`` the max entry."""

    p: float
    value: float
    entry_count: int

    def __post_init__(self) -> None:
        if self.value < 0:
            raise InvalidInputError("norm value must be nonnegative")
        if self.entry_count < 0:
            raise InvalidInputError("entry_count must be nonnegative")

    def to_dict(self) -> dict[str, Any]:
        return {"p": self.p, "value": self.value, "entry_count": self.entry_count}


@dataclass(frozen=True)
class HeavyHitterSet:
    """Set of heavy entry positions reported for thresholds ``phi`` and ``phi - eps``."""

    pairs: frozenset[IndexPair]
    phi: float
    eps: float

    def __post_init__(self) -> None:
        if not 0 < self.phi <= 1:
            raise InvalidInputError(f"phi must lie in (0, 1], got {self.phi}")
        if not 0 < self.eps <= self.phi:
            raise InvalidInputError(f"eps must lie in (0, phi], got {self.eps}")
        object.__setattr__(self, "pairs", frozenset((int(i), int(j)) for i, j in self.pairs))

    def __contains__(self, pair: object) -> bool:
        return pair in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def sorted_pairs(self) -> list[IndexPair]:
        return sorted(self.pairs)

    def to_dict(self) -> dict[str, Any]:
        return {"pairs": [list(pair) for pair in self.sorted_pairs()], "phi": self.phi, "eps": self.eps}
