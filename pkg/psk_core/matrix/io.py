"""Text format for sparse integer matrices and JSON-lines metadata sidecars.

Matrix files start with ``n_rows n_cols nnz binary_flag`` followed by one
``row col value`` triple per line in row-major order.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Mapping

from psk_core.errors import InvalidInputError

from .models import DEFAULT_MAX_ENTRY, SparseIntMatrix


def dumps_matrix(matrix: SparseIntMatrix) -> str:
    lines = [f"{matrix.n_rows} {matrix.n_cols} {matrix.nnz} {int(matrix.is_binary)}"]
    lines.extend(f"{i} {j} {value}" for (i, j), value in sorted(matrix.items()))
    return "\n".join(lines) + "\n"


def loads_matrix(text: str, *, max_entry: int = DEFAULT_MAX_ENTRY) -> SparseIntMatrix:
    rows = [line.strip() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not rows:
        raise InvalidInputError("matrix text is empty")
    header = rows[0].split()
    if len(header) != 4:
        raise InvalidInputError(f"malformed matrix header: {rows[0]!r}")
    try:
        n_rows, n_cols, nnz, binary_flag = (int(token) for token in header)
    except ValueError as exc:
        raise InvalidInputError(f"malformed matrix header: {rows[0]!r}") from exc
    if len(rows) - 1 != nnz:
        raise InvalidInputError(f"header declares {nnz} entries but {len(rows) - 1} follow")
    entries: dict[tuple[int, int], int] = {}
    previous: tuple[int, int] | None = None
    for line in rows[1:]:
        parts = line.split()
        if len(parts) != 3:
            raise InvalidInputError(f"malformed entry line: {line!r}")
        i, j, value = (int(token) for token in parts)
        if value == 0:
            raise InvalidInputError(f"explicit zero at ({i}, {j})")
        if previous is not None and (i, j) <= previous:
            raise InvalidInputError(f"entries not in row-major order at ({i}, {j})")
        previous = (i, j)
        entries[(i, j)] = value
    matrix = SparseIntMatrix(n_rows, n_cols, entries, max_entry=max_entry)
    if bool(binary_flag) != matrix.is_binary:
        raise InvalidInputError(f"binary flag {binary_flag} disagrees with the stored values")
    return matrix


def write_matrix(matrix: SparseIntMatrix, path: Path) -> None:
    Path(path).write_text(dumps_matrix(matrix), encoding="utf-8")


def read_matrix(path: Path, *, max_entry: int = DEFAULT_MAX_ENTRY) -> SparseIntMatrix:
    return loads_matrix(Path(path).read_text(encoding="utf-8"), max_entry=max_entry)


def write_metadata_jsonl(records: Iterable[Mapping[str, Any]], path: Path) -> None:
    with Path(path).open("w", encoding="utf-8") as f:
        for record in records:
            json.dump(dict(record), f, ensure_ascii=False, sort_keys=True)
            f.write("\n")


def read_metadata_jsonl(path: Path) -> list[dict[str, Any]]:
    records: list[dict[str, Any]] = []
    with Path(path).open("r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            records.append(json.loads(line))
    return records
