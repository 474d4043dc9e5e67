"""Persist generated instances as two matrix files plus a JSON-lines sidecar."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from psk_core.errors import InvalidInputError
from psk_core.matrix import SparseIntMatrix, read_matrix, read_metadata_jsonl, write_matrix, write_metadata_jsonl

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InstancePaths:
    a: Path
    b: Path
    metadata: Path

    @classmethod
    def for_stem(cls, directory: Path, stem: str) -> "InstancePaths":
        return cls(directory / f"{stem}.A.txt", directory / f"{stem}.B.txt", directory / f"{stem}.meta.jsonl")


@dataclass(frozen=True)
class StoredInstance:
    a: SparseIntMatrix
    b: SparseIntMatrix
    metadata: dict[str, Any] = field(default_factory=dict)


def save_instance(
    a: SparseIntMatrix,
    b: SparseIntMatrix,
    metadata: Mapping[str, Any],
    directory: Path,
    stem: str = "instance",
) -> InstancePaths:
    if a.n_cols != b.n_rows:
        raise InvalidInputError(f"cannot store a {a.n_rows}x{a.n_cols} by {b.n_rows}x{b.n_cols} instance")
    directory.mkdir(parents=True, exist_ok=True)
    paths = InstancePaths.for_stem(directory, stem)
    write_matrix(a, paths.a)
    write_matrix(b, paths.b)
    record = {"stem": stem, "shape": [a.n_rows, a.n_cols, b.n_cols], **dict(metadata)}
    write_metadata_jsonl([record], paths.metadata)
    logger.info("stored instance %s in %s", stem, directory)
    return paths


def load_instance(directory: Path, stem: str = "instance") -> StoredInstance:
    """Load a stored instance; the sidecar is optional and its first record is the metadata."""

    paths = InstancePaths.for_stem(directory, stem)
    a = read_matrix(paths.a)
    b = read_matrix(paths.b)
    if a.n_cols != b.n_rows:
        raise InvalidInputError(f"stored matrices {paths.a.name} and {paths.b.name} do not multiply")
    records = read_metadata_jsonl(paths.metadata) if paths.metadata.exists() else []
    return StoredInstance(a, b, records[0] if records else {})
