"""Join instances: relations ``R(i, k)`` and ``S(k, j)`` as binary matrices."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Iterable

from psk_core.errors import InvalidInputError
from psk_core.matrix import SparseIntMatrix


@dataclass(frozen=True)
class JoinInstance:
    """``‖AB‖₀`` is the set-intersection join size and ``‖AB‖₁`` the natural join size."""

    a: SparseIntMatrix
    b: SparseIntMatrix
    set_join_size: int
    natural_join_size: int

    def to_metadata(self) -> dict[str, Any]:
        return {
            "generator": "join",
            "left_rows": self.a.n_rows,
            "keys": self.a.n_cols,
            "right_cols": self.b.n_cols,
            "set_join_size": self.set_join_size,
            "natural_join_size": self.natural_join_size,
        }


def _extent(pairs: set[tuple[int, int]], position: int, declared: int | None, label: str) -> int:
    needed = max((pair[position] for pair in pairs), default=-1) + 1
    if declared is None:
        return max(needed, 1)
    if declared < needed:
        raise InvalidInputError(f"{label}={declared} is smaller than the largest index {needed - 1}")
    return declared


def gen_join_instance(
    left_pairs: Iterable[tuple[int, int]],
    right_pairs: Iterable[tuple[int, int]],
    *,
    n_left: int | None = None,
    n_keys: int | None = None,
    n_right: int | None = None,
) -> JoinInstance:
    """Duplicate tuples are collapsed; dimensions default to the largest index used."""

    left = {(int(i), int(k)) for i, k in left_pairs}
    right = {(int(k), int(j)) for k, j in right_pairs}
    if any(min(pair) < 0 for pair in left | right):
        raise InvalidInputError("relation indices must be nonnegative")
    rows = _extent(left, 0, n_left, "n_left")
    keys = max(_extent(left, 1, n_keys, "n_keys"), _extent(right, 0, n_keys, "n_keys"))
    cols = _extent(right, 1, n_right, "n_right")

    by_key_left: dict[int, set[int]] = defaultdict(set)
    by_key_right: dict[int, set[int]] = defaultdict(set)
    for i, k in left:
        by_key_left[k].add(i)
    for k, j in right:
        by_key_right[k].add(j)
    natural = sum(len(by_key_left[k]) * len(by_key_right[k]) for k in by_key_left if k in by_key_right)
    joined = {(i, j) for k in by_key_left if k in by_key_right for i in by_key_left[k] for j in by_key_right[k]}
    return JoinInstance(
        SparseIntMatrix(rows, keys, {pair: 1 for pair in left}),
        SparseIntMatrix(keys, cols, {pair: 1 for pair in right}),
        len(joined),
        natural,
    )
