"""Block embeddings that turn a matrix product into a matrix sum.

For ``x, y`` of length ``(n/2)²`` Alice's ``A′`` and Bob's ``B′`` are the
``n/2 × n/2`` reshapes, and

    A = [[A′, I], [0, 0]]    B = [[I, 0], [B′, 0]]

so ``AB = [[A′ + B′, 0], [0, 0]]``. With bit vectors ``‖AB‖∞`` is 2 exactly
when ``x`` and ``y`` intersect; with entries in ``[0, κ]`` it equals
``max_i (x_i + y_i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

from psk_core.errors import InvalidInputError
from psk_core.matrix import SparseIntMatrix


@dataclass(frozen=True)
class DisjEmbedding:
    x: tuple[int, ...]
    y: tuple[int, ...]
    a: SparseIntMatrix
    b: SparseIntMatrix
    kappa: int = 1

    @property
    def n(self) -> int:
        return self.a.n_rows

    @property
    def intersecting(self) -> bool:
        return any(xi and yi for xi, yi in zip(self.x, self.y))

    @property
    def planted_linf(self) -> int:
        """``‖A′ + B′‖∞``, which is ``‖AB‖∞``."""

        return max((xi + yi for xi, yi in zip(self.x, self.y)), default=0)

    @property
    def gap_far(self) -> bool:
        """Whether some coordinate pair differs by at least ``κ``."""

        return any(abs(xi - yi) >= self.kappa for xi, yi in zip(self.x, self.y))

    def to_metadata(self) -> dict[str, Any]:
        return {
            "generator": "disj" if self.kappa == 1 else "gapinf",
            "n": self.n,
            "kappa": self.kappa,
            "intersecting": self.intersecting,
            "gap_far": self.gap_far,
            "planted_linf": self.planted_linf,
        }


def _half_dimension(length: int) -> int:
    half = math.isqrt(length)
    if length < 1 or half * half != length:
        raise InvalidInputError(f"vector length {length} is not a positive perfect square")
    return half


def _embed(x: Sequence[int], y: Sequence[int], kappa: int) -> DisjEmbedding:
    if len(x) != len(y):
        raise InvalidInputError(f"x and y differ in length ({len(x)} vs {len(y)})")
    half = _half_dimension(len(x))
    for name, vector in (("x", x), ("y", y)):
        bad = [value for value in vector if not 0 <= int(value) <= kappa]
        if bad:
            raise InvalidInputError(f"{name} has entries outside [0, {kappa}]: {bad[:3]}")
    n = 2 * half
    a_entries: dict[tuple[int, int], int] = {}
    b_entries: dict[tuple[int, int], int] = {}
    for index, (xi, yi) in enumerate(zip(x, y)):
        row, col = divmod(index, half)
        if xi:
            a_entries[(row, col)] = int(xi)
        if yi:
            b_entries[(half + row, col)] = int(yi)
    for i in range(half):
        a_entries[(i, half + i)] = 1
        b_entries[(i, i)] = 1
    max_entry = max(kappa, 1)
    return DisjEmbedding(
        tuple(int(v) for v in x),
        tuple(int(v) for v in y),
        SparseIntMatrix(n, n, a_entries, max_entry=max_entry),
        SparseIntMatrix(n, n, b_entries, max_entry=max_entry),
        kappa,
    )


def gen_disj_embedding(x: Sequence[int], y: Sequence[int]) -> DisjEmbedding:
    """Embed bit vectors ``x, y`` of length ``(n/2)²`` as ``n × n`` binary matrices."""

    return _embed(x, y, 1)


def gen_gapinf_embedding(x: Sequence[int], y: Sequence[int], kappa: int) -> DisjEmbedding:
    """Same embedding for integer vectors with entries in ``[0, κ]``."""

    if int(kappa) < 1:
        raise InvalidInputError(f"kappa must be a positive integer, got {kappa}")
    return _embed(x, y, int(kappa))
