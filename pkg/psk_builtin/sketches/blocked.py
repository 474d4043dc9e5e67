"""Blocked ℓ₂ sketch for κ-approximate ℓ∞.

The coordinates are cut into contiguous blocks of ``κ²``. Each block gets its
own random-sign rows, so a block's median-of-means estimate approximates the
block's ℓ₂ norm. A block of ``κ²`` coordinates has ``‖y‖∞ ≤ ‖y‖₂ ≤ κ·‖y‖∞``, so the
largest block estimate lies in ``[‖x‖∞, κ·‖x‖∞]`` up to the sketch error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np

from psk_core.errors import InvalidInputError

from ._arith import exact_matmul


@dataclass(frozen=True)
class BlockedL2Sketch:
    input_dim: int
    kappa: float
    seed: int
    delta: float
    group_size: int = 6

    def __post_init__(self) -> None:
        if self.input_dim < 1:
            raise InvalidInputError(f"input_dim must be positive, got {self.input_dim}")
        if self.kappa < 1:
            raise InvalidInputError(f"kappa must be at least 1, got {self.kappa}")
        if not 0 < self.delta < 1:
            raise InvalidInputError(f"delta must lie in (0, 1), got {self.delta}")
        if self.group_size < 1:
            raise InvalidInputError("group_size must be positive")

    @classmethod
    def for_dimension(cls, input_dim: int, kappa: float, seed: int, group_size: int = 6) -> "BlockedL2Sketch":
        """Sketch with failure probability ``n^-10`` per block."""

        delta = min(0.5, float(max(2, input_dim)) ** -10)
        return cls(input_dim, kappa, seed, delta, group_size)

    @property
    def block_size(self) -> int:
        return min(self.input_dim, max(1, math.ceil(self.kappa**2)))

    @property
    def block_count(self) -> int:
        return math.ceil(self.input_dim / self.block_size)

    @property
    def groups(self) -> int:
        return max(1, math.ceil(math.log(1.0 / self.delta)))

    @property
    def rows_per_block(self) -> int:
        return self.groups * self.group_size

    @property
    def sketch_rows(self) -> int:
        return self.block_count * self.rows_per_block

    @cached_property
    def _matrix(self) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        matrix = np.zeros((self.sketch_rows, self.input_dim), dtype=np.int64)
        for block in range(self.block_count):
            start = block * self.block_size
            stop = min(self.input_dim, start + self.block_size)
            rows = slice(block * self.rows_per_block, (block + 1) * self.rows_per_block)
            signs = rng.choice(np.array([-1, 1], dtype=np.int64), size=(self.rows_per_block, stop - start))
            matrix[rows, start:stop] = signs
        return matrix

    def matrix(self) -> np.ndarray:
        return self._matrix.copy()

    def apply_columns(self, columns: Any) -> np.ndarray:
        block = np.asarray(columns)
        if block.ndim == 1:
            block = block.reshape(-1, 1)
        if block.shape[0] != self.input_dim:
            raise InvalidInputError(f"expected {self.input_dim} rows, got shape {block.shape}")
        return exact_matmul(self._matrix, block)

    def block_estimates(self, coords: Any) -> np.ndarray:
        """Per-block ℓ₂ estimates, shape ``(block_count, m)``."""

        values = np.asarray(coords)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.shape[0] != self.sketch_rows:
            raise InvalidInputError(f"expected {self.sketch_rows} sketch rows, got {values.shape[0]}")
        squares = (values.astype(np.float64) ** 2).reshape(self.block_count, self.groups, self.group_size, -1)
        return np.sqrt(np.median(squares.mean(axis=2), axis=1))

    def estimate_values(self, coords: Any) -> np.ndarray:
        """κ-approximate ℓ∞ estimate per column: the largest block ℓ₂ estimate."""

        return self.block_estimates(coords).max(axis=0)


def blocked_linf_estimate(sketch: BlockedL2Sketch, x: Any) -> float:
    """Sketch ``x`` and return its κ-approximate ℓ∞ estimate."""

    return float(sketch.estimate_values(sketch.apply_columns(np.asarray(x).reshape(-1, 1)))[0])
