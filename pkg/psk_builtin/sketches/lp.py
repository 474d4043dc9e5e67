"""Linear ℓ_p sketches for ``p ∈ [0, 2]``.

* ``p = 2``: random-sign projections, estimated by median of group means of squares.
* ``0 < p < 2``: p-stable projections drawn with the Chambers-Mallows-Stuck
  method, stored in 16-bit fractional fixed point, estimated by the median of
  absolute coordinates over the stable median.
* ``p = 0``: geometric subsampling levels hashed into ``K`` buckets with random
  multipliers modulo ``2^31 - 1``; a bucket is occupied when its residue is
  nonzero and occupancy is turned into a count by linear counting.

Every estimate is of ``‖x‖_p^p`` (the support size when ``p = 0``).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any

import numpy as np

from psk_core.errors import InvalidInputError

from ._arith import MERSENNE_31, exact_matmul, modmatmul

logger = logging.getLogger(__name__)

FRACTION_BITS = 16
STABLE_CLIP = 2.0**15
LINEAR_COUNTING_LOAD = 0.63
_STABLE_MEDIAN_SAMPLES = 1 << 20
_STABLE_MEDIAN_SEED = 0x5EED


@lru_cache(maxsize=64)
def stable_abs_median(p: float) -> float:
    """Median of ``|X|`` for a standard symmetric p-stable ``X``."""

    if not 0 < p < 2:
        raise InvalidInputError(f"stable median needs p in (0, 2), got {p}")
    if p == 1:
        return 1.0
    rng = np.random.default_rng(_STABLE_MEDIAN_SEED)
    return float(np.median(np.abs(_stable_samples(rng, p, (_STABLE_MEDIAN_SAMPLES,)))))


def _stable_samples(rng: np.random.Generator, p: float, shape: tuple[int, ...]) -> np.ndarray:
    theta = rng.uniform(-math.pi / 2, math.pi / 2, size=shape)
    if p == 1:
        return np.tan(theta)
    weight = rng.exponential(1.0, size=shape)
    return (
        np.sin(p * theta)
        / np.cos(theta) ** (1.0 / p)
        * (np.cos((1.0 - p) * theta) / weight) ** ((1.0 - p) / p)
    )


@dataclass(frozen=True)
class LpSketchSpec:
    """Shape and seed of an ℓ_p sketch over vectors of length ``input_dim``."""

    p: float
    eps: float
    delta: float
    input_dim: int
    seed: int
    constant: float = 6.0

    def __post_init__(self) -> None:
        if not 0 <= self.p <= 2:
            raise InvalidInputError(f"p must lie in [0, 2], got {self.p}")
        if not 0 < self.eps < 1:
            raise InvalidInputError(f"eps must lie in (0, 1), got {self.eps}")
        if not 0 < self.delta < 1:
            raise InvalidInputError(f"delta must lie in (0, 1), got {self.delta}")
        if self.input_dim < 1:
            raise InvalidInputError(f"input_dim must be positive, got {self.input_dim}")
        if self.constant <= 0:
            raise InvalidInputError("sketch constant must be positive")

    @property
    def groups(self) -> int:
        return max(1, math.ceil(math.log(1.0 / self.delta)))

    @property
    def group_size(self) -> int:
        return max(1, math.ceil(self.constant * math.ceil(1.0 / self.eps**2)))

    @property
    def levels(self) -> int:
        return math.ceil(math.log2(self.input_dim)) + 1 if self.input_dim > 1 else 1

    @property
    def sketch_rows(self) -> int:
        """Rows of ``S``; for ``p = 0`` this includes the subsampling levels."""

        rows = self.groups * self.group_size
        return rows * self.levels if self.p == 0 else rows

    @property
    def scale(self) -> int:
        """Fixed-point scale of the integer sketching matrix."""

        return 1 << FRACTION_BITS if 0 < self.p < 2 else 1


@dataclass(frozen=True, eq=False)
class LpSketchVector:
    """Sketch coordinates ``S·x`` (integers; residues modulo ``2^31 - 1`` when ``p = 0``)."""

    spec: LpSketchSpec
    coords: np.ndarray

    def __add__(self, other: "LpSketchVector") -> "LpSketchVector":
        if other.spec != self.spec:
            raise InvalidInputError("cannot merge sketches built from different specs")
        merged = self.coords + other.coords
        if self.spec.p == 0:
            merged = np.mod(merged, MERSENNE_31)
        return LpSketchVector(self.spec, merged)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LpSketchVector):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.coords, other.coords)

    __hash__ = None  # type: ignore[assignment]


class LpSketch:
    """Sketching matrix for one :class:`LpSketchSpec`, materialised from its seed."""

    def __init__(self, spec: LpSketchSpec) -> None:
        self.spec = spec

    @cached_property
    def _matrix(self) -> np.ndarray:
        spec = self.spec
        rng = np.random.default_rng(spec.seed)
        if spec.p == 2:
            return rng.choice(np.array([-1, 1], dtype=np.int64), size=(spec.sketch_rows, spec.input_dim))
        if spec.p > 0:
            raw = _stable_samples(rng, spec.p, (spec.sketch_rows, spec.input_dim))
            samples = np.clip(raw, -STABLE_CLIP, STABLE_CLIP)
            return np.rint(samples * spec.scale).astype(np.int64)
        return self._subsampling_matrix(rng)

    def _subsampling_matrix(self, rng: np.random.Generator) -> np.ndarray:
        spec = self.spec
        buckets, levels, reps = spec.group_size, spec.levels, spec.groups
        matrix = np.zeros((reps, levels, buckets, spec.input_dim), dtype=np.int64)
        columns = np.arange(spec.input_dim)
        for rep in range(reps):
            depth = np.minimum(levels - 1, np.floor(-np.log2(1.0 - rng.random(spec.input_dim)))).astype(np.int64)
            bucket = rng.integers(0, buckets, size=spec.input_dim)
            multiplier = rng.integers(1, MERSENNE_31, size=spec.input_dim, dtype=np.int64)
            for level in range(levels):
                member = depth >= level
                matrix[rep, level, bucket[member], columns[member]] = multiplier[member]
        return matrix.reshape(spec.sketch_rows, spec.input_dim)

    def matrix(self) -> np.ndarray:
        """The integer sketching matrix ``S`` (fixed point for stable sketches)."""

        return self._matrix.copy()

    def apply(self, x: Any) -> LpSketchVector:
        vector = np.asarray(x)
        if vector.ndim != 1 or vector.shape[0] != self.spec.input_dim:
            raise InvalidInputError(f"expected a vector of length {self.spec.input_dim}, got shape {vector.shape}")
        return LpSketchVector(self.spec, self.apply_columns(vector.reshape(-1, 1)).ravel())

    def apply_columns(self, columns: Any) -> np.ndarray:
        """Sketch every column of an ``input_dim × m`` integer matrix at once."""

        block = np.asarray(columns)
        if block.ndim != 2 or block.shape[0] != self.spec.input_dim:
            raise InvalidInputError(f"expected {self.spec.input_dim} rows, got shape {block.shape}")
        if self.spec.p == 0:
            return modmatmul(self._matrix, block)
        return exact_matmul(self._matrix, block)

    def estimate(self, sketch: LpSketchVector) -> float:
        if sketch.spec != self.spec:
            raise InvalidInputError("sketch was built from a different spec")
        return float(self.estimate_values(sketch.coords.reshape(-1, 1))[0])

    def estimate_values(self, coords: Any) -> np.ndarray:
        """Estimate ``‖·‖_p^p`` for every column of a ``sketch_rows × m`` coordinate block."""

        block = np.asarray(coords)
        if block.ndim == 1:
            block = block.reshape(-1, 1)
        if block.shape[0] != self.spec.sketch_rows:
            raise InvalidInputError(f"expected {self.spec.sketch_rows} sketch rows, got {block.shape[0]}")
        if self.spec.p == 0:
            return self._estimate_support(block)
        values = block.astype(np.float64) / self.spec.scale
        if self.spec.p == 2:
            squares = (values**2).reshape(self.spec.groups, self.spec.group_size, -1)
            return np.median(squares.mean(axis=1), axis=0)
        return (np.median(np.abs(values), axis=0) / stable_abs_median(self.spec.p)) ** self.spec.p

    def _estimate_support(self, block: np.ndarray) -> np.ndarray:
        spec = self.spec
        buckets = spec.group_size
        occupied = (block != 0).reshape(spec.groups, spec.levels, buckets, -1).sum(axis=2)
        acceptable = occupied <= LINEAR_COUNTING_LOAD * buckets
        # first level light enough for linear counting, else the deepest level
        chosen = np.where(acceptable.any(axis=1), acceptable.argmax(axis=1), spec.levels - 1)
        counts = np.take_along_axis(occupied, chosen[:, None, :], axis=1)[:, 0, :].astype(np.float64)
        counts = np.minimum(counts, buckets - 1) if buckets > 1 else counts
        if buckets > 1:
            per_level = np.log1p(-counts / buckets) / math.log1p(-1.0 / buckets)
        else:
            per_level = counts
        return np.median(per_level * np.exp2(chosen), axis=0)


def lp_apply(spec: LpSketchSpec, x: Any) -> LpSketchVector:
    return LpSketch(spec).apply(x)


def lp_estimate(sketch: LpSketchVector) -> float:
    return LpSketch(sketch.spec).estimate(sketch)
