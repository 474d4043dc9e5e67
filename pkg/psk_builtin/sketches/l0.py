"""Linear ℓ₀-sampler built from fingerprinted 1-sparse recovery.

For every repetition ``t`` each coordinate gets a geometric depth; level ``j``
holds the coordinates of depth at least ``j``. Per (repetition, level) the
state keeps three linear functions of ``x``:

* ``counts``       Σ x_i
* ``weighted``     Σ i·x_i
* ``fingerprints`` Σ x_i·z_t^i mod ``2^61 - 1``

A level is 1-sparse at ``i`` when ``weighted = i·counts`` and the fingerprint
equals ``counts·z_t^i``. Sampling takes the deepest verified level of the first
repetition that verifies one, so the returned index is the unique deepest
coordinate and uniform over the support by symmetry.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Any

import numpy as np

from psk_core.channel.report import SampleStatus
from psk_core.errors import InvalidInputError

from ._arith import MERSENNE_61, derive_seed

logger = logging.getLogger(__name__)

FINGERPRINT_BITS = 61
DEFAULT_RETRIES = 3


@dataclass(frozen=True)
class L0SamplerSpec:
    input_dim: int
    seed: int
    repetitions: int = 0

    def __post_init__(self) -> None:
        if self.input_dim < 1:
            raise InvalidInputError(f"input_dim must be positive, got {self.input_dim}")
        if self.repetitions < 0:
            raise InvalidInputError("repetitions must be nonnegative")

    @property
    def levels(self) -> int:
        return math.ceil(math.log2(self.input_dim)) + 1 if self.input_dim > 1 else 1

    @property
    def reps(self) -> int:
        """Configured repetitions, or ``max(4, ⌈log₂ n⌉)`` when left at 0."""

        if self.repetitions:
            return self.repetitions
        return max(4, math.ceil(math.log2(self.input_dim))) if self.input_dim > 1 else 4


@dataclass(frozen=True)
class SampleOutcome:
    status: SampleStatus
    index: int | None = None

    @property
    def ok(self) -> bool:
        return self.status is SampleStatus.OK


@dataclass(frozen=True, eq=False)
class L0SamplerState:
    """Sampler state; arrays are ``(reps, levels)`` or ``(reps, levels, m)`` for a column batch."""

    spec: L0SamplerSpec
    counts: np.ndarray
    weighted: np.ndarray
    fingerprints: np.ndarray

    @property
    def batched(self) -> bool:
        return self.counts.ndim == 3

    def column(self, j: int) -> "L0SamplerState":
        if not self.batched:
            raise InvalidInputError("state is not a column batch")
        return L0SamplerState(self.spec, self.counts[:, :, j], self.weighted[:, :, j], self.fingerprints[:, :, j])

    def combine(self, weights: Any) -> "L0SamplerState":
        """Linear combination ``Σ_k weights[k, ·]·column_k`` of a column batch.

        ``weights`` is a vector (one resulting state) or a matrix whose columns
        each define a combination (a new batch).
        """

        if not self.batched:
            raise InvalidInputError("only a column batch can be combined")
        coefficients = np.asarray(weights).astype(object)
        counts_in, weighted_in = self.counts.astype(object), self.weighted.astype(object)
        if coefficients.shape[0] != self.counts.shape[2]:
            raise InvalidInputError(
                f"expected {self.counts.shape[2]} weights per combination, got {coefficients.shape[0]}"
            )
        counts = np.tensordot(counts_in, coefficients, axes=([2], [0]))
        weighted = np.tensordot(weighted_in, coefficients, axes=([2], [0]))
        mixed = np.tensordot(self.fingerprints.astype(object), coefficients, axes=([2], [0]))
        fingerprints = np.mod(mixed, MERSENNE_61)
        return L0SamplerState(self.spec, counts, weighted, fingerprints)

    def __add__(self, other: "L0SamplerState") -> "L0SamplerState":
        if other.spec != self.spec:
            raise InvalidInputError("cannot add sampler states with different specs")
        return L0SamplerState(
            self.spec,
            self.counts + other.counts,
            self.weighted + other.weighted,
            np.mod(self.fingerprints + other.fingerprints, MERSENNE_61),
        )

    def sample(self, sampler: "L0Sampler | None" = None) -> SampleOutcome:
        if self.batched:
            raise InvalidInputError("sample a single column; use column(j) first")
        sampler = sampler or L0Sampler(self.spec)
        empty = True
        for rep in range(self.spec.reps):
            if any(int(v) for v in (self.counts[rep, 0], self.weighted[rep, 0], self.fingerprints[rep, 0])):
                empty = False
            for level in range(self.spec.levels - 1, -1, -1):
                count, weighted = int(self.counts[rep, level]), int(self.weighted[rep, level])
                index = sampler.recover(rep, count, weighted, int(self.fingerprints[rep, level]))
                if index is not None:
                    return SampleOutcome(SampleStatus.OK, index)
                if count or int(self.fingerprints[rep, level]):
                    break
        if empty:
            return SampleOutcome(SampleStatus.EMPTY)
        logger.debug("l0 sampler failed on every repetition (reps=%d)", self.spec.reps)
        return SampleOutcome(SampleStatus.FAIL)


class L0Sampler:
    """Hash functions of one :class:`L0SamplerSpec`, materialised from its seed."""

    def __init__(self, spec: L0SamplerSpec) -> None:
        self.spec = spec

    @cached_property
    def _structure(self) -> tuple[np.ndarray, list[int], np.ndarray]:
        spec = self.spec
        rng = np.random.default_rng(spec.seed)
        depths = np.minimum(
            spec.levels - 1, np.floor(-np.log2(1.0 - rng.random((spec.reps, spec.input_dim))))
        ).astype(np.int64)
        bases = [int(v) for v in rng.integers(2, MERSENNE_61 - 1, size=spec.reps, dtype=np.int64)]
        powers = np.empty((spec.reps, spec.input_dim), dtype=object)
        for rep, base in enumerate(bases):
            value = 1
            for i in range(spec.input_dim):
                powers[rep, i] = value
                value = value * base % MERSENNE_61
        return depths, bases, powers

    def _membership(self) -> np.ndarray:
        depths, _, _ = self._structure
        levels = np.arange(self.spec.levels)
        return (depths[:, None, :] >= levels[None, :, None]).astype(np.int64)

    def apply(self, x: Any) -> L0SamplerState:
        vector = np.asarray(x)
        if vector.ndim != 1 or vector.shape[0] != self.spec.input_dim:
            raise InvalidInputError(f"expected a vector of length {self.spec.input_dim}, got shape {vector.shape}")
        batch = self.apply_columns(vector.reshape(-1, 1))
        return batch.column(0)

    def apply_columns(self, columns: Any) -> L0SamplerState:
        """Sampler states of every column of an ``input_dim × m`` integer matrix."""

        block = np.asarray(columns)
        if block.ndim != 2 or block.shape[0] != self.spec.input_dim:
            raise InvalidInputError(f"expected {self.spec.input_dim} rows, got shape {block.shape}")
        _, _, powers = self._structure
        members = self._membership()
        values = block.astype(object)
        indices = np.arange(self.spec.input_dim, dtype=object)
        counts = np.tensordot(members.astype(object), values, axes=([2], [0]))
        weighted = np.tensordot(members.astype(object) * indices, values, axes=([2], [0]))
        fingerprints = np.mod(
            np.tensordot(members.astype(object) * powers[:, None, :], values, axes=([2], [0])), MERSENNE_61
        )
        return L0SamplerState(self.spec, counts, weighted, fingerprints)

    def recover(self, rep: int, count: int, weighted: int, fingerprint: int) -> int | None:
        """Index ``i`` when the (rep, level) triple verifies as 1-sparse at ``i``."""

        if count == 0 or weighted % count:
            return None
        index = weighted // count
        if not 0 <= index < self.spec.input_dim:
            return None
        _, bases, _ = self._structure
        if (count % MERSENNE_61) * pow(bases[rep], index, MERSENNE_61) % MERSENNE_61 != fingerprint % MERSENNE_61:
            return None
        return index


def l0_sample(state: L0SamplerState) -> SampleOutcome:
    return state.sample()


def l0_sample_with_retry(x: Any, spec: L0SamplerSpec, retries: int = DEFAULT_RETRIES) -> SampleOutcome:
    """Sample ``x``, retrying ``FAIL`` with freshly derived seeds up to ``retries`` times."""

    outcome = SampleOutcome(SampleStatus.FAIL)
    for attempt in range(retries + 1):
        attempt_spec = spec if attempt == 0 else replace(spec, seed=derive_seed(spec.seed, attempt))
        sampler = L0Sampler(attempt_spec)
        outcome = sampler.apply(x).sample(sampler)
        if outcome.status is not SampleStatus.FAIL:
            return outcome
        logger.debug("l0 sample attempt %d failed", attempt)
    logger.warning("l0 sampler failed after %d retries", retries)
    return outcome
