"""Instance families the harness draws trial inputs from.

Every family returns the two matrices plus whatever statistics it planted, so
trials can be scored without the cubic oracle at larger ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from psk_core.errors import InvalidInputError
from psk_core.matrix import SparseIntMatrix

from ..hardgen import gen_disj_embedding, gen_sum_instance, load_instance
from .config import ExperimentConfig

PLANTED_ENTRY = 1000
HEAVY_FRACTION = 0.6


@dataclass(frozen=True)
class Instance:
    a: SparseIntMatrix
    b: SparseIntMatrix
    planted: dict[str, Any] = field(default_factory=dict)


def _random_binary(rng: np.random.Generator, shape: tuple[int, int], density: float) -> dict[tuple[int, int], int]:
    rows, cols = np.nonzero(rng.random(shape) < density)
    return {(int(i), int(j)): 1 for i, j in zip(rows, cols)}


def random_density(config: ExperimentConfig, rng: np.random.Generator, binary: bool) -> Instance:
    n = config.n
    return Instance(
        SparseIntMatrix(n, n, _random_binary(rng, (n, n), config.density)),
        SparseIntMatrix(n, n, _random_binary(rng, (n, n), config.density)),
    )


def planted_max(config: ExperimentConfig, rng: np.random.Generator, binary: bool) -> Instance:
    """Binary: an all-ones row of ``A`` meets an all-ones column of ``B``, so ``‖C‖∞ = n``.

    Integer: a single entry ``M`` in an otherwise empty row of ``A`` meets a one in ``B``,
    so ``‖C‖∞ = M`` as long as ``n < M``.
    """

    n = config.n
    row, col = int(rng.integers(n)), int(rng.integers(n))
    a_entries = _random_binary(rng, (n, n), config.density)
    b_entries = _random_binary(rng, (n, n), config.density)
    if binary:
        a_entries.update({(row, k): 1 for k in range(n)})
        b_entries.update({(k, col): 1 for k in range(n)})
        return Instance(SparseIntMatrix(n, n, a_entries), SparseIntMatrix(n, n, b_entries), {"linf": float(n)})
    if n >= PLANTED_ENTRY:
        raise InvalidInputError(f"integer planted-max needs n < {PLANTED_ENTRY}")
    key = int(rng.integers(n))
    a_entries = {pair: value for pair, value in a_entries.items() if pair[0] != row}
    a_entries[(row, key)] = PLANTED_ENTRY
    b_entries[(key, col)] = 1
    return Instance(
        SparseIntMatrix(n, n, a_entries),
        SparseIntMatrix(n, n, b_entries),
        {"linf": float(PLANTED_ENTRY)},
    )


def planted_hh(config: ExperimentConfig, rng: np.random.Generator, binary: bool) -> Instance:
    """One pair carries about 60% of ``‖C‖₁``; background keys each add a single unit elsewhere.

    Planted keys and background keys are disjoint, so ``‖C‖₁ = s + t`` exactly.
    """

    n = config.n
    row, col = int(rng.integers(n)), int(rng.integers(n))
    keys = rng.permutation(n)
    shared = max(1, n // 2)
    background = min(n - shared, round(shared * (1.0 / HEAVY_FRACTION - 1.0)))
    a_entries = {(row, int(k)): 1 for k in keys[:shared]}
    b_entries = {(int(k), col): 1 for k in keys[:shared]}
    other_rows = [i for i in range(n) if i != row] or [row]
    other_cols = [j for j in range(n) if j != col] or [col]
    for k in keys[shared : shared + background]:
        a_entries[(int(rng.choice(other_rows)), int(k))] = 1
        b_entries[(int(k), int(rng.choice(other_cols)))] = 1
    total = shared + background
    planted = {"l1": float(total), "heavy_pair": [row, col], "heavy_fraction": shared / total}
    return Instance(SparseIntMatrix(n, n, a_entries), SparseIntMatrix(n, n, b_entries), planted)


def disj_embed(config: ExperimentConfig, rng: np.random.Generator, binary: bool) -> Instance:
    half = config.n // 2
    length = half * half
    x = (rng.random(length) < config.density).astype(int)
    y = (rng.random(length) < config.density).astype(int)
    embedding = gen_disj_embedding(x.tolist(), y.tolist())
    planted = {"linf": float(embedding.planted_linf), "intersecting": embedding.intersecting}
    return Instance(embedding.a, embedding.b, planted)


def sum_instance(config: ExperimentConfig, rng: np.random.Generator, binary: bool) -> Instance:
    instance = gen_sum_instance(config.n, seed=int(rng.integers(2**63)), kappa=max(config.kappa, 1.0))
    return Instance(instance.a, instance.b, instance.to_metadata())


def from_file(config: ExperimentConfig, rng: np.random.Generator, binary: bool) -> Instance:
    """``file`` is an instance directory (stem ``instance``) or ``<directory>/<stem>``."""

    path = Path(config.file) if config.file else Path(".")
    directory, stem = (path, "instance") if path.is_dir() else (path.parent, path.name)
    stored = load_instance(directory, stem)
    return Instance(stored.a, stored.b, dict(stored.metadata))


FamilyBuilder = Callable[[ExperimentConfig, np.random.Generator, bool], Instance]

FAMILY_BUILDERS: dict[str, FamilyBuilder] = {
    "random-density": random_density,
    "planted-max": planted_max,
    "planted-hh": planted_hh,
    "disj-embed": disj_embed,
    "sum-instance": sum_instance,
    "file": from_file,
}


def make_instance(config: ExperimentConfig, seed: int, *, binary: bool) -> Instance:
    rng = np.random.default_rng(seed)
    return FAMILY_BUILDERS[config.family](config, rng, binary)
