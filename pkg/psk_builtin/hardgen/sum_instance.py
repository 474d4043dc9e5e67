"""Hard distribution for κ-approximate ℓ∞ of binary products.

Each of Alice's ``n`` rows ``U_i`` and Bob's ``V_i`` is a ``k``-bit vector.
Every coordinate pair is drawn from the AND-free distribution: a fair bit
``W`` decides whether a ``β``-biased one goes to Bob (``W = 0``) or Alice
(``W = 1``). One special row ``D`` then has a special coordinate ``M`` reset
to ``(0, 0)`` or ``(1, 1)`` with equal probability, so the number of
intersecting rows is 0 or 1 with equal probability.

``A`` repeats the ``n × k`` block of rows ``U_i`` side by side and ``B``
stacks the ``k × n`` block with columns ``V_i``, so a planted intersection
lifts ``C_{D,D}`` to the number of blocks.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from psk_core.errors import InvalidInputError
from psk_core.matrix import SparseIntMatrix

logger = logging.getLogger(__name__)

BETA_CAP = 0.5


def sum_beta(n: int) -> tuple[float, bool]:
    """``(β, capped)`` with ``β = √(50 ln n / n)`` capped at 1/2."""

    if n < 2:
        raise InvalidInputError(f"n must be at least 2, got {n}")
    raw = math.sqrt(50.0 * math.log(n) / n)
    return (BETA_CAP, True) if raw > BETA_CAP else (raw, False)


def default_sum_k(n: int, kappa: float) -> int:
    """``k = 1/(4κβ²)`` rounded to an integer in ``[1, n]``."""

    if kappa <= 0:
        raise InvalidInputError(f"kappa must be positive, got {kappa}")
    beta, _ = sum_beta(n)
    return min(n, max(1, round(1.0 / (4.0 * kappa * beta**2))))


@dataclass(frozen=True)
class SumInstance:
    n: int
    k: int
    beta: float
    beta_capped: bool
    seed: int
    u: np.ndarray
    v: np.ndarray
    special_row: int
    special_coord: int
    a: SparseIntMatrix
    b: SparseIntMatrix

    @property
    def blocks(self) -> int:
        return self.a.n_cols // self.k

    @property
    def planted_sum(self) -> int:
        """Number of rows ``i`` where ``U_i`` and ``V_i`` intersect."""

        return int(np.any(self.u & self.v, axis=1).sum())

    def to_metadata(self) -> dict[str, Any]:
        return {
            "generator": "sum",
            "n": self.n,
            "k": self.k,
            "blocks": self.blocks,
            "inner_dim": self.a.n_cols,
            "beta": self.beta,
            "beta_capped": self.beta_capped,
            "seed": self.seed,
            "planted_sum": self.planted_sum,
            "special_row": self.special_row,
            "special_coord": self.special_coord,
        }


def gen_sum_instance(n: int, k: int | None = None, seed: int = 0, *, kappa: float = 4.0) -> SumInstance:
    """Draw one instance; when ``k`` does not divide ``n`` the inner dimension is padded to ``⌈n/k⌉·k``."""

    beta, capped = sum_beta(n)
    k = default_sum_k(n, kappa) if k is None else int(k)
    if not 1 <= k <= n:
        raise InvalidInputError(f"k must lie in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    to_alice = rng.random((n, k)) < 0.5
    active = rng.random((n, k)) < beta
    u = active & to_alice
    v = active & ~to_alice
    special_row = int(rng.integers(n))
    special_coord = int(rng.integers(k))
    both = bool(rng.random() < 0.5)
    u[special_row, special_coord] = both
    v[special_row, special_coord] = both

    blocks = math.ceil(n / k)
    a_entries: dict[tuple[int, int], int] = {}
    b_entries: dict[tuple[int, int], int] = {}
    for i, t in zip(*np.nonzero(u)):
        for z in range(blocks):
            a_entries[(int(i), z * k + int(t))] = 1
    for j, t in zip(*np.nonzero(v)):
        for z in range(blocks):
            b_entries[(z * k + int(t), int(j))] = 1
    inner = blocks * k
    if capped:
        logger.debug("sum instance n=%d: beta capped at %.2f", n, BETA_CAP)
    return SumInstance(
        n=n,
        k=k,
        beta=beta,
        beta_capped=capped,
        seed=seed,
        u=u,
        v=v,
        special_row=special_row,
        special_coord=special_coord,
        a=SparseIntMatrix(n, inner, a_entries),
        b=SparseIntMatrix(inner, n, b_entries),
    )
