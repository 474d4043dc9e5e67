"""ℓ∞ of a product of binary matrices via level subsampling and index exchange.

Alice keeps each 1-entry of ``A`` at level ``ℓ`` with probability ``p_ℓ``; one
private uniform per entry makes the levels nested. From the per-level column
sums Bob evaluates ``‖C^ℓ‖₁`` exactly and picks the first level under the
threshold, the two parties split ``C^{ℓ*}`` additively with the index
exchange, and Bob reports ``max(‖C_A‖∞, ‖C_B‖∞)`` rescaled by the sampling rate.

``linf-2eps`` uses ``p_ℓ = (1+ε)^-ℓ``. ``linf-kappa`` first keeps a random
``q``-fraction of the universe (columns of ``A``) and uses ``p_ℓ = 2^-ℓ``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from psk_core.api import ProtocolRequest, PSKAbstractProtocol, pskprotocol
from psk_core.channel import (
    Endpoint,
    EstimateReport,
    IndexSet,
    ProtocolSession,
    ScalarEstimate,
    SizedUIntVector,
    UInt,
)
from psk_core.errors import InvalidInputError
from psk_core.matrix import SparseIntMatrix, linf_norm

from ._common import log_dim, open_endpoints, ratio_within, require_binary, require_eps
from .exchange import (
    alice_items,
    bob_items,
    own_columns,
    own_rows,
    rank_one_sum,
    receive_counts,
    receive_lists,
    send_column_lists,
    send_counts,
    send_row_lists,
)

logger = logging.getLogger(__name__)

LEVEL_BITS = 16


@dataclass(frozen=True)
class LinfParams:
    eps: float
    c_gamma: float = 8.0

    def __post_init__(self) -> None:
        require_eps(self.eps)
        if self.c_gamma <= 0:
            raise InvalidInputError("c_gamma must be positive")

    def gamma(self, log_n: float) -> float:
        return self.c_gamma * log_n / self.eps**2

    def level_prob(self, level: int) -> float:
        return (1.0 + self.eps) ** -level

    def level_count(self, mass: int) -> int:
        """``L = ⌈log_{1+ε} ‖A‖₁⌉``; levels run ``0..L``."""

        return math.ceil(math.log(mass) / math.log1p(self.eps)) if mass > 1 else 0


@dataclass(frozen=True)
class UniverseSampleParams:
    kappa: float
    c_alpha: float = 1.0

    def __post_init__(self) -> None:
        if self.kappa < 4:
            raise InvalidInputError(f"kappa must be at least 4, got {self.kappa}")
        if self.c_alpha <= 0:
            raise InvalidInputError("c_alpha must be positive")

    def alpha(self, log_n: float) -> float:
        return self.c_alpha * log_n

    def q(self, log_n: float) -> float:
        return min(self.alpha(log_n) / self.kappa, 1.0)

    def level_prob(self, level: int) -> float:
        return 2.0**-level

    def level_count(self, mass: int) -> int:
        return math.ceil(math.log2(mass)) if mass > 1 else 0


# ---------- Shared level machinery ----------


def entry_depths(rng: np.random.Generator, count: int, probs: Sequence[float]) -> np.ndarray:
    """Deepest level each entry survives; level ``ℓ`` keeps draws below ``p_ℓ``."""

    if count == 0:
        return np.zeros(0, dtype=np.int64)
    draws = rng.random(count)
    return (draws[:, None] < np.asarray(probs)[None, :]).sum(axis=1).astype(np.int64) - 1


def level_column_sums(
    cols: np.ndarray, depths: np.ndarray, level_total: int, columns: Sequence[int]
) -> np.ndarray:
    """``(levels, len(columns))`` counts of entries per listed column surviving each level."""

    position = {int(j): index for index, j in enumerate(columns)}
    sums = np.zeros((level_total + 1, len(columns)), dtype=np.int64)
    for col, depth in zip(cols, depths):
        sums[: depth + 1, position[int(col)]] += 1
    return sums


def select_level(level_norms: Sequence[int], threshold: float) -> int:
    """First level whose ``‖C^ℓ‖₁`` is within the threshold, else the last level."""

    for level, norm in enumerate(level_norms):
        if norm <= threshold:
            return level
    return len(level_norms) - 1


def _level_matrix(
    entries: Sequence[tuple[int, int]], depths: np.ndarray, level: int, shape: tuple[int, int]
) -> SparseIntMatrix:
    kept = {pair: 1 for pair, depth in zip(entries, depths) if depth >= level}
    return SparseIntMatrix(shape[0], shape[1], kept)


def _exchange_at_level(
    alice: Endpoint[SparseIntMatrix],
    bob: Endpoint[SparseIntMatrix],
    chosen: int,
    items: Sequence[int],
    u_at_bob: np.ndarray,
    entries: Sequence[tuple[int, int]],
    depths: np.ndarray,
) -> tuple[int, int, dict[str, int]]:
    """Bob's second round and Alice's third; returns ``(‖C_A‖∞, ‖C_B‖∞, split sizes)`` at Bob."""

    a, b = alice.input, bob.input
    inner, shape = a.n_cols, (a.n_rows, b.n_cols)
    index = np.asarray(items, dtype=np.int64)

    bob.send(UInt(chosen, LEVEL_BITS))
    v = np.zeros(inner, dtype=np.int64)
    v[index] = b.row_counts()[index]
    send_counts(bob, v[index])
    from_bob = bob_items(u_at_bob, v)
    send_row_lists(bob, b, from_bob, with_values=False)

    level = alice.receive(UInt, width=LEVEL_BITS).value
    v_at_alice = np.zeros(inner, dtype=np.int64)
    v_at_alice[index] = receive_counts(alice, len(index))
    a_level = _level_matrix(entries, depths, level, (a.n_rows, inner))
    u = a_level.col_counts()
    rows = receive_lists(alice, bob_items(u, v_at_alice), v_at_alice, shape[1], with_values=False)
    c_alice = rank_one_sum(own_columns(a_level, tuple(rows)), rows, shape)
    from_alice = alice_items(u, v_at_alice)
    send_column_lists(alice, a_level, from_alice, with_values=False)
    alice.send(SizedUIntVector(np.array([c_alice.max_value()], dtype=np.int64)))

    cols = receive_lists(bob, alice_items(u_at_bob, v), u_at_bob, shape[0], with_values=False)
    c_bob = rank_one_sum(cols, own_rows(b, tuple(cols)), shape)
    max_alice = int(bob.receive(SizedUIntVector, count=1).values[0])
    return max_alice, c_bob.max_value(), {"alice_lists": len(cols), "bob_lists": len(from_bob)}


# ---------- (2+ε)-approximation ----------


def run_linf_2eps(
    a: SparseIntMatrix, b: SparseIntMatrix, params: LinfParams, session: ProtocolSession
) -> EstimateReport:
    """Three rounds: per-level column sums, then level choice and Bob's lists, then Alice's lists."""

    require_binary(a, b, "linf-2eps")
    alice, bob = open_endpoints(session, a, b)
    inner = a.n_cols
    columns = range(inner)

    entries = [pair for pair, _ in alice.input.items()]
    level_total = params.level_count(len(entries))
    probs = [params.level_prob(level) for level in range(level_total + 1)]
    depths = entry_depths(alice.private_generator(), len(entries), probs)
    sums = level_column_sums(np.array([k for _, k in entries], dtype=np.int64), depths, level_total, columns)
    alice.send(UInt(level_total, LEVEL_BITS))
    alice.send(SizedUIntVector(sums.ravel()))

    levels = bob.receive(UInt, width=LEVEL_BITS).value + 1
    sums_at_bob = bob.receive(SizedUIntVector, count=levels * inner).values.reshape(levels, inner)
    level_norms = [int(v) for v in sums_at_bob @ bob.input.row_sums()]
    threshold = params.gamma(log_dim(a, b)) * a.n_rows * b.n_cols
    chosen = select_level(level_norms, threshold)
    max_alice, max_bob, split = _exchange_at_level(
        alice, bob, chosen, list(columns), sums_at_bob[chosen], entries, depths
    )
    estimate = max(max_alice, max_bob) / params.level_prob(chosen)
    bob.output(
        ScalarEstimate(estimate),
        level_norms=level_norms,
        chosen_level=chosen,
        threshold=threshold,
        **split,
    )
    return session.finish()


# ---------- κ-approximation ----------


def run_linf_kappa(
    a: SparseIntMatrix, b: SparseIntMatrix, params: UniverseSampleParams, session: ProtocolSession
) -> EstimateReport:
    """Universe sampling then the level scheme with ``p_ℓ = 2^-ℓ``; one round when nothing survives."""

    require_binary(a, b, "linf-kappa")
    if params.kappa > max(a.n_rows, a.n_cols, b.n_cols):
        raise InvalidInputError(f"kappa {params.kappa} exceeds the matrix dimension")
    alice, bob = open_endpoints(session, a, b)
    inner = a.n_cols
    q = params.q(log_dim(a, b))

    rng = alice.private_generator()
    sampled = tuple(int(j) for j in np.flatnonzero(rng.random(inner) < q)) if q < 1 else tuple(range(inner))
    a_prime = alice.input.keep_cols(sampled)
    entries = [pair for pair, _ in a_prime.items()]
    level_total = params.level_count(len(entries))
    probs = [params.level_prob(level) for level in range(level_total + 1)]
    depths = entry_depths(rng, len(entries), probs)
    sums = level_column_sums(np.array([k for _, k in entries], dtype=np.int64), depths, level_total, sampled)
    alice.send(IndexSet(sampled))
    alice.send(SizedUIntVector(alice.input.col_sums()))
    alice.send(UInt(level_total, LEVEL_BITS))
    alice.send(SizedUIntVector(sums.ravel()))

    items = bob.receive(IndexSet).indices
    col_sums = bob.receive(SizedUIntVector, count=inner).values
    levels = bob.receive(UInt, width=LEVEL_BITS).value + 1
    sums_at_bob = bob.receive(SizedUIntVector, count=levels * len(items)).values.reshape(levels, len(items))
    row_sums = bob.input.row_sums()
    index = np.asarray(items, dtype=np.int64)
    sampled_mass = int(np.dot(col_sums[index], row_sums[index])) if items else 0
    if sampled_mass == 0:
        total = int(np.dot(col_sums, row_sums))
        bob.output(ScalarEstimate(0.0 if total == 0 else 1.0), q=q, sampled_items=len(items), empty_sample=True)
        return session.finish()

    level_norms = [int(v) for v in sums_at_bob @ row_sums[index]]
    threshold = params.alpha(log_dim(a, b)) / params.kappa * a.n_rows * b.n_cols
    chosen = select_level(level_norms, threshold)
    u_at_bob = np.zeros(inner, dtype=np.int64)
    u_at_bob[index] = sums_at_bob[chosen]
    max_alice, max_bob, split = _exchange_at_level(alice, bob, chosen, items, u_at_bob, entries, depths)
    estimate = max(max_alice, max_bob) / (q * params.level_prob(chosen))
    bob.output(
        ScalarEstimate(estimate),
        q=q,
        sampled_items=len(items),
        level_norms=level_norms,
        chosen_level=chosen,
        threshold=threshold,
        **split,
    )
    return session.finish()


# ---------- Registered protocols ----------


@pskprotocol(name="linf-2eps", group="psk")
class LinfTwoEpsProtocol(PSKAbstractProtocol):
    statistic = "linf"
    guarantee = "(2+eps)-approximation of ||AB||_inf for binary matrices; 3 rounds"
    requires_binary = True

    def run(
        self, a: SparseIntMatrix, b: SparseIntMatrix, session: ProtocolSession, request: ProtocolRequest
    ) -> EstimateReport:
        return run_linf_2eps(a, b, LinfParams(request.eps, request.constants.c_gamma), session)

    def oracle(self, c: SparseIntMatrix, request: ProtocolRequest) -> float:
        return float(linf_norm(c))

    def within_guarantee(self, report: EstimateReport, oracle: Any, request: ProtocolRequest) -> bool:
        truth = float(oracle)
        if truth == 0:
            return report.value == 0
        ratio = report.value / truth
        return 1.0 / (2.0 * (1.0 + request.eps)) <= ratio <= 1.0 + request.eps


@pskprotocol(name="linf-kappa", group="psk")
class LinfKappaProtocol(PSKAbstractProtocol):
    statistic = "linf"
    guarantee = "kappa-approximation of ||AB||_inf for binary matrices, kappa in [4, n]; at most 3 rounds"
    requires_binary = True

    def run(
        self, a: SparseIntMatrix, b: SparseIntMatrix, session: ProtocolSession, request: ProtocolRequest
    ) -> EstimateReport:
        return run_linf_kappa(a, b, UniverseSampleParams(request.kappa, request.constants.c_alpha), session)

    def oracle(self, c: SparseIntMatrix, request: ProtocolRequest) -> float:
        return float(linf_norm(c))

    def within_guarantee(self, report: EstimateReport, oracle: Any, request: ProtocolRequest) -> bool:
        return ratio_within(report.value, float(oracle), request.kappa)
