"""ℓ_p-(φ, ε)-heavy hitters of ``C = AB``.

``hh-general`` works on nonnegative integer matrices: it learns ``‖C‖_p^p``,
binomially thins the units of ``A``, recovers the thinned product as an
additive split with the index exchange, and thresholds the rescaled entries.

``hh-binary`` samples columns of ``A``, keeps entries of either half of the
split that clear a low bar as candidates, and verifies each candidate on
shared-seed sampled coordinates of its row and column.

In both cases the output ``S`` aims for ``HH_φ ⊆ S ⊆ HH_{φ−ε}``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from psk_core.api import ProtocolRequest, PSKAbstractProtocol, pskprotocol
from psk_core.channel import (
    Endpoint,
    EstimateReport,
    Float64,
    IndexSet,
    ProtocolSession,
    SizedUIntVector,
    SparseRows,
    UIntVector,
)
from psk_core.errors import InvalidInputError
from psk_core.matrix import HeavyHitterSet, IndexPair, SparseIntMatrix, heavy_hitters_exact

from ._common import log_dim, open_endpoints, require_binary, require_p, require_phi_eps
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
from .lp import LpProtocolParams, lp_estimate_rounds

logger = logging.getLogger(__name__)

RECOVERY_LABEL = "index exchange (exact additive split)"
ROUGH_NORM_EPS = 0.5
SMALL_NORM_FACTOR = 100.0
CANDIDATE_DIVISOR = 20.0


@dataclass(frozen=True)
class HeavyHitterBounds:
    """Exact ``HH_φ`` (must be reported) and ``HH_{φ−ε}`` (may be reported)."""

    inner: frozenset[IndexPair]
    outer: frozenset[IndexPair]

    @classmethod
    def of(cls, c: SparseIntMatrix, p: float, phi: float, eps: float) -> "HeavyHitterBounds":
        inner = heavy_hitters_exact(c, p, phi)
        outer_phi = phi - eps
        outer = {pair for pair, _ in c.items()} if outer_phi <= 0 else heavy_hitters_exact(c, p, outer_phi)
        return cls(frozenset(inner), frozenset(outer))

    def contains(self, result: HeavyHitterSet) -> bool:
        return self.inner <= result.pairs <= self.outer

    def __len__(self) -> int:
        return len(self.inner)


@dataclass(frozen=True)
class HHGeneralParams:
    phi: float
    eps: float
    p: float = 1.0
    constant: float = 8.0
    c_rho: float = 8.0
    sketch_constant: float = 6.0
    boost_reps: int = 1

    def __post_init__(self) -> None:
        require_phi_eps(self.phi, self.eps)
        require_p(self.p, allow_zero=False)
        if self.constant <= 0:
            raise InvalidInputError("hh constant must be positive")

    def rate(self, norm: float, log_n: float) -> float:
        """Unit thinning rate; at ``p = 1`` this is ``c ln n / ((ε/φ)²·(φ/8)·‖C‖₁)``."""

        if norm <= 0:
            return 1.0
        units = self.constant * log_n / (self.eps / self.phi) ** 2
        return min(units * (8.0 / (self.phi * norm)) ** (1.0 / self.p), 1.0)

    def alice_cutoff(self, norm: float) -> float:
        return self.eps / 8.0 * norm

    def output_cutoff(self, norm: float) -> float:
        return (self.phi - self.eps / 2.0) * norm

    def norm_params(self) -> LpProtocolParams:
        return LpProtocolParams(
            self.p, self.eps / (4.0 * self.phi), self.c_rho, self.sketch_constant, self.boost_reps
        )


@dataclass(frozen=True)
class HHBinaryParams:
    phi: float
    eps: float
    p: float = 1.0
    constant: float = 8.0
    c_rho: float = 8.0
    sketch_constant: float = 6.0
    boost_reps: int = 1

    def __post_init__(self) -> None:
        require_phi_eps(self.phi, self.eps)
        require_p(self.p, allow_zero=False)
        if self.constant <= 0:
            raise InvalidInputError("hh constant must be positive")

    def alpha(self, log_n: float) -> float:
        return (self.constant * log_n) ** (1.0 / self.p)

    def beta(self, norm: float, log_n: float) -> float:
        """Column sampling rate; 1 when the norm is small enough to skip subsampling."""

        if norm < SMALL_NORM_FACTOR * self.phi * log_n / self.eps**2:
            return 1.0
        rough = norm ** (1.0 / self.p)
        return min(self.alpha(log_n) / (self.phi ** (1.0 / self.p) * rough), 1.0)

    def candidate_cutoff(self, beta: float, norm: float) -> float:
        return beta**self.p * self.phi * norm / CANDIDATE_DIVISOR

    def verify_samples(self, universe: int, log_n: float) -> int:
        return min(math.ceil(self.constant * log_n / (self.eps / self.phi) ** 2), universe)

    def accept_cutoff(self, norm: float) -> float:
        return (self.phi - self.eps / 2.0) * norm

    def norm_params(self) -> LpProtocolParams:
        return LpProtocolParams(self.p, ROUGH_NORM_EPS, self.c_rho, self.sketch_constant, self.boost_reps)


def thin_units(a: SparseIntMatrix, rate: float, rng: np.random.Generator) -> SparseIntMatrix:
    """Keep each unit of each entry independently with probability ``rate``."""

    if not 0 < rate <= 1:
        raise InvalidInputError(f"thinning rate must lie in (0, 1], got {rate}")
    if rate == 1.0 or not a.entries:
        return a
    pairs = list(a.entries)
    kept = rng.binomial(np.fromiter(a.entries.values(), dtype=np.int64, count=len(pairs)), rate)
    return SparseIntMatrix(a.n_rows, a.n_cols, dict(zip(pairs, (int(v) for v in kept))), max_entry=a.max_entry)


def _norm_and_counts(
    alice: Endpoint[SparseIntMatrix], bob: Endpoint[SparseIntMatrix], params: HHGeneralParams | HHBinaryParams
) -> tuple[float, float, np.ndarray]:
    """Opening rounds for ``p ≠ 1``: the sampling estimator, then Bob's estimate and row counts.

    Returns ``(norm at Alice, norm at Bob, v at Alice)``.
    """

    a, b = alice.input, bob.input
    dims = (a.n_rows, a.n_cols, b.n_cols)
    estimate = lp_estimate_rounds(alice, bob, params.norm_params(), dims, label="hh:norm")
    bob.send(Float64(estimate))
    send_counts(bob, b.row_counts())
    norm_at_alice = alice.receive(Float64).value
    return norm_at_alice, estimate, receive_counts(alice, a.n_cols)


# ---------- Integer matrices ----------


def run_hh_general(
    a: SparseIntMatrix, b: SparseIntMatrix, params: HHGeneralParams, session: ProtocolSession
) -> EstimateReport:
    """Four rounds at ``p = 1`` (exact ``‖C‖₁`` from the marginals), six otherwise."""

    alice, bob = open_endpoints(session, a, b)
    inner, shape = a.n_cols, (a.n_rows, b.n_cols)
    log_n = log_dim(a, b)

    norm_at_bob: float | None = None
    if params.p == 1:
        bob.send(SizedUIntVector(bob.input.row_sums()))
        send_counts(bob, bob.input.row_counts())
        row_sums = alice.receive(SizedUIntVector, count=inner).values
        v_at_alice = receive_counts(alice, inner)
        total = int(np.dot(alice.input.col_sums().astype(object), row_sums.astype(object)))
        alice.send(SizedUIntVector(np.array([total], dtype=np.int64)))
        norm_at_alice = float(total)
    else:
        norm_at_alice, norm_at_bob, v_at_alice = _norm_and_counts(alice, bob, params)

    rate = params.rate(norm_at_alice, log_n)
    a_thin = thin_units(alice.input, rate, alice.private_generator())
    u = a_thin.col_counts()
    send_counts(alice, u)
    send_column_lists(alice, a_thin, alice_items(u, v_at_alice), with_values=True)

    if norm_at_bob is None:
        norm_at_bob = float(bob.receive(SizedUIntVector, count=1).values[0])
    u_at_bob = receive_counts(bob, inner)
    v = bob.input.row_counts()
    cols = receive_lists(bob, alice_items(u_at_bob, v), u_at_bob, shape[0], with_values=True)
    c_bob = rank_one_sum(cols, own_rows(bob.input, tuple(cols)), shape)
    send_row_lists(bob, bob.input, bob_items(u_at_bob, v), with_values=True)

    rows = receive_lists(alice, bob_items(u, v_at_alice), v_at_alice, shape[1], with_values=True)
    c_alice = rank_one_sum(own_columns(a_thin, tuple(rows)), rows, shape)
    cutoff = params.alice_cutoff(norm_at_alice)
    shipped: dict[int, dict[int, int]] = {}
    for (i, j), value in c_alice.items():
        if (value / rate) ** params.p > cutoff:
            shipped.setdefault(i, {})[j] = value
    alice.send(SparseRows(shipped))

    received = bob.receive(SparseRows).rows
    c_prime = SparseIntMatrix.from_rows(shape[0], shape[1], received) + c_bob
    rate_at_bob = params.rate(norm_at_bob, log_n)
    threshold = params.output_cutoff(norm_at_bob)
    pairs = frozenset(pair for pair, value in c_prime.items() if (value / rate_at_bob) ** params.p >= threshold)
    shipped_count = sum(len(row) for row in received.values())
    logger.debug("hh-general: rate=%.4g shipped=%d reported=%d", rate_at_bob, shipped_count, len(pairs))
    bob.output(
        HeavyHitterSet(pairs, params.phi, params.eps),
        norm=norm_at_bob,
        rate=rate_at_bob,
        shipped=shipped_count,
        recovery=RECOVERY_LABEL,
    )
    return session.finish()


# ---------- Binary matrices ----------


def _flatten(pairs: set[IndexPair], n_cols: int) -> tuple[int, ...]:
    return tuple(sorted(i * n_cols + j for i, j in pairs))


def _candidates(c: SparseIntMatrix, p: float, cutoff: float) -> set[IndexPair]:
    return {pair for pair, value in c.items() if float(value) ** p >= cutoff}


def run_hh_binary(
    a: SparseIntMatrix, b: SparseIntMatrix, params: HHBinaryParams, session: ProtocolSession
) -> EstimateReport:
    """Rough norm, column sampling with the index exchange, then candidate verification.

    Five rounds at ``p = 1`` (the norm comes exactly from the marginals), six otherwise.
    """

    require_binary(a, b, "hh-binary")
    alice, bob = open_endpoints(session, a, b)
    inner, shape = a.n_cols, (a.n_rows, b.n_cols)
    log_n = log_dim(a, b)
    v = bob.input.row_counts()

    if params.p == 1:
        alice.send(SizedUIntVector(alice.input.col_sums()))
        col_sums = bob.receive(SizedUIntVector, count=inner).values
        norm_at_bob = float(np.dot(col_sums, bob.input.row_sums()))
        bob.send(SizedUIntVector(np.array([int(norm_at_bob)], dtype=np.int64)))
        send_counts(bob, v)
        norm_at_alice = float(alice.receive(SizedUIntVector, count=1).values[0])
        v_at_alice = receive_counts(alice, inner)
    else:
        norm_at_alice, norm_at_bob, v_at_alice = _norm_and_counts(alice, bob, params)

    beta = params.beta(norm_at_alice, log_n)
    if beta < 1:
        keep = alice.private_generator().random(inner) < beta
        a_sampled = alice.input.keep_cols(int(j) for j in np.flatnonzero(keep))
    else:
        a_sampled = alice.input
    u = a_sampled.col_counts()
    send_counts(alice, u)
    send_column_lists(alice, a_sampled, alice_items(u, v_at_alice), with_values=False)

    beta_at_bob = params.beta(norm_at_bob, log_n)
    cutoff_at_bob = params.candidate_cutoff(beta_at_bob, norm_at_bob)
    u_at_bob = receive_counts(bob, inner)
    cols = receive_lists(bob, alice_items(u_at_bob, v), u_at_bob, shape[0], with_values=False)
    c_bob = rank_one_sum(cols, own_rows(bob.input, tuple(cols)), shape)
    bob_candidates = _candidates(c_bob, params.p, cutoff_at_bob)
    send_row_lists(bob, bob.input, bob_items(u_at_bob, v), with_values=False)
    bob.send(IndexSet(_flatten(bob_candidates, shape[1])))

    rows = receive_lists(alice, bob_items(u, v_at_alice), v_at_alice, shape[1], with_values=False)
    c_alice = rank_one_sum(own_columns(a_sampled, tuple(rows)), rows, shape)
    from_bob = {divmod(index, shape[1]) for index in alice.receive(IndexSet).indices}
    extra = _candidates(c_alice, params.p, params.candidate_cutoff(beta, norm_at_alice)) - from_bob
    candidates = sorted(from_bob | extra)
    samples = params.verify_samples(inner, log_n)
    coords = _verify_coordinates(alice, inner, samples)
    bits = [alice.input.get(i, k) for i, _ in candidates for k in coords]
    alice.send(IndexSet(_flatten(extra, shape[1])))
    alice.send(UIntVector(np.array(bits, dtype=np.int64), 1))

    added = {divmod(index, shape[1]) for index in bob.receive(IndexSet).indices}
    verified = sorted(bob_candidates | added)
    bob_coords = _verify_coordinates(bob, inner, samples)
    row_bits = bob.receive(UIntVector, count=len(verified) * len(bob_coords), width=1).values
    row_bits = row_bits.reshape(len(verified), len(bob_coords))
    scale = inner / len(bob_coords)
    accept = params.accept_cutoff(norm_at_bob)
    pairs: set[IndexPair] = set()
    for position, (i, j) in enumerate(verified):
        column = np.array([bob.input.get(k, j) for k in bob_coords], dtype=np.int64)
        estimate = float(np.dot(row_bits[position], column)) * scale
        if estimate**params.p >= accept:
            pairs.add((i, j))
    logger.debug("hh-binary: beta=%.4g candidates=%d reported=%d", beta_at_bob, len(verified), len(pairs))
    bob.output(
        HeavyHitterSet(frozenset(pairs), params.phi, params.eps),
        norm=norm_at_bob,
        beta=beta_at_bob,
        candidates=len(verified),
        verify_samples=len(bob_coords),
        recovery=RECOVERY_LABEL,
    )
    return session.finish()


def _verify_coordinates(endpoint: Endpoint[SparseIntMatrix], universe: int, samples: int) -> list[int]:
    """Shared sampled coordinates; every coordinate once the sample covers the universe."""

    if samples >= universe:
        return list(range(universe))
    rng = endpoint.shared_generator("hh-binary:verify")
    return sorted(int(k) for k in rng.choice(universe, size=samples, replace=False))


# ---------- Registered protocols ----------


class _HeavyHitterProtocol(PSKAbstractProtocol):
    statistic = "hh"

    def oracle(self, c: SparseIntMatrix, request: ProtocolRequest) -> HeavyHitterBounds:
        return HeavyHitterBounds.of(c, request.p, request.phi, request.eps)

    def within_guarantee(self, report: EstimateReport, oracle: Any, request: ProtocolRequest) -> bool:
        if not isinstance(report.result, HeavyHitterSet):
            return False
        return oracle.contains(report.result)


@pskprotocol(name="hh-general", group="psk")
class HHGeneralProtocol(_HeavyHitterProtocol):
    guarantee = "HH_phi <= S <= HH_(phi-eps) for integer matrices, p in (0, 2]; at most 6 rounds"

    def run(
        self, a: SparseIntMatrix, b: SparseIntMatrix, session: ProtocolSession, request: ProtocolRequest
    ) -> EstimateReport:
        constants = request.constants
        params = HHGeneralParams(
            request.phi,
            request.eps,
            request.p,
            constants.hh_constant,
            constants.c_rho,
            constants.sketch_constant,
            request.boost_reps,
        )
        return run_hh_general(a, b, params, session)


@pskprotocol(name="hh-binary", group="psk")
class HHBinaryProtocol(_HeavyHitterProtocol):
    guarantee = "HH_phi <= S <= HH_(phi-eps) for binary matrices, p in (0, 2]; at most 6 rounds"
    requires_binary = True

    def run(
        self, a: SparseIntMatrix, b: SparseIntMatrix, session: ProtocolSession, request: ProtocolRequest
    ) -> EstimateReport:
        constants = request.constants
        params = HHBinaryParams(
            request.phi,
            request.eps,
            request.p,
            constants.hh_constant,
            constants.c_rho,
            constants.sketch_constant,
            request.boost_reps,
        )
        return run_hh_binary(a, b, params, session)
