"""ℓ_p estimation and sampling protocols for ``C = A·B``.

* ``lp``: two-round (1+ε)-estimate of ``‖C‖_p^p``. Bob ships a β-accurate
  sketch ``S·Bᵀ``; Alice sketches every row of ``C`` through it, buckets rows
  by estimated norm on a ``(1+β)`` scale and samples whole rows of ``A``; Bob
  rebuilds the sampled rows of ``C`` exactly and reweights them.
* ``lp-baseline``: one round, Bob ships an ε-accurate sketch and Alice sums
  the per-row estimates.
* ``l1-exact`` and ``l1-sample``: one round from column sums of ``A``.
* ``l0-sample``: one round of per-column ℓ₀ sketches and sampler states of ``A``
  that Bob pushes through ``B``; a failed sampler costs two rounds per retry.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Sequence

import numpy as np

from psk_core.api import ProtocolRequest, PSKAbstractProtocol, pskprotocol
from psk_core.channel import (
    Endpoint,
    EstimateReport,
    PairSample,
    ProbabilityVector,
    ProtocolSession,
    QuantizedMatrix,
    SampleStatus,
    ScalarEstimate,
    SizedUIntVector,
    SparseRows,
    UInt,
    UIntVector,
    index_width,
)
from psk_core.errors import InvalidInputError, ProtocolViolationError
from psk_core.matrix import SparseIntMatrix, lp_norm_pow, multiply
from psk_builtin.sketches import (
    MERSENNE_31,
    L0Sampler,
    L0SamplerSpec,
    L0SamplerState,
    LpSketch,
    LpSketchSpec,
    derive_seed,
    exact_matmul,
    modmatmul,
)
from psk_builtin.sketches.l0 import DEFAULT_RETRIES, FINGERPRINT_BITS

from ._common import open_endpoints, ratio_within, require_eps, require_p, shared_seed

logger = logging.getLogger(__name__)

CODE_BITS = 16
CODE_OFFSET = 1 << (CODE_BITS - 1)
RESIDUE_BITS = 31
RETRY_BITS = 2


@dataclass(frozen=True)
class LpProtocolParams:
    p: float
    eps: float
    c_rho: float = 8.0
    sketch_constant: float = 6.0
    boost_reps: int = 1

    def __post_init__(self) -> None:
        require_p(self.p)
        require_eps(self.eps)
        if self.c_rho <= 0:
            raise InvalidInputError("c_rho must be positive")
        if self.boost_reps < 1 or self.boost_reps % 2 == 0:
            raise InvalidInputError(f"boost_reps must be a positive odd integer, got {self.boost_reps}")

    @classmethod
    def from_request(cls, request: ProtocolRequest) -> "LpProtocolParams":
        return cls(
            p=request.p,
            eps=request.eps,
            c_rho=request.constants.c_rho,
            sketch_constant=request.constants.sketch_constant,
            boost_reps=request.boost_reps,
        )

    @property
    def beta(self) -> float:
        return math.sqrt(self.eps)

    @property
    def rho(self) -> float:
        return self.c_rho / self.eps

    def group_count_bound(self, n: int) -> int:
        """``L = ⌈log_{1+β}(2 n^{p+1})⌉``, kept as a sanity bound on distinct groups."""

        return max(1, math.ceil(math.log(2 * max(n, 2) ** (self.p + 1)) / math.log1p(self.beta)))


# ---------- Row groups ----------


def group_index(value: float, beta: float) -> int:
    """Signed ``ℓ`` with ``(1+β)^ℓ ≤ value < (1+β)^{ℓ+1}``."""

    base = 1.0 + beta
    level = math.floor(math.log(value) / math.log(base))
    while base**level > value:
        level -= 1
    while base ** (level + 1) <= value:
        level += 1
    return level


@dataclass(frozen=True)
class RowGroupTable:
    """Rows bucketed by estimated norm with one sampling probability per bucket."""

    beta: float
    row_groups: Mapping[int, int]
    groups: Mapping[int, tuple[int, ...]]
    group_norms: Mapping[int, float]
    probabilities: Mapping[int, float]
    total: float
    estimates: Mapping[int, float] = field(default_factory=dict)

    def probability(self, row: int) -> float:
        return self.probabilities[self.row_groups[row]]

    def row_probabilities(self) -> dict[int, float]:
        return {row: self.probabilities[level] for row, level in self.row_groups.items()}

    def codes(self, n_rows: int) -> np.ndarray:
        """16-bit code per row: 0 for rows outside every group, else ``ℓ + 2^15``."""

        codes = np.zeros(n_rows, dtype=np.int64)
        for row, level in self.row_groups.items():
            codes[row] = level + CODE_OFFSET
        return codes

    def ordered_probabilities(self) -> tuple[float, ...]:
        return tuple(self.probabilities[level] for level in sorted(self.groups))


def build_row_groups(estimates: Sequence[float], beta: float, rho: float) -> RowGroupTable:
    """Bucket rows with positive estimate and set ``p_ℓ = min(1, ρ/|G_ℓ| · G̃_ℓ/C̃)``.

    Probabilities are rounded up to their 32-bit wire value so sampling and
    reweighting use the same number.
    """

    limit = CODE_OFFSET - 1
    row_groups: dict[int, int] = {}
    members: dict[int, list[int]] = {}
    kept: dict[int, float] = {}
    for row, estimate in enumerate(estimates):
        value = float(estimate)
        if not value > 0:
            continue
        level = max(-limit, min(limit, group_index(value, beta)))
        row_groups[row] = level
        members.setdefault(level, []).append(row)
        kept[row] = value
    total = math.fsum(kept.values())
    group_norms = {level: math.fsum(kept[row] for row in rows) for level, rows in members.items()}
    probabilities = {
        level: ProbabilityVector.quantize(min(1.0, rho / len(members[level]) * group_norms[level] / total))
        for level in members
    }
    return RowGroupTable(
        beta=beta,
        row_groups=row_groups,
        groups={level: tuple(rows) for level, rows in members.items()},
        group_norms=group_norms,
        probabilities=probabilities,
        total=total,
        estimates=kept,
    )


def sample_rows(table: RowGroupTable, rng: np.random.Generator) -> tuple[int, ...]:
    """Keep each grouped row independently with its group's probability."""

    rows = sorted(table.row_groups)
    if not rows:
        return ()
    draws = rng.random(len(rows))
    return tuple(row for row, draw in zip(rows, draws) if draw < table.probability(row))


def aggregate_sampled_rows(probabilities: Mapping[int, float], row_norms: Mapping[int, float]) -> float:
    """``Σ_i ‖C'_i‖_p^p / p_i`` over the sampled rows."""

    return math.fsum(norm / probabilities[row] for row, norm in row_norms.items())


def row_norm_pows(c: SparseIntMatrix, p: float) -> dict[int, float]:
    norms: dict[int, float] = {}
    for i in c.nonzero_rows():
        values = c.row(i).values()
        if p == 0:
            norms[i] = float(len(values))
        elif p == 1:
            norms[i] = float(sum(values))
        else:
            norms[i] = math.fsum(float(v) ** p for v in values)
    return norms


# ---------- Row-sampling estimator ----------


def _row_sketch_spec(
    endpoint: Endpoint[SparseIntMatrix], label: str, p: float, eps: float, dims: tuple[int, int, int], constant: float
) -> LpSketchSpec:
    m1, _, m2 = dims
    return LpSketchSpec(
        p=p,
        eps=eps,
        delta=1.0 / (10 * max(m1, 1)),
        input_dim=m2,
        seed=shared_seed(endpoint, label),
        constant=constant,
    )


def _send_transposed_sketch(bob: Endpoint[SparseIntMatrix], spec: LpSketchSpec) -> None:
    sketched = LpSketch(spec).apply_columns(bob.input.to_dense().T)
    if spec.p == 0:
        bob.send(UIntVector(sketched.ravel(), RESIDUE_BITS))
    else:
        bob.send(QuantizedMatrix(sketched))


def _receive_row_estimates(alice: Endpoint[SparseIntMatrix], spec: LpSketchSpec) -> np.ndarray:
    """Estimates of ``‖C_i‖_p^p`` for every row, computed from the received ``S·Bᵀ``."""

    sketch = LpSketch(spec)
    inner = alice.input.n_cols
    a_t = alice.input.to_dense().T
    if spec.p == 0:
        flat = alice.receive(UIntVector, count=spec.sketch_rows * inner, width=RESIDUE_BITS).values
        coords = modmatmul(flat.reshape(spec.sketch_rows, inner), a_t, MERSENNE_31)
    else:
        sbt = alice.receive(QuantizedMatrix, shape=(spec.sketch_rows, inner)).values
        coords = exact_matmul(sbt, a_t)
    return sketch.estimate_values(coords)


def lp_estimate_rounds(
    alice: Endpoint[SparseIntMatrix],
    bob: Endpoint[SparseIntMatrix],
    params: LpProtocolParams,
    dims: tuple[int, int, int],
    *,
    label: str = "lp",
) -> float:
    """Run the two rounds of the sampling estimator and return Bob's (median) estimate.

    Repetitions for median boosting share the two rounds.
    """

    reps = params.boost_reps
    for rep in range(reps):
        spec = _row_sketch_spec(bob, f"{label}:sketch:{rep}", params.p, params.beta, dims, params.sketch_constant)
        _send_transposed_sketch(bob, spec)

    sampled_counts: list[int] = []
    for rep in range(reps):
        spec = _row_sketch_spec(alice, f"{label}:sketch:{rep}", params.p, params.beta, dims, params.sketch_constant)
        estimates = _receive_row_estimates(alice, spec)
        table = build_row_groups(estimates, params.beta, params.rho)
        sampled = sample_rows(table, alice.private_generator())
        sampled_counts.append(len(sampled))
        alice.send(UIntVector(table.codes(dims[0]), CODE_BITS))
        alice.send(ProbabilityVector(table.ordered_probabilities()))
        alice.send(SparseRows({row: alice.input.row(row) for row in sampled}))
        if len(table.groups) > params.group_count_bound(max(dims)):
            logger.warning("row groups %d exceed the bound %d", len(table.groups), params.group_count_bound(max(dims)))

    values: list[float] = []
    group_counts: list[int] = []
    for _ in range(reps):
        probabilities, groups = _receive_group_table(bob, dims[0])
        rows = bob.receive(SparseRows).rows
        unknown = [row for row in rows if row not in probabilities]
        if unknown:
            raise ProtocolViolationError(f"sampled rows {unknown[:5]} carry no group")
        a_prime = SparseIntMatrix.from_rows(dims[0], dims[1], rows)
        norms = row_norm_pows(multiply(a_prime, bob.input), params.p)
        values.append(aggregate_sampled_rows(probabilities, norms))
        group_counts.append(groups)

    bob.note("sampled_rows", sampled_counts)
    bob.note("groups", group_counts)
    bob.note("beta", params.beta)
    bob.note("rho", params.rho)
    return float(np.median(values))


def _receive_group_table(bob: Endpoint[SparseIntMatrix], n_rows: int) -> tuple[dict[int, float], int]:
    codes = bob.receive(UIntVector, count=n_rows, width=CODE_BITS).values
    levels = sorted({int(code) for code in codes if code})
    probabilities = bob.receive(ProbabilityVector, count=len(levels)).values
    by_code = dict(zip(levels, probabilities))
    return {row: by_code[int(code)] for row, code in enumerate(codes) if code}, len(levels)


def run_lp_estimate(
    a: SparseIntMatrix, b: SparseIntMatrix, params: LpProtocolParams, session: ProtocolSession
) -> EstimateReport:
    alice, bob = open_endpoints(session, a, b)
    estimate = lp_estimate_rounds(alice, bob, params, (a.n_rows, a.n_cols, b.n_cols))
    bob.output(ScalarEstimate(estimate), p=params.p, eps=params.eps, boost_reps=params.boost_reps)
    return session.finish()


def run_lp_baseline(
    a: SparseIntMatrix, b: SparseIntMatrix, params: LpProtocolParams, session: ProtocolSession
) -> EstimateReport:
    """One round: Bob ships an ε-accurate ``S·Bᵀ`` and Alice sums her per-row estimates."""

    alice, bob = open_endpoints(session, a, b)
    dims = (a.n_rows, a.n_cols, b.n_cols)
    spec = _row_sketch_spec(bob, "lp-baseline:sketch", params.p, params.eps, dims, params.sketch_constant)
    _send_transposed_sketch(bob, spec)
    spec = _row_sketch_spec(alice, "lp-baseline:sketch", params.p, params.eps, dims, params.sketch_constant)
    estimates = _receive_row_estimates(alice, spec)
    alice.output(ScalarEstimate(math.fsum(float(v) for v in estimates)), sketch_rows=spec.sketch_rows)
    return session.finish()


# ---------- ℓ₁ ----------


def run_l1_exact(a: SparseIntMatrix, b: SparseIntMatrix, session: ProtocolSession) -> EstimateReport:
    """``‖AB‖₁ = Σ_j ‖A_{*,j}‖₁·‖B_{j,*}‖₁`` from Alice's column sums, one round."""

    alice, bob = open_endpoints(session, a, b)
    alice.send(SizedUIntVector(alice.input.col_sums()))
    col_sums = bob.receive(SizedUIntVector, count=bob.input.n_rows).values
    total = sum(int(x) * int(y) for x, y in zip(col_sums, bob.input.row_sums()))
    bob.output(ScalarEstimate(float(total)), exact=total)
    return session.finish()


def run_l1_sample(a: SparseIntMatrix, b: SparseIntMatrix, session: ProtocolSession) -> EstimateReport:
    """Sample ``(i, j)`` with probability ``C_ij / ‖C‖₁`` in one round.

    Alice sends each column sum of ``A`` and one row drawn from that column in
    proportion to its entries; Bob draws the inner index ``k`` in proportion to
    ``‖A_{*,k}‖₁·‖B_{k,*}‖₁`` and then a column from row ``k`` of ``B``.
    """

    alice, bob = open_endpoints(session, a, b)
    rng = alice.private_generator()
    width = index_width(alice.input.n_rows)
    picks = np.zeros(alice.input.n_cols, dtype=np.int64)
    for k in alice.input.nonzero_cols():
        column = alice.input.col(k)
        rows = sorted(column)
        weights = np.array([column[row] for row in rows], dtype=np.float64)
        picks[k] = rows[int(rng.choice(len(rows), p=weights / weights.sum()))]
    alice.send(SizedUIntVector(alice.input.col_sums()))
    alice.send(UIntVector(picks, width))

    inner = bob.input.n_rows
    col_sums = bob.receive(SizedUIntVector, count=inner).values
    row_picks = bob.receive(UIntVector, count=inner, width=width).values
    mass = np.array([int(x) * int(y) for x, y in zip(col_sums, bob.input.row_sums())], dtype=np.float64)
    if mass.sum() == 0:
        bob.output(PairSample.empty())
        return session.finish()
    rng = bob.private_generator()
    k = int(rng.choice(inner, p=mass / mass.sum()))
    row = bob.input.row(k)
    cols = sorted(row)
    weights = np.array([row[col] for col in cols], dtype=np.float64)
    j = cols[int(rng.choice(len(cols), p=weights / weights.sum()))]
    bob.output(PairSample.ok(int(row_picks[k]), j), witness=k)
    return session.finish()


# ---------- ℓ₀ sampling ----------


def _send_sampler_states(alice: Endpoint[SparseIntMatrix], spec: L0SamplerSpec, dense_a: np.ndarray) -> None:
    states = L0Sampler(spec).apply_columns(dense_a)
    alice.send(SizedUIntVector(np.asarray(states.counts, dtype=object).ravel()))
    alice.send(SizedUIntVector(np.asarray(states.weighted, dtype=object).ravel()))
    alice.send(UIntVector(np.asarray(states.fingerprints, dtype=object).ravel(), FINGERPRINT_BITS))


def _receive_sampler_states(bob: Endpoint[SparseIntMatrix], spec: L0SamplerSpec, inner: int) -> L0SamplerState:
    shape = (spec.reps, spec.levels, inner)
    size = int(np.prod(shape))
    counts = bob.receive(SizedUIntVector, count=size).values.reshape(shape)
    weighted = bob.receive(SizedUIntVector, count=size).values.reshape(shape)
    fingerprints = bob.receive(UIntVector, count=size, width=FINGERPRINT_BITS).values.reshape(shape)
    return L0SamplerState(spec, counts, weighted, fingerprints)


def run_l0_sample_matrix(
    a: SparseIntMatrix,
    b: SparseIntMatrix,
    eps: float,
    session: ProtocolSession,
    *,
    sketch_constant: float = 6.0,
    repetitions: int = 0,
    retries: int = DEFAULT_RETRIES,
) -> EstimateReport:
    """Sample a nonzero of ``C`` with probability ``(1±ε)/‖C‖₀``, one round unless the sampler fails.

    Bob picks column ``j`` of ``C`` in proportion to its estimated support and
    runs the ℓ₀-sampler on it; both per-column structures are linear, so
    Alice's column states of ``A`` combined with weights ``B_{*,j}`` give the
    states of ``C_{*,j}``. On a sampler ``FAIL`` Bob asks for fresh states
    under a derived seed, at most ``retries`` times and two rounds each.
    """

    require_eps(eps)
    alice, bob = open_endpoints(session, a, b)
    m1, inner = a.n_rows, a.n_cols

    def specs(endpoint: Endpoint[SparseIntMatrix]) -> tuple[LpSketchSpec, L0SamplerSpec]:
        delta = 1.0 / (10 * max(b.n_cols, 1))
        sketch = LpSketchSpec(0, eps, delta, m1, shared_seed(endpoint, "l0:sketch"), sketch_constant)
        sampler = L0SamplerSpec(m1, shared_seed(endpoint, "l0:sampler"), repetitions)
        return sketch, sampler

    sketch_spec, alice_sampler = specs(alice)
    dense_a = alice.input.to_dense()
    alice.send(UIntVector(LpSketch(sketch_spec).apply_columns(dense_a).ravel(), RESIDUE_BITS))
    _send_sampler_states(alice, alice_sampler, dense_a)

    sketch_spec, sampler_spec = specs(bob)
    residues = bob.receive(UIntVector, count=sketch_spec.sketch_rows * inner, width=RESIDUE_BITS).values
    batch = _receive_sampler_states(bob, sampler_spec, inner)

    dense_b = bob.input.to_dense()
    coords = modmatmul(residues.reshape(sketch_spec.sketch_rows, inner), dense_b, MERSENNE_31)
    supports = np.maximum(LpSketch(sketch_spec).estimate_values(coords), 0.0)
    if supports.sum() <= 0:
        bob.output(PairSample.empty())
        return session.finish()
    rng = bob.private_generator()
    j = int(rng.choice(bob.input.n_cols, p=supports / supports.sum()))
    outcome = batch.combine(dense_b[:, j]).sample(L0Sampler(sampler_spec))

    attempt = 0
    while outcome.status is SampleStatus.FAIL and attempt < retries:
        attempt += 1
        logger.debug("l0 sampler failed on column %d, retry %d", j, attempt)
        bob.send(UInt(attempt, RETRY_BITS))
        fresh = alice.receive(UInt, width=RETRY_BITS).value
        _send_sampler_states(alice, replace(alice_sampler, seed=derive_seed(alice_sampler.seed, fresh)), dense_a)
        sampler_spec = replace(sampler_spec, seed=derive_seed(sampler_spec.seed, attempt))
        batch = _receive_sampler_states(bob, sampler_spec, inner)
        outcome = batch.combine(dense_b[:, j]).sample(L0Sampler(sampler_spec))

    if outcome.status is SampleStatus.OK and outcome.index is not None:
        bob.output(PairSample.ok(outcome.index, j), column_support_estimate=float(supports[j]), retries=attempt)
    else:
        logger.warning("l0 sampler failed on column %d after %d retries", j, attempt)
        bob.output(PairSample.failed(), column=j, retries=attempt)
    return session.finish()


# ---------- Registered protocols ----------


def _support(c: SparseIntMatrix) -> frozenset[tuple[int, int]]:
    return frozenset(pair for pair, _ in c.items())


def _sample_within(report: EstimateReport, support: Any) -> bool:
    result = report.result
    if not isinstance(result, PairSample):
        return False
    if result.status is SampleStatus.EMPTY:
        return not support
    return result.status is SampleStatus.OK and result.pair in support


@pskprotocol(name="lp", group="psk")
class LpEstimateProtocol(PSKAbstractProtocol):
    statistic = "lp"
    guarantee = "(1+eps)-approximation of ||AB||_p^p for p in [0, 2]; 2 rounds"

    def run(
        self, a: SparseIntMatrix, b: SparseIntMatrix, session: ProtocolSession, request: ProtocolRequest
    ) -> EstimateReport:
        return run_lp_estimate(a, b, LpProtocolParams.from_request(request), session)

    def oracle(self, c: SparseIntMatrix, request: ProtocolRequest) -> float:
        return lp_norm_pow(c, request.p)

    def within_guarantee(self, report: EstimateReport, oracle: Any, request: ProtocolRequest) -> bool:
        return ratio_within(report.value, float(oracle), 1.0 + request.eps)


@pskprotocol(name="lp-baseline", group="psk")
class LpBaselineProtocol(LpEstimateProtocol):
    guarantee = "(1+eps)-approximation of ||AB||_p^p from per-row eps-accurate sketches; 1 round"

    def run(
        self, a: SparseIntMatrix, b: SparseIntMatrix, session: ProtocolSession, request: ProtocolRequest
    ) -> EstimateReport:
        return run_lp_baseline(a, b, LpProtocolParams.from_request(request), session)


@pskprotocol(name="l1-exact", group="psk")
class L1ExactProtocol(PSKAbstractProtocol):
    statistic = "l1"
    guarantee = "exact ||AB||_1 for nonnegative matrices; 1 round"

    def run(
        self, a: SparseIntMatrix, b: SparseIntMatrix, session: ProtocolSession, request: ProtocolRequest
    ) -> EstimateReport:
        return run_l1_exact(a, b, session)

    def oracle(self, c: SparseIntMatrix, request: ProtocolRequest) -> float:
        return lp_norm_pow(c, 1)

    def within_guarantee(self, report: EstimateReport, oracle: Any, request: ProtocolRequest) -> bool:
        return report.value == float(oracle)


@pskprotocol(name="l1-sample", group="psk")
class L1SampleProtocol(PSKAbstractProtocol):
    statistic = "sample"
    guarantee = "entry (i, j) of AB drawn with probability C_ij/||C||_1; 1 round"

    def run(
        self, a: SparseIntMatrix, b: SparseIntMatrix, session: ProtocolSession, request: ProtocolRequest
    ) -> EstimateReport:
        return run_l1_sample(a, b, session)

    def oracle(self, c: SparseIntMatrix, request: ProtocolRequest) -> frozenset[tuple[int, int]]:
        return _support(c)

    def within_guarantee(self, report: EstimateReport, oracle: Any, request: ProtocolRequest) -> bool:
        return _sample_within(report, oracle)


@pskprotocol(name="l0-sample", group="psk")
class L0SampleProtocol(L1SampleProtocol):
    guarantee = "nonzero of AB drawn with probability (1+-eps)/||C||_0; 1 round, 2 more per sampler retry"

    def run(
        self, a: SparseIntMatrix, b: SparseIntMatrix, session: ProtocolSession, request: ProtocolRequest
    ) -> EstimateReport:
        return run_l0_sample_matrix(
            a,
            b,
            request.eps,
            session,
            sketch_constant=request.constants.sketch_constant,
            repetitions=request.constants.sampler_repetitions,
        )
