"""One-round κ-approximation of ``‖AB‖∞`` for general nonnegative integer matrices.

Alice sends ``S·A`` for a shared blocked ℓ₂ sketch ``S`` over the rows of
``A``. Bob forms ``S·A·B = S·C`` exactly and takes the largest per-column ℓ∞
estimate. Each estimate is a block ℓ₂ norm, so it overshoots ``‖C‖∞`` by at
most ``κ`` and never undershoots it beyond the sketch error.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

from psk_core.api import ProtocolRequest, PSKAbstractProtocol, pskprotocol
from psk_core.channel import EstimateReport, ProtocolSession, ScalarEstimate, SignedIntMatrix
from psk_core.errors import InvalidInputError
from psk_core.matrix import SparseIntMatrix, linf_norm

from ..sketches import BlockedL2Sketch, exact_matmul
from ._common import open_endpoints, shared_seed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneralLinfParams:
    kappa: float
    group_size: int = 6

    def __post_init__(self) -> None:
        if self.kappa < 1:
            raise InvalidInputError(f"kappa must be at least 1, got {self.kappa}")


def run_linf_general(
    a: SparseIntMatrix, b: SparseIntMatrix, params: GeneralLinfParams, session: ProtocolSession
) -> EstimateReport:
    if params.kappa > max(a.n_rows, a.n_cols, b.n_cols):
        raise InvalidInputError(f"kappa {params.kappa} exceeds the matrix dimension")
    alice, bob = open_endpoints(session, a, b)

    rows, kappa, group = a.n_rows, params.kappa, params.group_size
    sketch = BlockedL2Sketch.for_dimension(rows, kappa, shared_seed(alice, "linf-general"), group)
    alice.send(SignedIntMatrix(sketch.apply_columns(alice.input.to_dense())))

    bob_sketch = BlockedL2Sketch.for_dimension(rows, kappa, shared_seed(bob, "linf-general"), group)
    sketched_a = bob.receive(SignedIntMatrix, shape=(bob_sketch.sketch_rows, b.n_rows)).values
    sketched_c = exact_matmul(sketched_a, bob.input.to_dense())
    estimate = float(bob_sketch.estimate_values(sketched_c).max())
    logger.debug("linf-general: %d sketch rows over %d blocks", bob_sketch.sketch_rows, bob_sketch.block_count)
    bob.output(
        ScalarEstimate(estimate),
        block_size=bob_sketch.block_size,
        blocks=bob_sketch.block_count,
        sketch_rows=bob_sketch.sketch_rows,
    )
    return session.finish()


@pskprotocol(name="linf-general", group="psk")
class LinfGeneralProtocol(PSKAbstractProtocol):
    statistic = "linf"
    guarantee = "kappa-approximation of ||AB||_inf for integer matrices, factor 2kappa with sketch error; 1 round"

    def run(
        self, a: SparseIntMatrix, b: SparseIntMatrix, session: ProtocolSession, request: ProtocolRequest
    ) -> EstimateReport:
        params = GeneralLinfParams(request.kappa, request.constants.blocked_group_size)
        return run_linf_general(a, b, params, session)

    def oracle(self, c: SparseIntMatrix, request: ProtocolRequest) -> float:
        return float(linf_norm(c))

    def within_guarantee(self, report: EstimateReport, oracle: Any, request: ProtocolRequest) -> bool:
        truth = float(oracle)
        if truth == 0:
            return report.value == 0
        # block ℓ2 lies in [‖·‖∞, κ‖·‖∞]; the sketch adds a factor of 2 either way
        window = 2.0 * request.kappa
        return truth / window <= report.value <= truth * window
