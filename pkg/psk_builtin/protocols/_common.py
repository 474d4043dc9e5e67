"""Validation and endpoint helpers shared by the protocols."""

from __future__ import annotations

import math

import numpy as np

from psk_core.channel import Endpoint, Party, ProtocolSession
from psk_core.errors import InvalidInputError
from psk_core.matrix import SparseIntMatrix

SEED_LABEL_BOUND = 2**63


def require_product(a: SparseIntMatrix, b: SparseIntMatrix) -> None:
    if a.n_cols != b.n_rows:
        raise InvalidInputError(f"cannot multiply {a.n_rows}x{a.n_cols} by {b.n_rows}x{b.n_cols}")


def require_binary(a: SparseIntMatrix, b: SparseIntMatrix, protocol: str) -> None:
    if not (a.is_binary and b.is_binary):
        raise InvalidInputError(f"{protocol} requires binary matrices")


def require_eps(eps: float) -> None:
    if not 0 < eps < 1:
        raise InvalidInputError(f"eps must lie in (0, 1), got {eps}")


def require_p(p: float, *, allow_zero: bool = True) -> None:
    low_ok = p >= 0 if allow_zero else p > 0
    if not (low_ok and p <= 2):
        raise InvalidInputError(f"p must lie in {'[0, 2]' if allow_zero else '(0, 2]'}, got {p}")


def require_phi_eps(phi: float, eps: float) -> None:
    if not 0 < eps <= phi <= 1:
        raise InvalidInputError(f"need 0 < eps <= phi <= 1, got eps={eps} phi={phi}")


def log_dim(a: SparseIntMatrix, b: SparseIntMatrix) -> float:
    """Natural log of the largest dimension, floored at ``ln 2``."""

    return math.log(max(a.n_rows, a.n_cols, b.n_cols, 2))


def open_endpoints(
    session: ProtocolSession, a: SparseIntMatrix, b: SparseIntMatrix
) -> tuple[Endpoint[SparseIntMatrix], Endpoint[SparseIntMatrix]]:
    require_product(a, b)
    return session.endpoint(Party.ALICE, a), session.endpoint(Party.BOB, b)


def shared_seed(endpoint: Endpoint[SparseIntMatrix], label: str) -> int:
    """Seed both parties derive identically from the shared randomness."""

    return int(endpoint.shared_generator(label).integers(0, SEED_LABEL_BOUND, dtype=np.int64))


def ratio_within(estimate: float, truth: float, factor: float) -> bool:
    """``estimate ∈ [truth / factor, truth · factor]``; exact zero is required for a zero truth."""

    if truth == 0:
        return estimate == 0
    ratio = estimate / truth
    return 1.0 / factor <= ratio <= factor
