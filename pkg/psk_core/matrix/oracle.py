"""Exact brute-force oracles for every statistic a protocol estimates.

These are deliberately simple and may be slow; protocols are scored against them.
"""

from __future__ import annotations

import math

from psk_core.errors import InvalidInputError

from .models import HeavyHitterSet, IndexPair, MatrixStats, SparseIntMatrix


def _check_product_shapes(a: SparseIntMatrix, b: SparseIntMatrix) -> None:
    if a.n_cols != b.n_rows:
        raise InvalidInputError(f"cannot multiply {a.n_rows}x{a.n_cols} by {b.n_rows}x{b.n_cols}")


def _check_p(p: float, *, allow_zero: bool = True) -> None:
    lower_ok = p >= 0 if allow_zero else p > 0
    if not (lower_ok and p <= 2):
        bound = "[0, 2]" if allow_zero else "(0, 2]"
        raise InvalidInputError(f"p must lie in {bound}, got {p}")


def multiply(a: SparseIntMatrix, b: SparseIntMatrix) -> SparseIntMatrix:
    """Integer product ``C = A·B`` by sparse row-times-row accumulation."""

    _check_product_shapes(a, b)
    product: dict[IndexPair, int] = {}
    for i in a.nonzero_rows():
        acc: dict[int, int] = {}
        for k, a_ik in a.row(i).items():
            for j, b_kj in b.row(k).items():
                acc[j] = acc.get(j, 0) + a_ik * b_kj
        for j, value in acc.items():
            product[(i, j)] = value
    bound = max(a.max_entry, b.max_entry, max(product.values(), default=0))
    return SparseIntMatrix(a.n_rows, b.n_cols, product, max_entry=bound)


def naive_multiply(a: SparseIntMatrix, b: SparseIntMatrix) -> SparseIntMatrix:
    """Reference triple loop over every ``(i, j, k)``, used to cross-check ``multiply``."""

    _check_product_shapes(a, b)
    product: dict[IndexPair, int] = {}
    for i in range(a.n_rows):
        for j in range(b.n_cols):
            total = 0
            for k in range(a.n_cols):
                total += a.get(i, k) * b.get(k, j)
            if total:
                product[(i, j)] = total
    bound = max(a.max_entry, b.max_entry, max(product.values(), default=0))
    return SparseIntMatrix(a.n_rows, b.n_cols, product, max_entry=bound)


def lp_norm_pow(c: SparseIntMatrix, p: float) -> float:
    """Return ``Σ |C_ij|^p`` with ``0^0 = 0``; for ``p = 0`` this is the nonzero count."""

    _check_p(p)
    if p == 0:
        return float(c.nnz)
    if p == 1:
        return float(sum(c.entries.values()))
    if p == 2:
        return float(sum(value * value for value in c.entries.values()))
    return float(math.fsum(value**p for value in c.entries.values()))


def lp_norm(c: SparseIntMatrix, p: float) -> MatrixStats:
    """Return ``‖C‖_p`` (the nonzero count when ``p = 0``, the max entry when ``p = inf``)."""

    if math.isinf(p):
        return MatrixStats(p=p, value=float(linf_norm(c)), entry_count=c.nnz)
    power = lp_norm_pow(c, p)
    value = power if p == 0 else power ** (1.0 / p)
    return MatrixStats(p=p, value=value, entry_count=c.nnz)


def linf_norm(c: SparseIntMatrix) -> int:
    return c.max_value()


def l1_via_marginals(a: SparseIntMatrix, b: SparseIntMatrix) -> int:
    """``‖AB‖₁ = Σ_j ‖A_{*,j}‖₁·‖B_{j,*}‖₁`` for nonnegative inputs."""

    _check_product_shapes(a, b)
    return int(sum(int(x) * int(y) for x, y in zip(a.col_sums(), b.row_sums())))


def heavy_hitters_exact(c: SparseIntMatrix, p: float, phi: float) -> set[IndexPair]:
    """Exact ``{(i, j) : C_ij^p >= phi·‖C‖_p^p}``; empty for the zero matrix."""

    _check_p(p, allow_zero=False)
    if not 0 < phi <= 1:
        raise InvalidInputError(f"phi must lie in (0, 1], got {phi}")
    total = lp_norm_pow(c, p)
    if total == 0:
        return set()
    threshold = phi * total
    return {pair for pair, value in c.items() if float(value) ** p >= threshold}


def sandwich_holds(result: HeavyHitterSet, c: SparseIntMatrix, p: float) -> bool:
    """True when ``HH_phi(C) ⊆ S ⊆ HH_{phi-eps}(C)``."""

    inner = heavy_hitters_exact(c, p, result.phi)
    outer_phi = result.phi - result.eps
    if outer_phi <= 0:
        outer = {pair for pair, _ in c.items()}
    else:
        outer = heavy_hitters_exact(c, p, outer_phi)
    return inner <= result.pairs <= outer


def row_support(a: SparseIntMatrix, i: int) -> frozenset[int]:
    """``A_i = {k : A_ik != 0}``."""

    return frozenset(a.row(i))


def col_support(b: SparseIntMatrix, j: int) -> frozenset[int]:
    """``B_j = {k : B_kj != 0}``."""

    return frozenset(b.col(j))


def join_size(a: SparseIntMatrix, b: SparseIntMatrix) -> int:
    """Number of pairs ``(i, j)`` whose projection sets intersect."""

    _check_product_shapes(a, b)
    count = 0
    for i in range(a.n_rows):
        left = row_support(a, i)
        if not left:
            continue
        for j in range(b.n_cols):
            if left & col_support(b, j):
                count += 1
    return count
