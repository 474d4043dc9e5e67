"""Exact integer helpers shared by the sketches."""

from __future__ import annotations

from typing import Any

import numpy as np

MERSENNE_31 = 2**31 - 1
MERSENNE_61 = 2**61 - 1

_LIMB_BITS = 16
_LIMB_MASK = (1 << _LIMB_BITS) - 1
_CHUNK = 1 << 14
_INT64_SAFE = 1 << 62


def derive_seed(seed: int, *keys: int) -> int:
    """64-bit seed derived from ``seed`` and a spawn path of integer keys."""

    words = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys)).generate_state(2, np.uint32)
    return (int(words[0]) << 32) | int(words[1])


def _as_2d(array: Any) -> tuple[np.ndarray, bool]:
    matrix = np.asarray(array)
    if matrix.ndim == 1:
        return matrix.reshape(-1, 1), True
    return matrix, False


def modmatmul(left: Any, right: Any, modulus: int = MERSENNE_31) -> np.ndarray:
    """``(left @ right) mod modulus`` computed exactly in int64 for moduli below 2^31.

    The left operand is split into 16-bit limbs and the inner dimension is
    processed in chunks so no partial sum overflows.
    """

    if modulus > MERSENNE_31:
        raise ValueError("modmatmul supports moduli up to 2^31 - 1")
    lhs = np.mod(np.asarray(left), modulus).astype(np.int64)
    rhs, flat = _as_2d(np.mod(np.asarray(right), modulus))
    rhs = rhs.astype(np.int64)
    high, low = lhs >> _LIMB_BITS, lhs & _LIMB_MASK
    result = np.zeros((lhs.shape[0], rhs.shape[1]), dtype=np.int64)
    for start in range(0, lhs.shape[1], _CHUNK):
        window = slice(start, start + _CHUNK)
        part_high = (high[:, window] @ rhs[window]) % modulus
        part_low = (low[:, window] @ rhs[window]) % modulus
        result = (result + (part_high << _LIMB_BITS) % modulus + part_low) % modulus
    return result.ravel() if flat else result


def exact_matmul(left: Any, right: Any) -> np.ndarray:
    """Exact integer ``left @ right``; falls back to Python integers when int64 could overflow."""

    lhs = np.asarray(left)
    rhs = np.asarray(right)
    if lhs.size == 0 or rhs.size == 0:
        return (lhs.astype(np.int64) @ rhs.astype(np.int64)).astype(np.int64)
    peak = int(np.max(np.abs(lhs)))
    column_mass = np.abs(rhs.astype(object) if rhs.dtype == object else rhs.astype(np.int64)).sum(axis=0)
    bound = peak * int(np.max(column_mass))
    if bound < _INT64_SAFE:
        return lhs.astype(np.int64) @ rhs.astype(np.int64)
    return lhs.astype(object) @ rhs.astype(object)
