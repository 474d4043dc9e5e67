"""Index exchange: an exact additive split ``C_A + C_B = A_sub·B``.

For every universe item ``j`` Alice knows ``u_j`` (nonzeros in column ``j`` of
``A_sub``) and Bob knows ``v_j`` (nonzeros in row ``j`` of ``B``). Once the
counts are exchanged the side with the smaller count ships its list ``I_j``
(Alice on ties); items with ``min(u_j, v_j) = 0`` contribute nothing and are
skipped. Each party then adds the rank-one products of the items it fully
knows. Lists carry ``⌈log₂ universe⌉`` bits per index, plus a value varint per
index when the inputs are integer matrices.

The building blocks are exposed separately so protocols can fold the counts
and lists into their own round schedules.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from psk_core.channel import Endpoint, IndexLists, Party, ProtocolSession, SizedUIntVector
from psk_core.matrix import DEFAULT_MAX_ENTRY, SparseIntMatrix

from ._common import open_endpoints

logger = logging.getLogger(__name__)

ItemVectors = Mapping[int, Mapping[int, int]]


@dataclass(frozen=True)
class AdditiveSplit:
    """``c_alice`` is held by Alice and ``c_bob`` by Bob; ``*_items`` record who shipped each list."""

    c_alice: SparseIntMatrix
    c_bob: SparseIntMatrix
    alice_items: tuple[int, ...]
    bob_items: tuple[int, ...]

    def total(self) -> SparseIntMatrix:
        return self.c_alice + self.c_bob

    def sender(self, item: int) -> Party | None:
        if item in self.alice_items:
            return Party.ALICE
        if item in self.bob_items:
            return Party.BOB
        return None

    def max_part(self) -> int:
        return max(self.c_alice.max_value(), self.c_bob.max_value())


def alice_items(u: np.ndarray, v: np.ndarray) -> tuple[int, ...]:
    mask = (u <= v) & (u > 0) & (v > 0)
    return tuple(int(j) for j in np.flatnonzero(mask))


def bob_items(u: np.ndarray, v: np.ndarray) -> tuple[int, ...]:
    mask = (u > v) & (v > 0)
    return tuple(int(j) for j in np.flatnonzero(mask))


def send_counts(endpoint: Endpoint[SparseIntMatrix], counts: np.ndarray) -> None:
    endpoint.send(SizedUIntVector(np.asarray(counts, dtype=np.int64)))


def receive_counts(endpoint: Endpoint[SparseIntMatrix], count: int) -> np.ndarray:
    return endpoint.receive(SizedUIntVector, count=count).values


def send_column_lists(
    alice: Endpoint[SparseIntMatrix], a_sub: SparseIntMatrix, items: tuple[int, ...], *, with_values: bool
) -> None:
    lists, values = _lists(a_sub.col, items)
    alice.send(IndexLists(lists, a_sub.n_rows, values if with_values else None))


def send_row_lists(
    bob: Endpoint[SparseIntMatrix], b: SparseIntMatrix, items: tuple[int, ...], *, with_values: bool
) -> None:
    lists, values = _lists(b.row, items)
    bob.send(IndexLists(lists, b.n_cols, values if with_values else None))


def receive_lists(
    endpoint: Endpoint[SparseIntMatrix],
    items: tuple[int, ...],
    lengths: np.ndarray,
    universe: int,
    *,
    with_values: bool,
) -> dict[int, dict[int, int]]:
    element = endpoint.receive(
        IndexLists, lengths=[int(lengths[j]) for j in items], universe=universe, with_values=with_values
    )
    received: dict[int, dict[int, int]] = {}
    for position, item in enumerate(items):
        indices = element.lists[position]
        values = element.values[position] if element.values is not None else (1,) * len(indices)
        received[item] = dict(zip(indices, values))
    return received


def rank_one_sum(columns: ItemVectors, rows: ItemVectors, shape: tuple[int, int]) -> SparseIntMatrix:
    """``Σ_j columns[j] ⊗ rows[j]`` over the items present in both maps."""

    entries: dict[tuple[int, int], int] = {}
    for item, column in columns.items():
        row = rows.get(item)
        if not row:
            continue
        for i, left in column.items():
            for j, right in row.items():
                entries[(i, j)] = entries.get((i, j), 0) + left * right
    bound = max(DEFAULT_MAX_ENTRY, max(entries.values(), default=0))
    return SparseIntMatrix(shape[0], shape[1], entries, max_entry=bound)


def own_columns(a_sub: SparseIntMatrix, items: tuple[int, ...]) -> dict[int, dict[int, int]]:
    return {item: a_sub.col(item) for item in items}


def own_rows(b: SparseIntMatrix, items: tuple[int, ...]) -> dict[int, dict[int, int]]:
    return {item: b.row(item) for item in items}


def _lists(
    extract: Callable[[int], dict[int, int]], items: tuple[int, ...]
) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    lists: list[tuple[int, ...]] = []
    values: list[tuple[int, ...]] = []
    for item in items:
        vector = extract(item)
        ordered = sorted(vector)
        lists.append(tuple(ordered))
        values.append(tuple(vector[index] for index in ordered))
    return tuple(lists), tuple(values)


def index_exchange(
    a_sub: SparseIntMatrix, b: SparseIntMatrix, session: ProtocolSession, *, with_values: bool | None = None
) -> AdditiveSplit:
    """Standalone three-round exchange: Alice's counts, Bob's counts and lists, Alice's lists.

    The session stays open so a caller can keep using it.
    """

    alice, bob = open_endpoints(session, a_sub, b)
    values = with_values if with_values is not None else not (a_sub.is_binary and b.is_binary)
    shape = (a_sub.n_rows, b.n_cols)

    u = alice.input.col_counts()
    send_counts(alice, u)

    u_at_bob = receive_counts(bob, bob.input.n_rows)
    v = bob.input.row_counts()
    send_counts(bob, v)
    from_bob = bob_items(u_at_bob, v)
    send_row_lists(bob, bob.input, from_bob, with_values=values)

    v_at_alice = receive_counts(alice, alice.input.n_cols)
    from_alice = alice_items(u, v_at_alice)
    bob_rows = receive_lists(alice, bob_items(u, v_at_alice), v_at_alice, shape[1], with_values=values)
    c_alice = rank_one_sum(own_columns(alice.input, tuple(bob_rows)), bob_rows, shape)
    send_column_lists(alice, alice.input, from_alice, with_values=values)

    alice_cols = receive_lists(bob, alice_items(u_at_bob, v), u_at_bob, shape[0], with_values=values)
    c_bob = rank_one_sum(alice_cols, own_rows(bob.input, tuple(alice_cols)), shape)
    logger.debug("index exchange: alice sent %d lists, bob sent %d", len(from_alice), len(from_bob))
    return AdditiveSplit(c_alice, c_bob, from_alice, from_bob)
