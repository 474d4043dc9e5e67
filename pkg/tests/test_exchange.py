"""Index exchange splits ``A·B`` exactly between the two parties."""

from __future__ import annotations

import numpy as np

from psk_builtin.protocols import index_exchange
from psk_core.channel import Party, ProtocolSession
from psk_core.matrix import SparseIntMatrix, multiply


def test_split_sums_to_the_product() -> None:
    rng = np.random.default_rng(21)
    a = SparseIntMatrix.from_dense(np.where(rng.random((10, 12)) < 0.3, rng.integers(1, 5, size=(10, 12)), 0))
    b = SparseIntMatrix.from_dense(np.where(rng.random((12, 9)) < 0.3, rng.integers(1, 5, size=(12, 9)), 0))
    session = ProtocolSession(4)

    split = index_exchange(a, b, session)

    assert split.total().entries == multiply(a, b).entries
    assert session.round_count == 3
    assert not session.is_finished
    assert set(split.alice_items).isdisjoint(split.bob_items)


def test_ties_go_to_alice() -> None:
    eye = SparseIntMatrix.identity(5)
    split = index_exchange(eye, eye, ProtocolSession(0))
    assert split.alice_items == (0, 1, 2, 3, 4)
    assert split.bob_items == ()
    assert split.c_bob.entries == eye.entries
    assert split.c_alice.nnz == 0
    assert split.sender(2) is Party.ALICE


def test_smaller_side_ships_its_list() -> None:
    a = SparseIntMatrix.from_dense([[1], [1], [1]])
    b = SparseIntMatrix.from_dense([[1, 0, 0, 0]])
    split = index_exchange(a, b, ProtocolSession(0))
    assert split.bob_items == (0,)
    assert split.c_alice.entries == multiply(a, b).entries
    assert split.max_part() == 1


def test_zero_input_exchanges_nothing() -> None:
    split = index_exchange(SparseIntMatrix.zeros(4, 4), SparseIntMatrix.identity(4), ProtocolSession(0))
    assert split.total().nnz == 0
    assert split.alice_items == ()
    assert split.bob_items == ()
    assert split.sender(0) is None


def test_binary_inputs_skip_values() -> None:
    eye = SparseIntMatrix.identity(8)
    binary_session = ProtocolSession(0)
    index_exchange(eye, eye, binary_session)
    valued_session = ProtocolSession(0)
    index_exchange(eye, eye, valued_session, with_values=True)
    assert valued_session.bits_total > binary_session.bits_total


def test_split_is_exact_on_random_binary_inputs() -> None:
    rng = np.random.default_rng(5)
    for trial in range(50):
        density = 0.05 + 0.5 * rng.random()
        a = SparseIntMatrix.from_dense((rng.random((12, 10)) < density).astype(np.int64))
        b = SparseIntMatrix.from_dense((rng.random((10, 14)) < density).astype(np.int64))

        split = index_exchange(a, b, ProtocolSession(trial))

        product = multiply(a, b)
        assert split.total().entries == product.entries
        assert 2 * split.max_part() >= product.max_value()
        assert split.max_part() <= product.max_value()
