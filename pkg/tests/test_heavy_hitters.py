"""Heavy-hitter protocols and their helpers."""

from __future__ import annotations

import numpy as np
import pytest

from psk_builtin.harness import ExperimentConfig, make_instance
from psk_builtin.protocols import HeavyHitterBounds, HHBinaryProtocol, HHGeneralProtocol, thin_units
from psk_core.api import ProtocolRequest, PSKAbstractProtocol
from psk_core.channel import EstimateReport, ProtocolSession
from psk_core.errors import InvalidInputError
from psk_core.matrix import HeavyHitterSet, SparseIntMatrix, multiply

PROTOCOLS = [HHGeneralProtocol(), HHBinaryProtocol()]


def _run(
    protocol: PSKAbstractProtocol,
    a: SparseIntMatrix,
    b: SparseIntMatrix,
    seed: int,
    request: ProtocolRequest | None = None,
) -> EstimateReport:
    return protocol.run(a, b, ProtocolSession(seed, protocol="test"), request or ProtocolRequest())


@pytest.mark.parametrize("protocol", PROTOCOLS)
def test_zero_product_has_no_heavy_hitters(protocol: PSKAbstractProtocol) -> None:
    report = _run(protocol, SparseIntMatrix.zeros(8, 8), SparseIntMatrix.identity(8), seed=1)
    assert isinstance(report.result, HeavyHitterSet)
    assert len(report.result) == 0


def test_general_finds_a_single_weighted_entry() -> None:
    a = SparseIntMatrix(8, 8, {(0, 3): 100})
    b = SparseIntMatrix(8, 8, {(3, 5): 1})
    report = _run(HHGeneralProtocol(), a, b, seed=2)
    assert report.result.pairs == frozenset({(0, 5)})
    assert report.details["rate"] == 1.0


def test_binary_finds_a_single_entry() -> None:
    a = SparseIntMatrix(8, 8, {(0, 3): 1})
    b = SparseIntMatrix(8, 8, {(3, 5): 1})
    report = _run(HHBinaryProtocol(), a, b, seed=2)
    assert report.result.pairs == frozenset({(0, 5)})


@pytest.mark.parametrize("protocol", PROTOCOLS)
def test_planted_heavy_pair_is_reported_exactly(protocol: PSKAbstractProtocol) -> None:
    config = ExperimentConfig(protocol="hh", family="planted-hh", n=32)
    request = ProtocolRequest(p=1, phi=0.5, eps=0.25)
    for seed in range(5):
        instance = make_instance(config, seed, binary=True)
        bounds = protocol.oracle(multiply(instance.a, instance.b), request)
        report = _run(protocol, instance.a, instance.b, seed=seed, request=request)
        assert bounds.contains(report.result)
        assert report.result.pairs == frozenset({tuple(instance.planted["heavy_pair"])})
        assert report.rounds <= 6


@pytest.mark.parametrize("protocol", PROTOCOLS)
def test_planted_heavy_pair_at_p_two(protocol: PSKAbstractProtocol) -> None:
    config = ExperimentConfig(protocol="hh", family="planted-hh", n=32)
    request = ProtocolRequest(p=2, phi=0.5, eps=0.25)
    hits = 0
    for seed in range(5):
        instance = make_instance(config, seed, binary=True)
        report = _run(protocol, instance.a, instance.b, seed=100 + seed, request=request)
        hits += protocol.within_guarantee(report, protocol.oracle(multiply(instance.a, instance.b), request), request)
        assert report.rounds <= 6
    assert hits >= 4


def test_binary_protocol_rejects_integer_input() -> None:
    a = SparseIntMatrix(4, 4, {(0, 0): 3})
    with pytest.raises(InvalidInputError):
        _run(HHBinaryProtocol(), a, SparseIntMatrix.identity(4), seed=0)


def test_invalid_phi_eps_rejected() -> None:
    eye = SparseIntMatrix.identity(4)
    with pytest.raises(InvalidInputError):
        _run(HHGeneralProtocol(), eye, eye, seed=0, request=ProtocolRequest(phi=0.2, eps=0.3))


def test_thinning_keeps_the_expected_share_of_units() -> None:
    a = SparseIntMatrix(2, 2, {(0, 1): 1000})
    rng = np.random.default_rng(8)
    kept = [thin_units(a, 0.3, rng).get(0, 1) for _ in range(200)]
    assert abs(np.mean(kept) - 300) < 6


def test_thinning_at_rate_one_is_identity() -> None:
    a = SparseIntMatrix(2, 2, {(0, 1): 7, (1, 0): 2})
    assert thin_units(a, 1.0, np.random.default_rng(0)) is a
    with pytest.raises(InvalidInputError):
        thin_units(a, 0.0, np.random.default_rng(0))
    with pytest.raises(InvalidInputError):
        thin_units(a, 1.5, np.random.default_rng(0))


def test_bounds_sandwich() -> None:
    c = SparseIntMatrix.from_dense([[10, 4], [1, 0]])
    bounds = HeavyHitterBounds.of(c, 1, 0.5, 0.25)
    assert bounds.inner == frozenset({(0, 0)})
    assert bounds.outer == frozenset({(0, 0), (0, 1)})
    assert bounds.contains(HeavyHitterSet(frozenset({(0, 0)}), 0.5, 0.25))
    assert bounds.contains(HeavyHitterSet(frozenset({(0, 0), (0, 1)}), 0.5, 0.25))
    assert not bounds.contains(HeavyHitterSet(frozenset({(0, 1)}), 0.5, 0.25))
    assert len(bounds) == 1
