"""ℓ∞ protocols for binary and general integer matrices."""

from __future__ import annotations

import numpy as np
import pytest

from psk_builtin.harness import ExperimentConfig, Instance, make_instance
from psk_builtin.protocols import LinfGeneralProtocol, LinfKappaProtocol, LinfTwoEpsProtocol
from psk_builtin.protocols.linf_binary import LinfParams, entry_depths, select_level
from psk_core.api import ProtocolRequest, PSKAbstractProtocol
from psk_core.channel import EstimateReport, Party, ProtocolSession
from psk_core.errors import InvalidInputError
from psk_core.matrix import SparseIntMatrix, multiply


def _run(
    protocol: PSKAbstractProtocol,
    a: SparseIntMatrix,
    b: SparseIntMatrix,
    seed: int,
    request: ProtocolRequest | None = None,
) -> EstimateReport:
    return protocol.run(a, b, ProtocolSession(seed, protocol="test"), request or ProtocolRequest())


def _planted_max(n: int, width: int) -> tuple[SparseIntMatrix, SparseIntMatrix]:
    a = SparseIntMatrix(n, n, {(0, k): 1 for k in range(width)} | {(i, i): 1 for i in range(1, n)})
    b = SparseIntMatrix(n, n, {(k, 0): 1 for k in range(width)} | {(i, i): 1 for i in range(1, n)})
    return a, b


def test_two_eps_on_zero_product() -> None:
    report = _run(LinfTwoEpsProtocol(), SparseIntMatrix.zeros(8, 8), SparseIntMatrix.identity(8), seed=1)
    assert report.value == 0.0
    assert report.rounds == 3


def test_two_eps_on_identity_is_exact() -> None:
    protocol = LinfTwoEpsProtocol()
    eye = SparseIntMatrix.identity(16)
    report = _run(protocol, eye, eye, seed=4)
    assert report.rounds == 3
    assert report.value == 1.0
    assert report.details["chosen_level"] == 0
    assert protocol.within_guarantee(report, protocol.oracle(multiply(eye, eye), ProtocolRequest()), ProtocolRequest())


def test_two_eps_finds_planted_maximum() -> None:
    protocol = LinfTwoEpsProtocol()
    a, b = _planted_max(16, 8)
    report = _run(protocol, a, b, seed=9)
    assert protocol.oracle(multiply(a, b), ProtocolRequest()) == 8.0
    assert report.value == 8.0
    assert report.bits_by_party["bob"] > 0


def test_two_eps_rejects_non_binary_input() -> None:
    a = SparseIntMatrix.from_dense([[2, 0], [0, 1]])
    with pytest.raises(InvalidInputError):
        _run(LinfTwoEpsProtocol(), a, SparseIntMatrix.identity(2), seed=0)


def test_level_helpers() -> None:
    params = LinfParams(eps=0.5)
    assert params.level_prob(0) == 1.0
    assert params.level_count(1) == 0
    assert params.level_count(9) == 6
    assert select_level([100, 40, 9], threshold=50) == 1
    assert select_level([100, 80], threshold=50) == 1
    depths = entry_depths(np.random.default_rng(0), 500, [1.0, 0.5, 0.25])
    assert depths.min() >= 0
    assert depths.max() <= 2


def test_kappa_on_zero_product_is_one_round() -> None:
    report = _run(
        LinfKappaProtocol(), SparseIntMatrix.zeros(8, 8), SparseIntMatrix.identity(8), seed=3
    )
    assert report.value == 0.0
    assert report.rounds == 1
    assert report.details["empty_sample"] is True


def test_kappa_on_single_nonzero_meets_guarantee() -> None:
    protocol = LinfKappaProtocol()
    a = SparseIntMatrix(8, 8, {(3, 2): 1})
    b = SparseIntMatrix(8, 8, {(2, 4): 1})
    request = ProtocolRequest(kappa=4)
    for seed in range(10):
        report = _run(protocol, a, b, seed=seed, request=request)
        assert report.rounds in (1, 3)
        assert protocol.within_guarantee(report, 1.0, request)


@pytest.mark.parametrize("kappa", [2.0, 64.0])
def test_kappa_out_of_range_rejected(kappa: float) -> None:
    eye = SparseIntMatrix.identity(8)
    with pytest.raises(InvalidInputError):
        _run(LinfKappaProtocol(), eye, eye, seed=0, request=ProtocolRequest(kappa=kappa))


def test_general_on_zero_product_is_one_round() -> None:
    report = _run(LinfGeneralProtocol(), SparseIntMatrix.zeros(8, 8), SparseIntMatrix.identity(8), seed=1)
    assert report.value == 0.0
    assert report.rounds == 1
    assert report.bits_by_party["bob"] == 0


def test_general_on_planted_entry() -> None:
    protocol = LinfGeneralProtocol()
    request = ProtocolRequest(kappa=4)
    a = SparseIntMatrix(8, 8, {(2, 3): 1000})
    b = SparseIntMatrix.identity(8)
    report = _run(protocol, a, b, seed=6, request=request)
    assert 1000 / 8 <= report.value <= 8000
    assert protocol.within_guarantee(report, 1000.0, request)
    assert report.output_party == Party.BOB.value


def test_general_on_identity() -> None:
    protocol = LinfGeneralProtocol()
    request = ProtocolRequest(kappa=4)
    eye = SparseIntMatrix.identity(16)
    report = _run(protocol, eye, eye, seed=2, request=request)
    assert 1 / 8 <= report.value <= 8
    assert report.details["block_size"] == 16


def test_general_meets_guarantee_on_random_integers() -> None:
    protocol = LinfGeneralProtocol()
    request = ProtocolRequest(kappa=4)
    rng = np.random.default_rng(12)
    hits = 0
    for trial in range(20):
        a = SparseIntMatrix.from_dense(np.where(rng.random((32, 32)) < 0.2, rng.integers(1, 6, size=(32, 32)), 0))
        b = SparseIntMatrix.from_dense(np.where(rng.random((32, 32)) < 0.2, rng.integers(1, 6, size=(32, 32)), 0))
        report = _run(protocol, a, b, seed=trial, request=request)
        hits += protocol.within_guarantee(report, protocol.oracle(multiply(a, b), request), request)
    assert hits >= 18


def test_general_bits_shrink_with_kappa() -> None:
    rng = np.random.default_rng(1)
    a = SparseIntMatrix.from_dense(rng.integers(0, 3, size=(64, 64)))
    b = SparseIntMatrix.from_dense(rng.integers(0, 3, size=(64, 64)))
    small = _run(LinfGeneralProtocol(), a, b, seed=0, request=ProtocolRequest(kappa=2))
    large = _run(LinfGeneralProtocol(), a, b, seed=0, request=ProtocolRequest(kappa=4))
    assert large.bits_total < small.bits_total


def _planted_instance(protocol: str, n: int, seed: int) -> Instance:
    return make_instance(ExperimentConfig(protocol=protocol, family="planted-max", n=n), seed, binary=True)


def test_two_eps_succeeds_on_planted_max_instances() -> None:
    protocol = LinfTwoEpsProtocol()
    request = ProtocolRequest(eps=0.5)
    hits = 0
    for seed in range(20):
        instance = _planted_instance("linf-2eps", 64, seed)
        report = _run(protocol, instance.a, instance.b, seed=seed, request=request)
        assert report.rounds == 3
        hits += protocol.within_guarantee(report, float(instance.planted["linf"]), request)
    assert hits >= 17


def test_chosen_level_is_the_first_under_the_threshold() -> None:
    for seed in range(10):
        instance = _planted_instance("linf-2eps", 32, seed)
        details = _run(LinfTwoEpsProtocol(), instance.a, instance.b, seed=seed).details
        norms, chosen, threshold = details["level_norms"], details["chosen_level"], details["threshold"]
        assert all(later <= earlier for earlier, later in zip(norms, norms[1:]))
        assert norms[chosen] <= threshold or chosen == len(norms) - 1
        if chosen > 0:
            assert norms[chosen - 1] > threshold


def test_kappa_bits_fall_as_kappa_grows() -> None:
    medians = []
    for kappa in (4, 8, 16):
        bits = []
        for seed in range(5):
            instance = _planted_instance("linf-kappa", 128, seed)
            report = _run(LinfKappaProtocol(), instance.a, instance.b, seed=seed, request=ProtocolRequest(kappa=kappa))
            bits.append(report.bits_total)
        medians.append(float(np.median(bits)))
    assert medians[0] > medians[1] > medians[2]
