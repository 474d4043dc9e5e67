"""Linear sketches: ℓ_p estimators, the ℓ₀-sampler and the blocked ℓ₂ sketch."""

from __future__ import annotations

import itertools
from collections import Counter

import numpy as np
import pytest

from psk_builtin.sketches import (
    BlockedL2Sketch,
    L0Sampler,
    L0SamplerSpec,
    LpSketch,
    LpSketchSpec,
    blocked_linf_estimate,
    derive_seed,
    l0_sample,
    l0_sample_with_retry,
    lp_apply,
    lp_estimate,
    modmatmul,
    stable_abs_median,
)
from psk_core.channel import SampleStatus
from psk_core.errors import InvalidInputError


def _spec(p: float, seed: int, *, dim: int = 64, eps: float = 0.25, delta: float = 0.05) -> LpSketchSpec:
    return LpSketchSpec(p=p, eps=eps, delta=delta, input_dim=dim, seed=seed)


@pytest.mark.parametrize("p", [0, 1])
def test_sketches_are_linear(p: float) -> None:
    rng = np.random.default_rng(1)
    x = rng.integers(0, 5, size=64)
    y = rng.integers(0, 5, size=64)
    sketch = LpSketch(_spec(p, seed=7))
    assert sketch.apply(x) + sketch.apply(y) == sketch.apply(x + y)


@pytest.mark.parametrize("p", [0, 0.5, 1, 2])
def test_zero_vector_estimates_zero(p: float) -> None:
    sketch = LpSketch(_spec(p, seed=3))
    assert sketch.estimate(sketch.apply(np.zeros(64, dtype=np.int64))) == 0.0


def test_support_estimate_within_twenty_percent() -> None:
    rng = np.random.default_rng(2)
    hits = 0
    for trial in range(30):
        x = np.zeros(256, dtype=np.int64)
        x[rng.choice(256, size=37, replace=False)] = rng.integers(1, 9, size=37)
        sketch = LpSketch(_spec(0, seed=trial, dim=256, eps=0.2, delta=0.1))
        hits += 30.8 <= sketch.estimate(sketch.apply(x)) <= 44.4
    assert hits >= 24


@pytest.mark.parametrize("p", [0.5, 1, 1.5, 2])
def test_norm_estimate_within_one_plus_eps(p: float) -> None:
    rng = np.random.default_rng(5)
    hits = 0
    for trial in range(20):
        x = rng.integers(0, 10, size=64)
        truth = float(np.sum(np.abs(x).astype(np.float64) ** p))
        sketch = LpSketch(_spec(p, seed=100 + trial))
        ratio = sketch.estimate(sketch.apply(x)) / truth
        hits += 1 / 1.25 <= ratio <= 1.25
    assert hits >= 16


def test_spec_validation() -> None:
    with pytest.raises(InvalidInputError):
        _spec(2.5, seed=1)
    with pytest.raises(InvalidInputError):
        LpSketchSpec(p=1, eps=0.0, delta=0.1, input_dim=8, seed=1)
    sketch = LpSketch(_spec(1, seed=1))
    with pytest.raises(InvalidInputError):
        sketch.apply(np.zeros(3))


def test_stable_median_of_cauchy_is_one() -> None:
    assert stable_abs_median(1) == 1.0
    with pytest.raises(InvalidInputError):
        stable_abs_median(2)


def test_l0_sampler_single_nonzero() -> None:
    x = np.zeros(16, dtype=np.int64)
    x[5] = 3
    for seed in range(20):
        spec = L0SamplerSpec(16, seed)
        outcome = L0Sampler(spec).apply(x).sample()
        assert outcome.status in (SampleStatus.OK, SampleStatus.FAIL)
        if outcome.ok:
            assert outcome.index == 5


def test_l0_sampler_zero_vector_is_empty() -> None:
    spec = L0SamplerSpec(16, 4)
    outcome = L0Sampler(spec).apply(np.zeros(16, dtype=np.int64)).sample()
    assert outcome.status is SampleStatus.EMPTY
    assert not outcome.ok


def test_l0_sampler_is_close_to_uniform() -> None:
    x = np.zeros(8, dtype=np.int64)
    x[[2, 5, 7]] = [1, 4, 2]
    picks: Counter[int] = Counter()
    for seed in range(2000):
        outcome = l0_sample_with_retry(x, L0SamplerSpec(8, seed))
        if outcome.ok:
            picks[outcome.index] += 1
    total = sum(picks.values())
    assert set(picks) <= {2, 5, 7}
    assert total >= 1900
    for index in (2, 5, 7):
        assert abs(picks[index] / total - 1 / 3) < 0.05


@pytest.mark.parametrize("n", range(1, 13))
def test_l0_sampler_never_leaves_the_support_of_binary_vectors(n: int) -> None:
    vectors = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64).T
    _assert_samples_in_support(L0Sampler(L0SamplerSpec(n, seed=n)), vectors)


@pytest.mark.parametrize("n", range(1, 8))
def test_l0_sampler_never_leaves_the_support_of_small_integer_vectors(n: int) -> None:
    vectors = np.array(list(itertools.product((0, 1, 2), repeat=n)), dtype=np.int64).T
    _assert_samples_in_support(L0Sampler(L0SamplerSpec(n, seed=100 + n)), vectors)


def _assert_samples_in_support(sampler: L0Sampler, vectors: np.ndarray) -> None:
    batch = sampler.apply_columns(vectors)
    for j in range(vectors.shape[1]):
        support = set(np.flatnonzero(vectors[:, j]).tolist())
        outcome = batch.column(j).sample(sampler)
        if not support:
            assert outcome.status is SampleStatus.EMPTY
        elif outcome.ok:
            assert outcome.index in support
        else:
            assert outcome.status is SampleStatus.FAIL


def test_l0_states_combine_linearly() -> None:
    spec = L0SamplerSpec(8, 11)
    sampler = L0Sampler(spec)
    columns = np.array([[1, 0], [0, 0], [0, 2], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0]])
    batch = sampler.apply_columns(columns)
    combined = batch.combine(np.array([0, 1]))
    direct = sampler.apply(columns[:, 1])
    assert np.array_equal(combined.counts, direct.counts)
    assert combined.sample(sampler).index in (None, 2)


def test_blocked_sketch_on_scaled_unit_vector() -> None:
    sketch = BlockedL2Sketch.for_dimension(16, 2.0, seed=9)
    assert blocked_linf_estimate(sketch, np.zeros(16, dtype=np.int64)) == 0.0
    x = np.zeros(16, dtype=np.int64)
    x[0] = 1000
    estimate = blocked_linf_estimate(sketch, x)
    assert estimate == pytest.approx(1000.0)
    assert sketch.block_size == 4
    assert sketch.block_count == 4


def test_blocked_sketch_never_undershoots_dense_equal_entries() -> None:
    x = np.full(64, 7, dtype=np.int64)
    for seed in range(200):
        sketch = BlockedL2Sketch.for_dimension(64, 4.0, seed)
        estimate = blocked_linf_estimate(sketch, x)
        assert 7 <= estimate <= 2 * 4 * 7


def test_blocked_sketch_rejects_small_kappa() -> None:
    with pytest.raises(InvalidInputError):
        BlockedL2Sketch.for_dimension(16, 0.5, seed=1)


def test_derive_seed_is_stable_and_distinct() -> None:
    assert derive_seed(1, 2) == derive_seed(1, 2)
    assert derive_seed(1, 2) != derive_seed(1, 3)
    assert 0 <= derive_seed(99) < 2**64


def test_modmatmul_matches_python_integers() -> None:
    rng = np.random.default_rng(4)
    left = rng.integers(0, 2**31 - 1, size=(3, 5), dtype=np.int64)
    right = rng.integers(0, 2**31 - 1, size=(5, 2), dtype=np.int64)
    expected = np.mod(left.astype(object) @ right.astype(object), 2**31 - 1).astype(np.int64)
    assert np.array_equal(modmatmul(left, right), expected)


def test_functional_wrappers_match_the_sketch_objects() -> None:
    spec = _spec(1, seed=21)
    x = np.arange(64)
    vector = lp_apply(spec, x)
    assert vector == LpSketch(spec).apply(x)
    assert lp_estimate(vector) == LpSketch(spec).estimate(vector)

    single = np.zeros(16, dtype=np.int64)
    single[9] = 2
    outcome = l0_sample(L0Sampler(L0SamplerSpec(16, 3)).apply(single))
    assert outcome.index in (None, 9)
