"""Linear sketching primitives."""

from ._arith import MERSENNE_31, MERSENNE_61, derive_seed, exact_matmul, modmatmul
from .blocked import BlockedL2Sketch, blocked_linf_estimate
from .l0 import L0Sampler, L0SamplerSpec, L0SamplerState, SampleOutcome, l0_sample, l0_sample_with_retry
from .lp import LpSketch, LpSketchSpec, LpSketchVector, lp_apply, lp_estimate, stable_abs_median

__all__ = [
    "BlockedL2Sketch",
    "L0Sampler",
    "L0SamplerSpec",
    "L0SamplerState",
    "LpSketch",
    "LpSketchSpec",
    "LpSketchVector",
    "MERSENNE_31",
    "MERSENNE_61",
    "SampleOutcome",
    "blocked_linf_estimate",
    "derive_seed",
    "exact_matmul",
    "l0_sample",
    "l0_sample_with_retry",
    "lp_apply",
    "lp_estimate",
    "modmatmul",
    "stable_abs_median",
]
