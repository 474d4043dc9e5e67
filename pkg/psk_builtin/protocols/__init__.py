"""Built-in two-party protocols and their registration helper."""

from __future__ import annotations

from typing import Sequence

from psk_core.registry import FeatureRegistry

from .exchange import AdditiveSplit, index_exchange
from .heavy_hitters import (
    HeavyHitterBounds,
    HHBinaryParams,
    HHBinaryProtocol,
    HHGeneralParams,
    HHGeneralProtocol,
    run_hh_binary,
    run_hh_general,
    thin_units,
)
from .linf_binary import (
    LinfKappaProtocol,
    LinfParams,
    LinfTwoEpsProtocol,
    UniverseSampleParams,
    run_linf_2eps,
    run_linf_kappa,
)
from .linf_general import GeneralLinfParams, LinfGeneralProtocol, run_linf_general
from .lp import (
    L0SampleProtocol,
    L1ExactProtocol,
    L1SampleProtocol,
    LpBaselineProtocol,
    LpEstimateProtocol,
    LpProtocolParams,
    run_l0_sample_matrix,
    run_l1_exact,
    run_l1_sample,
    run_lp_baseline,
    run_lp_estimate,
)

__all__ = [
    "AdditiveSplit",
    "GeneralLinfParams",
    "HHBinaryParams",
    "HHGeneralParams",
    "HeavyHitterBounds",
    "LinfParams",
    "LpProtocolParams",
    "UniverseSampleParams",
    "index_exchange",
    "register_builtin_protocols",
    "run_hh_binary",
    "run_hh_general",
    "run_l0_sample_matrix",
    "run_l1_exact",
    "run_l1_sample",
    "run_linf_2eps",
    "run_linf_general",
    "run_linf_kappa",
    "run_lp_baseline",
    "run_lp_estimate",
    "thin_units",
]

_BUILTIN_PROTOCOLS: Sequence[type] = (
    LpEstimateProtocol,
    LpBaselineProtocol,
    L1ExactProtocol,
    L1SampleProtocol,
    L0SampleProtocol,
    LinfTwoEpsProtocol,
    LinfKappaProtocol,
    LinfGeneralProtocol,
    HHGeneralProtocol,
    HHBinaryProtocol,
)


def register_builtin_protocols(registry: FeatureRegistry) -> None:
    """Register the built-in protocol classes with the supplied registry."""

    registry.register_features(_BUILTIN_PROTOCOLS, origin="builtin")
