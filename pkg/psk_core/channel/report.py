"""Protocol results and the frozen report handed back by ``ProtocolSession.finish``."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Mapping, Union

from psk_core.errors import InvalidInputError
from psk_core.matrix.models import HeavyHitterSet, IndexPair


@dataclass(frozen=True)
class ScalarEstimate:
    value: float

    def __post_init__(self) -> None:
        if self.value != self.value or self.value < 0:
            raise InvalidInputError(f"estimate must be a nonnegative number, got {self.value}")

    def to_dict(self) -> dict[str, Any]:
        return {"type": "scalar", "value": self.value}


class SampleStatus(str, Enum):
    OK = "ok"
    EMPTY = "empty"
    FAIL = "fail"


@dataclass(frozen=True)
class PairSample:
    """Sampled entry of the product, or an explicit empty/failure signal."""

    status: SampleStatus
    pair: IndexPair | None = None

    def __post_init__(self) -> None:
        if (self.status is SampleStatus.OK) != (self.pair is not None):
            raise InvalidInputError("a pair is present exactly when the sample succeeded")

    @classmethod
    def ok(cls, i: int, j: int) -> "PairSample":
        return cls(SampleStatus.OK, (int(i), int(j)))

    @classmethod
    def empty(cls) -> "PairSample":
        return cls(SampleStatus.EMPTY)

    @classmethod
    def failed(cls) -> "PairSample":
        return cls(SampleStatus.FAIL)

    def to_dict(self) -> dict[str, Any]:
        return {"type": "sample", "status": self.status.value, "pair": list(self.pair) if self.pair else None}


EstimateResult = Union[ScalarEstimate, PairSample, HeavyHitterSet]


def result_to_dict(result: EstimateResult) -> dict[str, Any]:
    if isinstance(result, HeavyHitterSet):
        return {"type": "heavy_hitters", **result.to_dict()}
    return result.to_dict()


@dataclass(frozen=True)
class EstimateReport:
    """Immutable outcome of one protocol run with its metered cost."""

    protocol: str
    result: EstimateResult
    bits_total: int
    rounds: int
    seed: int
    bits_by_party: Mapping[str, int]
    seed_bits: int
    output_party: str
    messages: int
    true_value: Any = None
    details: Mapping[str, Any] = field(default_factory=dict)

    @property
    def value(self) -> float:
        """Scalar estimate; raises for sample and heavy-hitter results."""

        if not isinstance(self.result, ScalarEstimate):
            raise InvalidInputError(f"{self.protocol} did not produce a scalar estimate")
        return self.result.value

    def with_true_value(self, value: Any) -> "EstimateReport":
        return replace(self, true_value=value)

    def to_dict(self) -> dict[str, Any]:
        true_value = self.true_value
        if isinstance(true_value, (set, frozenset)):
            true_value = sorted(list(pair) for pair in true_value)
        return {
            "protocol": self.protocol,
            "result": result_to_dict(self.result),
            "true_value": true_value,
            "bits_total": self.bits_total,
            "rounds": self.rounds,
            "seed": self.seed,
            "bits_by_party": dict(self.bits_by_party),
            "seed_bits": self.seed_bits,
            "output_party": self.output_party,
            "messages": self.messages,
            "details": dict(self.details),
        }
