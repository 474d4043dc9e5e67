"""Harness-facing parameter bundle shared by every protocol."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from psk_core.config import ProtocolConstants


@dataclass(frozen=True)
class ProtocolRequest:
    """Full parameter surface of a protocol invocation.

    Each protocol reads the fields it needs and validates them itself.
    """

    p: float = 1.0
    eps: float = 0.25
    phi: float = 0.5
    kappa: float = 4.0
    boost_reps: int = 1
    constants: ProtocolConstants = field(default_factory=ProtocolConstants)

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "eps": self.eps,
            "phi": self.phi,
            "kappa": self.kappa,
            "boost_reps": self.boost_reps,
            "constants": self.constants.to_dict(),
        }
