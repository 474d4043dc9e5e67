"""Abstract base classes for prodsketch features."""

from __future__ import annotations

from abc import ABC, abstractmethod
from argparse import ArgumentParser, Namespace
from typing import TYPE_CHECKING, Any, ClassVar

if TYPE_CHECKING:
    from psk_core.api.request import ProtocolRequest
    from psk_core.channel.report import EstimateReport
    from psk_core.channel.session import ProtocolSession
    from psk_core.matrix.models import SparseIntMatrix


class PSKAbstractCommand(ABC):
    """Base interface for prodsketch commands."""

    @classmethod
    @abstractmethod
    def configure(cls, parser: ArgumentParser) -> None:
        """Let the command configure CLI arguments."""

    @abstractmethod
    def run(self, argv: Namespace) -> int:
        """Execute the command with parsed arguments."""


class PSKAbstractProtocol(ABC):
    """Base interface for two-party protocols runnable from the harness.

    ``statistic`` names what the protocol estimates (``lp``, ``l1``, ``linf``,
    ``hh`` or ``sample``) and ``guarantee`` is the one-line claim listed by
    ``psk run --list``.
    """

    statistic: ClassVar[str]
    guarantee: ClassVar[str]
    requires_binary: ClassVar[bool] = False

    @abstractmethod
    def run(
        self,
        a: "SparseIntMatrix",
        b: "SparseIntMatrix",
        session: "ProtocolSession",
        request: "ProtocolRequest",
    ) -> "EstimateReport":
        """Execute the protocol on a fresh session and return its finished report."""

    @abstractmethod
    def oracle(self, c: "SparseIntMatrix", request: "ProtocolRequest") -> Any:
        """Return the exact statistic of the product ``c``."""

    @abstractmethod
    def within_guarantee(self, report: "EstimateReport", oracle: Any, request: "ProtocolRequest") -> bool:
        """Decide whether ``report`` meets the protocol's claimed guarantee."""
