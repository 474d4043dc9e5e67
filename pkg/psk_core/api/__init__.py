"""Convenience imports for prodsketch API helpers."""

from .abc import PSKAbstractCommand, PSKAbstractProtocol
from .decorators import STATISTICS, default_feature_name, pskcommand, pskprotocol
from .request import ProtocolRequest

__all__ = [
    "STATISTICS",
    "default_feature_name",
    "PSKAbstractCommand",
    "PSKAbstractProtocol",
    "ProtocolRequest",
    "pskcommand",
    "pskprotocol",
]
