"""Convenience exports for the registry helpers."""

from .entry import FEATURE_ATTRIBUTE, PSKRegistryEntry
from .errors import (
    AmbiguousFeatureError,
    FeatureCollisionError,
    FeatureNotFoundError,
    FeatureRegistryError,
)
from .registry import FeatureRegistry

__all__ = [
    "FEATURE_ATTRIBUTE",
    "PSKRegistryEntry",
    "FeatureRegistry",
    "FeatureRegistryError",
    "FeatureCollisionError",
    "FeatureNotFoundError",
    "AmbiguousFeatureError",
]
