"""Command-line entrypoint for prodsketch."""

from .main import main

__all__ = ["main"]
