"""``psk`` dispatcher: resolve a command from the registry, parse its flags, run it."""

from __future__ import annotations

import argparse
import inspect
import sys
from typing import Sequence

from psk_core.app import PSKApp
from psk_core.errors import PSKError
from psk_core.registry import AmbiguousFeatureError, FeatureNotFoundError, FeatureRegistry

CLI_VERSION = "0.1.0"

EXIT_OK = 0
EXIT_UNKNOWN_COMMAND = 1
EXIT_FAILED = 2


def main(argv: Sequence[str] | None = None) -> int:
    """Run ``psk <command> [args...]`` and return the process exit code."""

    tokens = list(sys.argv[1:] if argv is None else argv)
    if tokens in ([], ["-h"], ["--help"]):
        return print_overview(_booted_registry())
    if tokens in (["--version"], ["-V"]):
        print(f"psk v{CLI_VERSION}")
        return EXIT_OK

    registry = _booted_registry()
    name, args = tokens[0], tokens[1:]
    try:
        entry = registry.resolve(name, kind="command")
    except FeatureNotFoundError as exc:
        print(f"psk: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_COMMAND
    except AmbiguousFeatureError as exc:
        print(f"psk: {name!r} matches {', '.join(exc.candidates)}; use group:name.", file=sys.stderr)
        return EXIT_UNKNOWN_COMMAND

    shown = entry.qualified_name if entry.qualified_name in registry.display_names(kind="command") else entry.name
    parser = argparse.ArgumentParser(prog=f"psk {shown}", description=inspect.getdoc(entry.target))
    entry.target.configure(parser)
    try:
        namespace = parser.parse_args(args)
    except SystemExit as exc:
        return int(exc.code or 0)

    command = entry.target()
    try:
        code = command.run(namespace)
    except PSKError as exc:
        print(f"psk {entry.name}: {exc}", file=sys.stderr)
        return EXIT_FAILED

    if entry.name == "help" and not getattr(command, "handled", False):
        return print_overview(registry, include_long=getattr(command, "long_format", False))
    return EXIT_OK if code is None else int(code)


def print_overview(registry: FeatureRegistry, *, include_long: bool = False) -> int:
    """Print commands with their summaries, then the protocol names."""

    print("Usage: psk <command> [args...]\n")
    print("Commands:")
    for display in registry.display_names(kind="command"):
        entry = registry.resolve(display, kind="command")
        print(f"  {display:<20} {entry.summary}")
        if include_long:
            body = (inspect.getdoc(entry.target) or "").splitlines()[1:]
            for line in filter(str.strip, body):
                print(f"    {line}")
    protocols = registry.display_names(kind="protocol")
    if protocols:
        print(f"\nProtocols: {', '.join(protocols)}")
    print("\nUse 'psk run --list' to see the registered protocols and 'psk help <name>' for details.")
    return EXIT_OK


def _booted_registry() -> FeatureRegistry:
    return PSKApp().bootstrap().feature_registry
