"""Built-in ``help`` command."""

from __future__ import annotations

import inspect
from argparse import ArgumentParser, Namespace

from psk_core.api import PSKAbstractCommand, pskcommand
from psk_core.errors import InvalidInputError
from psk_core.registry import AmbiguousFeatureError, FeatureNotFoundError, FeatureRegistry, PSKRegistryEntry


def describe_protocol(entry: PSKRegistryEntry) -> str:
    lines = [
        f"{entry.name} ({entry.qualified_name})",
        f"  statistic: {entry.statistic}",
        f"  guarantee: {entry.guarantee}",
        f"  inputs:    {'binary matrices' if entry.requires_binary else 'integer matrices'}",
    ]
    doc = inspect.getdoc(entry.target) or ""
    body = [line for line in doc.splitlines()[1:] if line.strip()]
    if body:
        lines.append("")
        lines.extend(f"  {line}" for line in body)
    return "\n".join(lines)


def _lookup(registry: FeatureRegistry, topic: str) -> PSKRegistryEntry:
    misses: list[FeatureNotFoundError] = []
    for kind in ("command", "protocol"):
        try:
            return registry.resolve(topic, kind=kind)
        except FeatureNotFoundError as exc:
            misses.append(exc)
        except AmbiguousFeatureError as exc:
            raise InvalidInputError(f"{topic!r} is ambiguous: {', '.join(exc.candidates)}") from exc
    hints = sorted({name for miss in misses for name in miss.suggestions})
    suffix = f"; did you mean {', '.join(hints)}?" if hints else ""
    raise InvalidInputError(f"no command or protocol named {topic!r}{suffix}")


@pskcommand(name="help", group="psk")
class HelpCommand(PSKAbstractCommand):
    """Show available commands, or describe one command or protocol.

    Pass --long to include each command's full description.
    """

    handled = False

    @classmethod
    def configure(cls, parser: ArgumentParser) -> None:
        parser.add_argument("topic", nargs="?", help="Command or protocol name.")
        parser.add_argument(
            "--long",
            action="store_true",
            dest="long_format",
            help="Include the full description of every command.",
        )

    def run(self, argv: Namespace) -> int:
        self.long_format = bool(getattr(argv, "long_format", False))
        topic = getattr(argv, "topic", None)
        if not topic:
            return 0

        from psk_core.app import PSKApp

        entry = _lookup(PSKApp().bootstrap().feature_registry, topic)
        if entry.kind == "protocol":
            print(describe_protocol(entry))
        else:
            parser = ArgumentParser(prog=f"psk {entry.name}", description=inspect.getdoc(entry.target))
            entry.target.configure(parser)
            parser.print_help()
        self.handled = True
        return 0
