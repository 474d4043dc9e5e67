"""Built-in ``summarize`` command."""

from __future__ import annotations

from argparse import ArgumentParser, Namespace
from pathlib import Path

from psk_builtin.harness import format_summary, summarize
from psk_core.api import PSKAbstractCommand, pskcommand
from psk_core.errors import InvalidInputError


@pskcommand(name="summarize", group="psk")
class SummarizeCommand(PSKAbstractCommand):
    """Group an experiment CSV by configuration and report success rate and median cost."""

    @classmethod
    def configure(cls, parser: ArgumentParser) -> None:
        parser.add_argument("path", type=Path, help="CSV written by 'psk run'.")
        parser.add_argument("--format", dest="output_format", choices=("text", "json"), default="text")

    def run(self, argv: Namespace) -> int:
        try:
            text = argv.path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InvalidInputError(f"cannot read {argv.path}: {exc}") from exc
        print(format_summary(summarize(text), argv.output_format))
        return 0
