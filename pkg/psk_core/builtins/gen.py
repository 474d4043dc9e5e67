"""Built-in ``gen`` command: write hard instances to disk."""

from __future__ import annotations

import json
import logging
from argparse import ArgumentParser, Namespace
from pathlib import Path
from typing import Any

from psk_builtin.hardgen import (
    gen_disj_embedding,
    gen_gapinf_embedding,
    gen_join_instance,
    gen_sum_instance,
    save_instance,
)
from psk_core.api import PSKAbstractCommand, pskcommand
from psk_core.errors import InvalidInputError
from psk_core.matrix import SparseIntMatrix
from psk_core.paths import UserDirs

logger = logging.getLogger(__name__)

GENERATORS = ("disj", "gapinf", "sum", "join")


def parse_vector(text: str) -> list[int]:
    """``"1010"`` reads as bits; comma-separated text reads as integers."""

    cleaned = text.strip()
    try:
        if "," in cleaned:
            return [int(part) for part in cleaned.split(",") if part.strip()]
        return [int(char) for char in cleaned]
    except ValueError as exc:
        raise InvalidInputError(f"cannot read vector {text!r}") from exc


def parse_pairs(tokens: list[str]) -> list[tuple[int, int]]:
    pairs = []
    for token in tokens:
        left, sep, right = token.partition(":")
        if not sep:
            raise InvalidInputError(f"expected a pair like 3:5, got {token!r}")
        try:
            pairs.append((int(left), int(right)))
        except ValueError as exc:
            raise InvalidInputError(f"expected a pair like 3:5, got {token!r}") from exc
    return pairs


@pskcommand(name="gen", group="psk")
class GenCommand(PSKAbstractCommand):
    """Generate a hard instance (disj, gapinf, sum or join) and store it as A, B plus metadata.

    The metadata record is echoed to stdout as JSON.
    """

    @classmethod
    def configure(cls, parser: ArgumentParser) -> None:
        parser.add_argument("generator", choices=GENERATORS)
        parser.add_argument("--x", help="Alice's vector: bits like 1010 or comma-separated integers.")
        parser.add_argument("--y", help="Bob's vector, same format as --x.")
        parser.add_argument("--kappa", type=float, default=4.0)
        parser.add_argument("--n", type=int, help="Dimension of the sum instance.")
        parser.add_argument("--k", type=int, help="Block count of the sum instance.")
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--left", nargs="*", default=[], help="Pairs i:k of the left relation.")
        parser.add_argument("--right", nargs="*", default=[], help="Pairs k:j of the right relation.")
        parser.add_argument("--out", type=Path, help="Instance directory (default: the user instance store).")
        parser.add_argument("--stem", default="instance")

    def run(self, argv: Namespace) -> int:
        a, b, metadata = self._generate(argv)
        out = argv.out if argv.out is not None else UserDirs.from_env().instances_dir()
        paths = save_instance(a, b, metadata, out, argv.stem)
        logger.info("generated %s instance at %s", argv.generator, paths.a.parent)
        print(json.dumps(metadata, sort_keys=True))
        return 0

    @staticmethod
    def _generate(argv: Namespace) -> tuple[SparseIntMatrix, SparseIntMatrix, dict[str, Any]]:
        if argv.generator in ("disj", "gapinf"):
            if argv.x is None or argv.y is None:
                raise InvalidInputError(f"{argv.generator} needs --x and --y")
            x, y = parse_vector(argv.x), parse_vector(argv.y)
            if argv.generator == "disj":
                embedding = gen_disj_embedding(x, y)
            else:
                embedding = gen_gapinf_embedding(x, y, int(argv.kappa))
            return embedding.a, embedding.b, embedding.to_metadata()
        if argv.generator == "sum":
            if argv.n is None:
                raise InvalidInputError("sum needs --n")
            instance = gen_sum_instance(argv.n, argv.k, argv.seed, kappa=argv.kappa)
            return instance.a, instance.b, instance.to_metadata()
        join = gen_join_instance(parse_pairs(argv.left), parse_pairs(argv.right))
        return join.a, join.b, join.to_metadata()
