"""Built-in ``run`` command: drive the experiment harness from flags or a YAML file."""

from __future__ import annotations

import logging
import sys
from argparse import ArgumentParser, BooleanOptionalAction, Namespace
from pathlib import Path
from typing import Any

from psk_builtin.harness import FAMILIES, ExperimentConfig, run_experiment, write_csv
from psk_core.api import PSKAbstractCommand, pskcommand
from psk_core.events import HARNESS_EVENTS, Event
from psk_core.registry import FeatureRegistry

logger = logging.getLogger(__name__)

_EXPERIMENT_FLAGS = (
    "protocol",
    "family",
    "n",
    "density",
    "p",
    "eps",
    "phi",
    "kappa",
    "trials",
    "seed",
    "boost_reps",
    "oracle",
    "record_timing",
    "workers",
    "file",
)
_CONSTANT_FLAGS = ("c_rho", "c_gamma", "c_alpha", "sketch_constant", "hh_constant")


def format_protocol_listing(registry: FeatureRegistry) -> str:
    lines = []
    for entry in registry.entries(kind="protocol"):
        binary = " (binary inputs)" if entry.requires_binary else ""
        lines.append(f"{entry.name:<14} {entry.statistic:<7} {entry.guarantee}{binary}")
    return "\n".join(lines)


def _log_progress(event: Event) -> None:
    logger.debug("%s %s", event.name, event.payload)


@pskcommand(name="run", group="psk")
class RunCommand(PSKAbstractCommand):
    """Run a protocol over seeded trials of an instance family and write the experiment CSV.

    Flags override values from --config; constants resolve from flags, the
    environment, psk.toml, then defaults.
    """

    @classmethod
    def configure(cls, parser: ArgumentParser) -> None:
        parser.add_argument("--list", action="store_true", help="List registered protocols and exit.")
        parser.add_argument("--config", type=Path, help="YAML experiment file.")
        parser.add_argument("--protocol")
        parser.add_argument("--family", choices=FAMILIES)
        parser.add_argument("--n", type=int)
        parser.add_argument("--density", type=float)
        parser.add_argument("--p", type=float)
        parser.add_argument("--eps", type=float)
        parser.add_argument("--phi", type=float)
        parser.add_argument("--kappa", type=float)
        parser.add_argument("--trials", type=int)
        parser.add_argument("--seed", type=int)
        parser.add_argument("--boost", dest="boost_reps", type=int, help="Odd number of median repetitions.")
        parser.add_argument("--oracle", action=BooleanOptionalAction, default=None)
        parser.add_argument("--record-timing", dest="record_timing", action="store_true", default=None)
        parser.add_argument("--workers", type=int)
        parser.add_argument("--file", type=Path, help="Stored instance directory or <directory>/<stem>.")
        parser.add_argument("--out", type=Path, help="CSV destination (default: stdout).")
        parser.add_argument("--c-rho", dest="c_rho", type=float)
        parser.add_argument("--c-gamma", dest="c_gamma", type=float)
        parser.add_argument("--c-alpha", dest="c_alpha", type=float)
        parser.add_argument("--sketch-constant", dest="sketch_constant", type=float)
        parser.add_argument("--hh-constant", dest="hh_constant", type=float)
        parser.add_argument("-v", "--verbose", action="store_true")

    def run(self, argv: Namespace) -> int:
        logging.basicConfig(level=logging.DEBUG if argv.verbose else logging.WARNING)
        from psk_core.app import PSKApp

        constant_flags = {key: getattr(argv, key) for key in _CONSTANT_FLAGS}
        app = PSKApp(cli_overrides=constant_flags)
        app.bootstrap()
        if argv.list:
            print(format_protocol_listing(app.feature_registry))
            return 0

        config = self._load_config(argv, app)
        for name in HARNESS_EVENTS:
            app.events.on(name, _log_progress)
        rows = run_experiment(config, app.feature_registry, events=app.events)
        if argv.out is None:
            write_csv(rows, sys.stdout)
        else:
            argv.out.parent.mkdir(parents=True, exist_ok=True)
            with argv.out.open("w", encoding="utf-8", newline="") as handle:
                write_csv(rows, handle)
            logger.info("wrote %d trials to %s", len(rows), argv.out)
        return 0

    @staticmethod
    def _load_config(argv: Namespace, app: Any) -> ExperimentConfig:
        overrides = {key: getattr(argv, key) for key in (*_EXPERIMENT_FLAGS, *_CONSTANT_FLAGS)}
        overrides = {key: value for key, value in overrides.items() if value is not None}
        constants = app.constants
        if argv.config is not None:
            return ExperimentConfig.from_yaml(argv.config, constants=constants, overrides=overrides)
        return ExperimentConfig.from_mapping(overrides, constants=constants)
