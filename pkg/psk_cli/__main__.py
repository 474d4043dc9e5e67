"""``python -m psk_cli`` and the ``psk`` console script."""

from __future__ import annotations

import logging
import os

LOG_LEVEL_ENV = "PSK_LOG_LEVEL"


def _configure_logging(env: dict[str, str] | None = None) -> None:
    level_name = (env if env is not None else os.environ).get(LOG_LEVEL_ENV, "").strip().upper()
    if not level_name:
        return
    level = logging.getLevelName(level_name)
    if not isinstance(level, int):
        logging.getLogger(__name__).warning("ignoring unknown %s=%s", LOG_LEVEL_ENV, level_name)
        return
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def run() -> int:
    from .main import main as cli_main

    _configure_logging()
    return cli_main()


def main() -> int:
    return run()


if __name__ == "__main__":
    raise SystemExit(run())
