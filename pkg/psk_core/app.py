"""``PSKApp``: the registry, event bus and constant resolution for one CLI invocation."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Mapping

from psk_core.config import ConfigResolver, ProtocolConstants
from psk_core.events import EventBus
from psk_core.paths import UserDirs
from psk_core.registry import FeatureRegistry

logger = logging.getLogger(__name__)


class PSKApp:
    """Holds what commands share; constants are resolved on first use only."""

    def __init__(
        self,
        *,
        start_dir: Path | str | None = None,
        user_dirs: UserDirs | None = None,
        cli_overrides: Mapping[str, Any] | None = None,
        env: Mapping[str, str] | None = None,
    ) -> None:
        self.start_dir = Path(start_dir) if start_dir is not None else None
        self.user_dirs = user_dirs or UserDirs.from_env(env)
        self.resolver = ConfigResolver(user_dirs=self.user_dirs, cli_overrides=cli_overrides, env=env)
        self.events = EventBus()
        self.feature_registry = FeatureRegistry()
        self._constants: ProtocolConstants | None = None

    @property
    def constants(self) -> ProtocolConstants:
        if self._constants is None:
            self._constants = self.resolver.load_constants(self.start_dir)
        return self._constants

    def bootstrap(self) -> "PSKApp":
        """Register the builtin commands and protocols once."""

        if len(self.feature_registry):
            return self
        from psk_builtin.protocols import register_builtin_protocols
        from psk_core.builtins import register_builtin_commands

        register_builtin_commands(self.feature_registry)
        register_builtin_protocols(self.feature_registry)
        logger.debug("registered %s", ", ".join(self.feature_registry.display_names()))
        return self
