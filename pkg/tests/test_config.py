"""Layered configuration of protocol constants and experiment files."""

from __future__ import annotations

from pathlib import Path

import pytest

from psk_builtin.harness import ExperimentConfig
from psk_core.config import ConfigResolver, ProtocolConstants, resolve_env_value
from psk_core.errors import ConfigError
from psk_core.paths import UserDirs


def _user_dirs(tmp_path: Path) -> UserDirs:
    return UserDirs(config_root=tmp_path / "user-config", data_root=tmp_path / "data")


def test_defaults_match_documented_constants() -> None:
    constants = ProtocolConstants()
    assert constants.sketch_constant == 6.0
    assert constants.c_rho == 8.0
    assert constants.c_gamma == 8.0
    assert constants.c_alpha == 1.0
    assert constants.blocked_group_size == 6
    assert constants.oracle_cutoff == 512


def test_resolution_order_cli_env_workspace_user(tmp_path: Path) -> None:
    user_dir = tmp_path / "user-config"
    user_dir.mkdir()
    (user_dir / "psk.toml").write_text("[constants]\nc_rho = 2\nc_gamma = 3\nc_alpha = 4\n")
    workspace = tmp_path / "ws" / "nested"
    workspace.mkdir(parents=True)
    (tmp_path / "ws" / "psk.toml").write_text("c_gamma = 5\nc_alpha = 6\n")

    resolver = ConfigResolver(
        user_dirs=_user_dirs(tmp_path),
        cli_overrides={"c-alpha": 7},
        env={"PSK_C_GAMMA": "9"},
    )
    constants = resolver.load_constants(workspace)

    assert constants.c_rho == 2.0
    assert constants.c_gamma == 9.0
    assert constants.c_alpha == 7.0
    assert constants.sketch_constant == 6.0


def test_invalid_constant_names_the_key(tmp_path: Path) -> None:
    resolver = ConfigResolver(user_dirs=_user_dirs(tmp_path), cli_overrides={"c_rho": "lots"}, env={})
    with pytest.raises(ConfigError) as excinfo:
        resolver.load_constants(tmp_path)
    assert excinfo.value.key == "c_rho"


def test_boost_reps_must_be_odd() -> None:
    with pytest.raises(ConfigError):
        ProtocolConstants(boost_reps=2)


def test_env_placeholder_expansion(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("PSK_TEST_EPS", "0.3")
    assert resolve_env_value("${PSK_TEST_EPS}") == "0.3"
    assert resolve_env_value(5) == 5


def test_experiment_yaml_with_cli_overrides(tmp_path: Path) -> None:
    path = tmp_path / "exp.yml"
    path.write_text(
        "protocol: lp\nfamily: planted-max\nn: 16\neps: 0.5\ntrials: 3\nconstants:\n  c_rho: 4\nc_gamma: 2\n"
    )

    config = ExperimentConfig.from_yaml(path, overrides={"n": 24, "eps": None, "c_rho": 5})

    assert config.protocol == "lp"
    assert config.family == "planted-max"
    assert config.n == 24
    assert config.eps == 0.5
    assert config.constants.c_rho == 5.0
    assert config.constants.c_gamma == 2.0
    assert config.request().eps == 0.5


@pytest.mark.parametrize(
    "overrides",
    [
        {"protocol": ""},
        {"protocol": "lp", "family": "nope"},
        {"protocol": "lp", "eps": 1.5},
        {"protocol": "lp", "boost_reps": 4},
        {"protocol": "lp", "family": "disj-embed", "n": 7},
        {"protocol": "lp", "family": "file"},
    ],
)
def test_experiment_validation_rejects_bad_values(overrides: dict) -> None:
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping(overrides)


def test_oracle_cutoff_disables_oracle(caplog: pytest.LogCaptureFixture) -> None:
    config = ExperimentConfig.from_mapping({"protocol": "lp", "n": 64, "oracle_cutoff": 32})
    assert not config.oracle_enabled()
    assert "oracle cutoff" in caplog.text


def test_user_dirs_follow_environment_roots(tmp_path: Path) -> None:
    dirs = UserDirs.from_env({"PSK_CONFIG_DIR": str(tmp_path / "cfg"), "PSK_DATA_DIR": str(tmp_path / "data")})
    assert dirs.config_file("psk.toml") == tmp_path / "cfg" / "psk.toml"
    assert dirs.instances_dir() == tmp_path / "data" / "instances"
    assert UserDirs.from_env({}).config_dir().name.lower() == "prodsketch"


def test_resolver_reads_user_config_from_environment_root(tmp_path: Path) -> None:
    (tmp_path / "cfg").mkdir()
    (tmp_path / "cfg" / "psk.toml").write_text("[constants]\nhh_constant = 3\n")
    resolver = ConfigResolver(env={"PSK_CONFIG_DIR": str(tmp_path / "cfg")})
    assert resolver.load_constants(tmp_path).hh_constant == 3.0
