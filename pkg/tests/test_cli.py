"""Behavioral tests for the psk CLI dispatcher."""

from __future__ import annotations

import importlib
import json
from pathlib import Path

import pytest

from psk_builtin.harness import CSV_VERSION_LINE, read_csv_rows
from psk_cli import __main__ as cli_entry

cli_main = importlib.import_module("psk_cli.main")


def test_console_module_entrypoint_delegates_to_cli_main(monkeypatch: pytest.MonkeyPatch) -> None:
    module = importlib.import_module("psk_cli.main")
    monkeypatch.setattr(module, "main", lambda: 7)

    assert cli_entry.run() == 7
    assert cli_entry.main() == 7


def test_overview_lists_commands(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli_main.main([]) == 0
    out = capsys.readouterr().out
    for name in ("run", "summarize", "gen", "help"):
        assert f"  {name}" in out


def test_version_flag(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli_main.main(["--version"]) == 0
    assert capsys.readouterr().out.startswith("psk v")


def test_unknown_command_returns_one(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli_main.main(["does-not-exist"]) == 1
    assert "does-not-exist" in capsys.readouterr().err


def test_run_list_shows_protocols(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli_main.main(["run", "--list"]) == 0
    out = capsys.readouterr().out
    for name in ("lp", "l1-exact", "linf-2eps", "linf-general", "hh-binary"):
        assert name in out
    assert "(binary inputs)" in out


def test_run_writes_csv_and_summarize_reads_it(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    out = tmp_path / "runs" / "lp.csv"
    code = cli_main.main(["run", "--protocol", "lp", "--n", "16", "--trials", "2", "--seed", "9", "--out", str(out)])
    assert code == 0
    text = out.read_text(encoding="utf-8")
    assert text.startswith(CSV_VERSION_LINE)
    assert [row["rounds"] for row in read_csv_rows(text)] == ["2", "2"]

    capsys.readouterr()
    assert cli_main.main(["summarize", str(out), "--format", "json"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary[0]["protocol"] == "lp"
    assert summary[0]["trials"] == 2


def test_run_from_yaml_config(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    config = tmp_path / "exp.yaml"
    config.write_text("protocol: l1-exact\nn: 8\ntrials: 1\n", encoding="utf-8")
    assert cli_main.main(["run", "--config", str(config), "--trials", "3"]) == 0
    rows = read_csv_rows(capsys.readouterr().out)
    assert len(rows) == 3
    assert all(row["within_guarantee"] == "1" for row in rows)


def test_run_without_protocol_is_a_usage_error(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli_main.main(["run", "--n", "8"]) == 2
    assert "protocol" in capsys.readouterr().err


def test_gen_then_run_on_stored_instance(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code = cli_main.main(["gen", "disj", "--x", "1011", "--y", "0010", "--out", str(tmp_path), "--stem", "disj"])
    assert code == 0
    metadata = json.loads(capsys.readouterr().out)
    assert metadata["planted_linf"] == 2
    assert (tmp_path / "disj.A.txt").exists()

    code = cli_main.main(
        ["run", "--protocol", "linf-2eps", "--family", "file", "--file", str(tmp_path / "disj"), "--trials", "1"]
    )
    assert code == 0
    rows = read_csv_rows(capsys.readouterr().out)
    assert rows[0]["oracle"] == "2"
    assert rows[0]["rounds"] == "3"


def test_gen_rejects_missing_vectors(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    assert cli_main.main(["gen", "disj", "--out", str(tmp_path)]) == 2
    assert "--x" in capsys.readouterr().err


def test_summarize_missing_file(tmp_path: Path) -> None:
    assert cli_main.main(["summarize", str(tmp_path / "missing.csv")]) == 2


def test_gen_defaults_to_the_user_instance_store(
    monkeypatch: pytest.MonkeyPatch, tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    monkeypatch.setenv("PSK_DATA_DIR", str(tmp_path))
    assert cli_main.main(["gen", "sum", "--n", "12", "--k", "3", "--seed", "1"]) == 0
    assert (tmp_path / "instances" / "instance.A.txt").exists()
    assert json.loads(capsys.readouterr().out)["n"] == 12


def test_help_describes_a_protocol(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli_main.main(["help", "linf-2eps"]) == 0
    out = capsys.readouterr().out
    assert "statistic: linf" in out
    assert "binary matrices" in out
    assert "Usage: psk <command>" not in out


def test_help_shows_command_flags(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli_main.main(["help", "summarize"]) == 0
    assert "usage: psk summarize" in capsys.readouterr().out


def test_help_for_unknown_topic_suggests_names(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli_main.main(["help", "l1-exakt"]) == 2
    assert "l1-exact" in capsys.readouterr().err


def test_log_level_environment_configures_logging(monkeypatch: pytest.MonkeyPatch) -> None:
    calls: list[dict] = []
    monkeypatch.setattr(cli_entry.logging, "basicConfig", lambda **kwargs: calls.append(kwargs))
    cli_entry._configure_logging({"PSK_LOG_LEVEL": "debug"})
    cli_entry._configure_logging({"PSK_LOG_LEVEL": "chatty"})
    cli_entry._configure_logging({})
    assert [call["level"] for call in calls] == [cli_entry.logging.DEBUG]
