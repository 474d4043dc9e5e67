"""Experiment harness: trial runner, CSV output and summaries."""

from __future__ import annotations

from pathlib import Path

import pytest

from psk_builtin.harness import (
    CSV_COLUMNS,
    CSV_VERSION_LINE,
    ExperimentConfig,
    format_summary,
    make_instance,
    read_csv_rows,
    rows_to_csv,
    run_experiment,
    summarize,
)
from psk_builtin.protocols import register_builtin_protocols
from psk_core.errors import ConfigError, MalformedCSVError
from psk_core.events import EventBus
from psk_core.matrix import lp_norm_pow, multiply
from psk_core.registry import FeatureRegistry

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture()
def registry() -> FeatureRegistry:
    registry = FeatureRegistry()
    register_builtin_protocols(registry)
    return registry


def test_zero_trials_writes_only_the_header(registry: FeatureRegistry) -> None:
    rows = run_experiment(ExperimentConfig(protocol="lp", trials=0), registry)
    assert rows == []
    assert rows_to_csv(rows).splitlines() == [CSV_VERSION_LINE, ",".join(CSV_COLUMNS)]


def test_same_seed_gives_identical_csv(registry: FeatureRegistry) -> None:
    config = ExperimentConfig(protocol="lp", n=16, trials=3, seed=42)
    assert rows_to_csv(run_experiment(config, registry)) == rows_to_csv(run_experiment(config, registry))


def test_worker_count_does_not_change_rows(registry: FeatureRegistry) -> None:
    config = ExperimentConfig(protocol="lp", n=16, trials=4, seed=3)
    serial = rows_to_csv(run_experiment(config, registry))
    threaded = rows_to_csv(run_experiment(ExperimentConfig(protocol="lp", n=16, trials=4, seed=3, workers=3), registry))
    assert serial == threaded


def test_lp_rows_report_two_rounds(registry: FeatureRegistry) -> None:
    events = EventBus()
    finished: list[int] = []
    events.on("trial_finished", lambda event: finished.append(event.payload["trial"]))
    rows = run_experiment(ExperimentConfig(protocol="lp", n=32, trials=3, seed=5), registry, events=events)
    assert [row.trial for row in rows] == [0, 1, 2]
    assert all(row.rounds == 2 for row in rows)
    assert all(row.bits_total > 64 for row in rows)
    assert all(row.within_guarantee in ("0", "1") for row in rows)
    assert sorted(finished) == [0, 1, 2]


def test_oracle_disabled_leaves_columns_empty(registry: FeatureRegistry) -> None:
    rows = run_experiment(ExperimentConfig(protocol="l1-exact", n=16, trials=2, oracle=False), registry)
    assert all(row.oracle == "" and row.within_guarantee == "" for row in rows)


def test_planted_families() -> None:
    config = ExperimentConfig(protocol="hh-binary", family="planted-hh", n=32)
    instance = make_instance(config, 7, binary=True)
    c = multiply(instance.a, instance.b)
    assert instance.planted["l1"] == lp_norm_pow(c, 1)
    i, j = instance.planted["heavy_pair"]
    assert c.get(i, j) / lp_norm_pow(c, 1) == pytest.approx(instance.planted["heavy_fraction"])

    disj = make_instance(ExperimentConfig(protocol="linf-2eps", family="disj-embed", n=16), 1, binary=True)
    assert disj.planted["linf"] in (0, 1, 2)


def test_config_rejects_bad_values() -> None:
    with pytest.raises(ConfigError) as excinfo:
        ExperimentConfig(protocol="lp", family="nope")
    assert excinfo.value.key == "family"
    with pytest.raises(ConfigError):
        ExperimentConfig(protocol="lp", boost_reps=2)
    with pytest.raises(ConfigError):
        ExperimentConfig(protocol="lp", family="disj-embed", n=15)


def test_config_from_yaml_with_overrides(tmp_path: Path) -> None:
    path = tmp_path / "exp.yaml"
    path.write_text("protocol: lp\nn: 64\ntrials: 5\nconstants:\n  c_rho: 2.5\n", encoding="utf-8")
    config = ExperimentConfig.from_yaml(path, overrides={"trials": 2, "seed": None})
    assert config.protocol == "lp"
    assert config.n == 64
    assert config.trials == 2
    assert config.constants.c_rho == 2.5


def test_summarize_fixture() -> None:
    summary = summarize((FIXTURES / "summary.csv").read_text(encoding="utf-8"))
    by_protocol = {row.protocol: row for row in summary}
    lp = by_protocol["lp"]
    assert lp.trials == 3
    assert lp.success_rate == pytest.approx(2 / 3)
    assert lp.median_bits == 2000.0
    assert lp.median_rounds == 2.0
    exact = by_protocol["l1-exact"]
    assert exact.scored == 0
    assert exact.success_rate is None
    assert exact.median_bits == 600.0
    assert "no trials" == format_summary([])
    assert '"protocol": "lp"' in format_summary(summary, "json")


def test_empty_text_is_an_empty_experiment() -> None:
    assert read_csv_rows("") == []
    assert summarize("   \n") == []


@pytest.mark.parametrize(
    "text",
    [
        "trial,seed\n0,1\n",
        CSV_VERSION_LINE + "\ntrial,seed\n",
        CSV_VERSION_LINE + "\n" + ",".join(CSV_COLUMNS) + "\n0,1,lp\n",
        CSV_VERSION_LINE + "\n" + ",".join(CSV_COLUMNS) + "\n0,1,lp,random-density,x,1,0.25,0.5,4,1,1,1,1,10,2,\n",
        CSV_VERSION_LINE + "\n" + ",".join(CSV_COLUMNS) + "\n0,1,lp,random-density,8,1,0.25,0.5,4,1,1,1,2,10,2,\n",
    ],
)
def test_malformed_csv_rejected(text: str) -> None:
    with pytest.raises(MalformedCSVError):
        summarize(text)


def test_unknown_protocol_is_a_config_error(registry: FeatureRegistry) -> None:
    with pytest.raises(ConfigError) as excinfo:
        run_experiment(ExperimentConfig(protocol="l1-exakt", trials=1), registry)
    assert excinfo.value.key == "protocol"
    assert "l1-exact" in str(excinfo.value)
