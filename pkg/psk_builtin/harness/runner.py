"""Run one protocol over seeded trials and emit the versioned experiment CSV."""

from __future__ import annotations

import csv
import io
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Iterable, TextIO

from psk_core.api import PSKAbstractProtocol
from psk_core.channel import EstimateReport, PairSample, ProtocolSession, SampleStatus, ScalarEstimate
from psk_core.errors import ConfigError
from psk_core.events import EventBus
from psk_core.matrix import HeavyHitterSet, multiply
from psk_core.registry import AmbiguousFeatureError, FeatureNotFoundError, FeatureRegistry

from ..sketches import derive_seed
from .config import ExperimentConfig
from .families import make_instance

logger = logging.getLogger(__name__)

CSV_VERSION_LINE = "# psk-experiment-csv v1"
CSV_COLUMNS = (
    "trial",
    "seed",
    "protocol",
    "family",
    "n",
    "p",
    "eps",
    "phi",
    "kappa",
    "estimate",
    "oracle",
    "ratio",
    "within_guarantee",
    "bits_total",
    "rounds",
    "wall_time_s",
)
_INSTANCE_KEY = 1


@dataclass(frozen=True)
class TrialRow:
    trial: int
    seed: int
    protocol: str
    family: str
    n: int
    p: float
    eps: float
    phi: float
    kappa: float
    estimate: str
    oracle: str
    ratio: str
    within_guarantee: str
    bits_total: int
    rounds: int
    wall_time_s: str = ""

    def as_record(self) -> list[str]:
        return [_cell(getattr(self, column)) for column in CSV_COLUMNS]


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _estimate_cell(report: EstimateReport) -> str:
    result = report.result
    if isinstance(result, ScalarEstimate):
        return _cell(result.value)
    if isinstance(result, HeavyHitterSet):
        return str(len(result))
    if isinstance(result, PairSample):
        if result.status is SampleStatus.OK and result.pair:
            return f"{result.pair[0]}:{result.pair[1]}"
        return result.status.value
    return ""


def _oracle_cell(oracle: Any) -> str:
    if oracle is None:
        return ""
    if isinstance(oracle, (int, float)):
        return _cell(float(oracle))
    return str(len(oracle))


def _ratio_cell(report: EstimateReport, oracle: Any) -> str:
    if not isinstance(report.result, ScalarEstimate) or not isinstance(oracle, (int, float)) or oracle == 0:
        return ""
    return _cell(report.value / float(oracle))


def trial_seed(config: ExperimentConfig, trial: int) -> int:
    return derive_seed(config.seed, trial)


def run_trial(
    config: ExperimentConfig,
    protocol: PSKAbstractProtocol,
    name: str,
    trial: int,
    *,
    use_oracle: bool,
    events: EventBus | None = None,
) -> TrialRow:
    """One seeded trial: draw the instance, run the protocol on a fresh session and score it."""

    seed = trial_seed(config, trial)
    instance = make_instance(config, derive_seed(seed, _INSTANCE_KEY), binary=protocol.requires_binary)
    request = config.request()
    started = time.perf_counter()
    report = protocol.run(instance.a, instance.b, ProtocolSession(seed, protocol=name, events=events), request)
    elapsed = time.perf_counter() - started

    if use_oracle:
        oracle = protocol.oracle(multiply(instance.a, instance.b), request)
    else:
        oracle = instance.planted.get(protocol.statistic)
    within = "" if oracle is None else str(int(protocol.within_guarantee(report, oracle, request)))
    row = TrialRow(
        trial=trial,
        seed=seed,
        protocol=name,
        family=config.family,
        n=config.n,
        p=config.p,
        eps=config.eps,
        phi=config.phi,
        kappa=config.kappa,
        estimate=_estimate_cell(report),
        oracle=_oracle_cell(oracle),
        ratio=_ratio_cell(report, oracle),
        within_guarantee=within,
        bits_total=report.bits_total,
        rounds=report.rounds,
        wall_time_s=format(elapsed, ".6f") if config.record_timing else "",
    )
    if events is not None:
        events.emit("trial_finished", {"trial": trial, "bits_total": row.bits_total, "within": within})
    return row


def run_experiment(
    config: ExperimentConfig, registry: FeatureRegistry, *, events: EventBus | None = None
) -> list[TrialRow]:
    """Run every trial of ``config``; rows come back in trial order whatever the worker count."""

    try:
        entry = registry.resolve(config.protocol, kind="protocol")
    except (FeatureNotFoundError, AmbiguousFeatureError) as exc:
        raise ConfigError("protocol", config.protocol, str(exc)) from exc
    protocol: PSKAbstractProtocol = entry.target()
    use_oracle = config.oracle_enabled()
    logger.info(
        "running %s on %s (n=%d, trials=%d, workers=%d)",
        entry.qualified_name,
        config.family,
        config.n,
        config.trials,
        config.workers,
    )

    def execute(trial: int) -> TrialRow:
        return run_trial(config, protocol, entry.name, trial, use_oracle=use_oracle, events=events)

    if config.workers == 1 or config.trials <= 1:
        rows = [execute(trial) for trial in range(config.trials)]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(execute, range(config.trials)))
    if events is not None:
        events.emit("experiment_finished", {"protocol": entry.name, "trials": len(rows)})
    return rows


def write_csv(rows: Iterable[TrialRow], stream: TextIO) -> None:
    stream.write(CSV_VERSION_LINE + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.as_record())


def rows_to_csv(rows: Iterable[TrialRow]) -> str:
    buffer = io.StringIO()
    write_csv(rows, buffer)
    return buffer.getvalue()
