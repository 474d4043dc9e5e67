"""Group experiment CSV rows by configuration and report success rates and medians."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from typing import Any, Sequence

import numpy as np

from psk_core.errors import MalformedCSVError

from .runner import CSV_COLUMNS, CSV_VERSION_LINE

GROUP_KEYS = ("protocol", "family", "n", "p", "eps", "phi", "kappa")


@dataclass(frozen=True)
class SummaryRow:
    protocol: str
    family: str
    n: int
    p: float
    eps: float
    phi: float
    kappa: float
    trials: int
    scored: int
    success_rate: float | None
    median_bits: float
    median_rounds: float

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def read_csv_rows(text: str) -> list[dict[str, str]]:
    """Parse a versioned experiment CSV; empty text is an empty experiment."""

    if not text.strip():
        return []
    lines = text.splitlines()
    if lines[0].strip() != CSV_VERSION_LINE:
        raise MalformedCSVError(f"expected {CSV_VERSION_LINE!r} on the first line, got {lines[0]!r}")
    reader = csv.reader(io.StringIO("\n".join(lines[1:])))
    header = next(reader, None)
    if header is None or tuple(header) != CSV_COLUMNS:
        raise MalformedCSVError(f"unexpected header {header!r}")
    rows: list[dict[str, str]] = []
    for line_number, record in enumerate(reader, start=3):
        if not record:
            continue
        if len(record) != len(CSV_COLUMNS):
            raise MalformedCSVError(f"line {line_number}: expected {len(CSV_COLUMNS)} fields, got {len(record)}")
        rows.append(dict(zip(CSV_COLUMNS, record)))
    return rows


def _number(row: dict[str, str], key: str, kind: type) -> Any:
    try:
        return kind(row[key])
    except ValueError as exc:
        raise MalformedCSVError(f"trial {row.get('trial', '?')}: {key}={row[key]!r} is not a number") from exc


def summarize(text: str) -> list[SummaryRow]:
    groups: dict[tuple[Any, ...], list[dict[str, str]]] = {}
    for row in read_csv_rows(text):
        key = (
            row["protocol"],
            row["family"],
            _number(row, "n", int),
            _number(row, "p", float),
            _number(row, "eps", float),
            _number(row, "phi", float),
            _number(row, "kappa", float),
        )
        groups.setdefault(key, []).append(row)

    summary: list[SummaryRow] = []
    for key in sorted(groups):
        rows = groups[key]
        verdicts = [row["within_guarantee"] for row in rows if row["within_guarantee"] != ""]
        if any(verdict not in ("0", "1") for verdict in verdicts):
            raise MalformedCSVError(f"within_guarantee must be 0, 1 or empty in group {key}")
        bits = [_number(row, "bits_total", int) for row in rows]
        rounds = [_number(row, "rounds", int) for row in rows]
        summary.append(
            SummaryRow(
                *key,
                trials=len(rows),
                scored=len(verdicts),
                success_rate=(verdicts.count("1") / len(verdicts)) if verdicts else None,
                median_bits=float(np.median(bits)),
                median_rounds=float(np.median(rounds)),
            )
        )
    return summary


def format_summary(rows: Sequence[SummaryRow], fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps([row.to_dict() for row in rows], indent=2, sort_keys=True)
    if not rows:
        return "no trials"
    header = f"{'protocol':<14} {'family':<15} {'n':>6} {'p':>5} {'eps':>6} {'phi':>5} {'kappa':>6} "
    header += f"{'trials':>6} {'success':>8} {'med_bits':>12} {'med_rounds':>10}"
    lines = [header]
    for row in rows:
        rate = "-" if row.success_rate is None else f"{row.success_rate:.3f}"
        lines.append(
            f"{row.protocol:<14} {row.family:<15} {row.n:>6} {row.p:>5g} {row.eps:>6g} {row.phi:>5g} {row.kappa:>6g} "
            f"{row.trials:>6} {rate:>8} {row.median_bits:>12.1f} {row.median_rounds:>10.1f}"
        )
    return "\n".join(lines)
