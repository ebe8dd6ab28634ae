"""Metrics reports derived purely from replay logs.

The replay log embeds the scenario and the full command trace, so the
report re-simulates the round and reads scores off the final state; nothing
else feeds it.  Two CSV files come out: per-node score rows and a tick
series sampled every 100 ticks.  All formatting is exact (integers and
fixed-point energy), so regenerating a report is byte-stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from .replay import MalformedLog, read_log_lines, resimulate
from .scenario import ENERGY_SCALE
from .sim import ScoreReport, score

SERIES_INTERVAL = 100

NODE_COLUMNS = (
    "node_id",
    "character",
    "role",
    "blocks_created_validated",
    "blocks_mined",
    "points",
    "energy_remaining",
)
SERIES_COLUMNS = ("tick", "chain_length", "active_nodes")


@dataclass(frozen=True)
class SeriesPoint:
    tick: int
    chain_length: int
    active_nodes: int


@dataclass(frozen=True)
class MetricsReport:
    scenario: dict
    scores: ScoreReport
    series: tuple[SeriesPoint, ...]
    end_tick: int

    @property
    def validated_per_minute(self) -> float:
        return self.scores.validated_per_minute


def format_energy(mu: int) -> str:
    """Exact decimal string for integer milli-units, e.g. 997250 -> '997.25'."""
    sign = "-" if mu < 0 else ""
    mu = abs(mu)
    whole, frac = divmod(mu, ENERGY_SCALE)
    text = f"{sign}{whole}.{frac:03d}".rstrip("0")
    return text[:-1] if text.endswith(".") else text


def export_metrics(lines: Iterable[str]) -> MetricsReport:
    """Re-simulate a replay log and summarize it."""
    header, body = read_log_lines(lines)
    series = [SeriesPoint(0, 0, 0)]
    final_state = None
    for tick, state, _events in resimulate(header, body):
        if tick % SERIES_INTERVAL == 0:
            series.append(
                SeriesPoint(tick, len(state.chain), sum(1 for n in state.nodes if n.active))
            )
        final_state = state
    if final_state is None:
        raise MalformedLog("log contains no ticks")
    return MetricsReport(
        scenario=header["scenario"],
        scores=score(final_state),
        series=tuple(series),
        end_tick=final_state.tick,
    )


def node_rows_csv(report: MetricsReport) -> str:
    lines = [",".join(NODE_COLUMNS)]
    for row in report.scores.per_node:
        lines.append(
            ",".join(
                [
                    str(row.node_id),
                    row.character,
                    row.role,
                    str(row.blocks_created_validated),
                    str(row.blocks_mined),
                    str(row.points),
                    format_energy(row.energy_remaining_mu),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def series_csv(report: MetricsReport) -> str:
    lines = [",".join(SERIES_COLUMNS)]
    for point in report.series:
        lines.append(f"{point.tick},{point.chain_length},{point.active_nodes}")
    return "\n".join(lines) + "\n"


def report_json(report: MetricsReport) -> str:
    ttv = report.scores.mean_time_to_validation_ticks
    doc = {
        "scenario": report.scenario,
        "end_tick": report.end_tick,
        "validated_per_minute": report.validated_per_minute,
        "mean_time_to_validation_ticks": ttv,
        "nodes": [
            {
                "node_id": r.node_id,
                "character": r.character,
                "role": r.role,
                "blocks_created_validated": r.blocks_created_validated,
                "blocks_mined": r.blocks_mined,
                "points": r.points,
                "energy_remaining": format_energy(r.energy_remaining_mu),
            }
            for r in report.scores.per_node
        ],
        "series": [
            {"tick": p.tick, "chain_length": p.chain_length, "active_nodes": p.active_nodes}
            for p in report.series
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def series_path_for(out_path: str) -> str:
    if out_path.endswith(".csv"):
        return out_path[: -len(".csv")] + "_series.csv"
    return out_path + "_series.csv"


def write_metrics_files(lines: Iterable[str], out_path: str) -> MetricsReport:
    report = export_metrics(lines)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(node_rows_csv(report))
    with open(series_path_for(out_path), "w", encoding="utf-8") as fh:
        fh.write(series_csv(report))
    return report
