import io
import json

import pytest

from chaincourier.metrics import (
    SERIES_INTERVAL,
    export_metrics,
    format_energy,
    node_rows_csv,
    series_csv,
)
from chaincourier.replay import MalformedLog, read_log_lines, replay_verify
from chaincourier.session import Session

from conftest import make_scenario


def run_round(seed=31, max_ticks=600, bots=("miner", "courier"), **overrides) -> str:
    buf = io.StringIO()
    session = Session(make_scenario(seed=seed, **overrides), max_ticks=max_ticks,
                      out=buf, bots=list(bots))
    session.run()
    return buf.getvalue()


@pytest.fixture(scope="module")
def round_log() -> str:
    return run_round()


def test_untouched_log_verifies(round_log):
    result = replay_verify(io.StringIO(round_log))
    assert result.ok


def test_deleted_event_line_fails_at_that_tick(round_log):
    lines = round_log.splitlines()
    victim_index, victim_tick = next(
        (i, json.loads(line)["tick"])
        for i, line in enumerate(lines)
        if json.loads(line).get("t") == "e"
    )
    clipped = lines[:victim_index] + lines[victim_index + 1 :]
    result = replay_verify(io.StringIO("\n".join(clipped) + "\n"))
    assert not result.ok
    assert result.divergent_tick == victim_tick


def test_tampered_event_fails(round_log):
    lines = round_log.splitlines()
    idx = next(i for i, line in enumerate(lines) if '"t":"e"' in line)
    entry = json.loads(lines[idx])
    entry["data"]["tick_fudge"] = 1
    lines[idx] = json.dumps(entry, sort_keys=True, separators=(",", ":"))
    result = replay_verify(io.StringIO("\n".join(lines) + "\n"))
    assert not result.ok
    assert result.divergent_tick == entry["tick"]


def test_dropped_command_diverges(round_log):
    lines = round_log.splitlines()
    idx = next(i for i, line in enumerate(lines) if '"t":"c"' in line)
    del lines[idx]
    result = replay_verify(io.StringIO("\n".join(lines) + "\n"))
    assert not result.ok


def test_malformed_logs_raise():
    with pytest.raises(MalformedLog):
        read_log_lines(io.StringIO(""))
    with pytest.raises(MalformedLog):
        read_log_lines(io.StringIO('{"format":"something-else","v":1}\n'))
    good = run_round(max_ticks=60)
    headerless = "\n".join(good.splitlines()[1:])
    with pytest.raises(MalformedLog):
        replay_verify(io.StringIO(headerless))
    no_end = "\n".join(line for line in good.splitlines() if '"t":"end"' not in line)
    with pytest.raises(MalformedLog):
        replay_verify(io.StringIO(no_end + "\n"))


def test_metrics_derive_solely_from_log(round_log):
    report = export_metrics(io.StringIO(round_log))
    # oracle: recount appends straight off the event lines
    appends = sum(
        1
        for line in round_log.splitlines()
        if '"t":"e"' in line and json.loads(line)["type"] == "block_appended"
    )
    end_tick = json.loads(round_log.splitlines()[-1])["tick"]
    assert report.end_tick == end_tick
    assert report.validated_per_minute == pytest.approx(appends * 600 / end_tick)
    ticks = [p.tick for p in report.series]
    assert ticks == [0] + [t for t in range(SERIES_INTERVAL, end_tick + 1, SERIES_INTERVAL)]
    chain_lengths = [p.chain_length for p in report.series]
    assert chain_lengths == sorted(chain_lengths)
    assert chain_lengths[-1] == appends


def test_zero_append_log_scores_zero_per_minute():
    # no full nodes ever mine with only couriers around
    log = run_round(bots=("courier", "courier"), max_ticks=200)
    report = export_metrics(io.StringIO(log))
    assert report.validated_per_minute == 0.0
    assert report.scores.mean_time_to_validation_ticks is None


def test_report_bytes_are_stable(round_log):
    r1 = export_metrics(io.StringIO(round_log))
    r2 = export_metrics(io.StringIO(round_log))
    assert node_rows_csv(r1) == node_rows_csv(r2)
    assert series_csv(r1) == series_csv(r2)
    header = node_rows_csv(r1).splitlines()[0]
    assert header == (
        "node_id,character,role,blocks_created_validated,blocks_mined,points,energy_remaining"
    )
    assert series_csv(r1).splitlines()[0] == "tick,chain_length,active_nodes"


def test_format_energy_exact_decimals():
    assert format_energy(1_000_000) == "1000"
    assert format_energy(997_250) == "997.25"
    assert format_energy(100) == "0.1"
    assert format_energy(1) == "0.001"
    assert format_energy(0) == "0"
