"""Replay logs: newline-delimited JSON, bit-reproducible across runs.

Line 1 is the header (scenario echo plus run configuration).  Body lines
carry one record each, strictly ordered by tick:

  {"t":"j", ...}  node joined (character, controller, spawn tile)
  {"t":"c", ...}  one command fed to the tick's step
  {"t":"e", ...}  one emitted event
  {"t":"end", ...}  final tick marker

Every line is canonical JSON (sorted keys, no spaces), so two runs of the
same scenario, seed, and inputs produce byte-identical files, and a
verifier can re-simulate from the embedded scenario and command trace and
compare events byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

from .scenario import Scenario, load_scenario, scenario_to_dict
from .sim import Command, Event, SimState, add_node, new_state, spawn_positions, step

FORMAT_NAME = "chaincourier-replay"
PROTOCOL_VERSION = 1


class MalformedLog(ValueError):
    pass


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def event_line(ev: Event) -> str:
    return canonical_json({"t": "e", "tick": ev.tick, "seq": ev.seq, "type": ev.kind, "data": ev.data})


def command_line(tick: int, cmd: Command) -> str:
    return canonical_json({"t": "c", "tick": tick, "node": cmd.node, "cmd": cmd.to_dict()})


def join_line(tick: int, node: int, character: str, controller: str, spawn: tuple[int, int]) -> str:
    return canonical_json(
        {
            "t": "j",
            "tick": tick,
            "node": node,
            "character": character,
            "controller": controller,
            "spawn": [spawn[0], spawn[1]],
        }
    )


class ReplayWriter:
    """Streams replay lines to a file object."""

    def __init__(self, out: IO[str]):
        self.out = out

    def header(self, scenario: Scenario, max_ticks: int, bots: list[dict]) -> None:
        self._write(
            canonical_json(
                {
                    "format": FORMAT_NAME,
                    "v": PROTOCOL_VERSION,
                    "scenario": scenario_to_dict(scenario),
                    "max_ticks": max_ticks,
                    "bots": bots,
                }
            )
        )

    def join(self, tick: int, node: int, character: str, controller: str, spawn) -> None:
        self._write(join_line(tick, node, character, controller, spawn))

    def command(self, tick: int, cmd: Command) -> None:
        self._write(command_line(tick, cmd))

    def events(self, events: Iterable[Event]) -> None:
        for ev in events:
            self._write(event_line(ev))

    def end(self, tick: int) -> None:
        self._write(canonical_json({"t": "end", "tick": tick}))

    def _write(self, line: str) -> None:
        self.out.write(line)
        self.out.write("\n")


def read_log_lines(lines: Iterable[str]) -> tuple[dict, list[str]]:
    it = iter(lines)
    try:
        first = next(it)
    except StopIteration:
        raise MalformedLog("empty log") from None
    try:
        header = json.loads(first)
    except json.JSONDecodeError as exc:
        raise MalformedLog(f"bad header line: {exc}") from exc
    if not isinstance(header, dict) or header.get("format") != FORMAT_NAME:
        raise MalformedLog("not a replay log")
    if header.get("v") != PROTOCOL_VERSION:
        raise MalformedLog(f"unsupported replay version {header.get('v')!r}")
    return header, [line.rstrip("\n") for line in it if line.strip()]


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    divergent_tick: int | None = None
    message: str = ""


def _parse_entry(line: str) -> dict:
    try:
        entry = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedLog(f"bad log line: {exc}") from exc
    if not isinstance(entry, dict) or "t" not in entry:
        raise MalformedLog(f"log line missing record type: {line[:80]}")
    return entry


def resimulate(header: dict, body: list[str]) -> Iterator[tuple[int, SimState, list[Event]]]:
    """Re-run the simulation described by a log, yielding per-tick results.

    Joins re-derive spawn tiles from the scenario seed; a recorded spawn that
    disagrees means the log does not belong to its own header.
    """
    scenario = load_scenario(json.dumps(header["scenario"]))
    state = new_state(scenario)
    spawns = spawn_positions(scenario, state.world)
    entries = [_parse_entry(line) for line in body]
    end_tick = None
    joins_by_tick: dict[int, list[dict]] = {}
    commands_by_tick: dict[int, list[Command]] = {}
    for entry in entries:
        kind = entry["t"]
        if kind == "end":
            end_tick = entry["tick"]
        elif kind == "j":
            joins_by_tick.setdefault(entry["tick"], []).append(entry)
        elif kind == "c":
            commands_by_tick.setdefault(entry["tick"], []).append(
                Command.from_dict(entry["node"], entry["cmd"])
            )
        elif kind != "e":
            raise MalformedLog(f"unknown record type {kind!r}")
    if end_tick is None:
        raise MalformedLog("log has no end marker")

    for tick in range(1, end_tick + 1):
        for entry in joins_by_tick.get(tick, []):
            profile = scenario.profile_named(entry["character"])
            if profile is None:
                raise MalformedLog(f"unknown character {entry['character']!r} in join")
            expected = next(spawns)
            recorded = tuple(entry["spawn"])
            if recorded != expected:
                raise MalformedLog(
                    f"join spawn {recorded} diverges from derived {expected} at tick {tick}"
                )
            node = add_node(state, profile, expected)
            if node.id != entry["node"]:
                raise MalformedLog(f"join node id {entry['node']} != {node.id}")
        events = step(state, commands_by_tick.get(tick, []))
        yield tick, state, events


def replay_verify(lines: Iterable[str]) -> VerifyResult:
    """Re-simulate a log and compare regenerated events byte for byte."""
    header, body = read_log_lines(lines)
    try:
        entries = [_parse_entry(line) for line in body]
        recorded_events: dict[int, list[str]] = {}
        for line, entry in zip(body, entries):
            if entry["t"] == "e":
                recorded_events.setdefault(entry["tick"], []).append(line)
        for tick, _state, events in resimulate(header, body):
            expected = recorded_events.get(tick, [])
            regenerated = [event_line(ev) for ev in events]
            if regenerated != expected:
                return VerifyResult(False, tick, f"events diverge at tick {tick}")
    except MalformedLog:
        raise
    except Exception as exc:
        return VerifyResult(False, None, f"re-simulation failed: {exc}")
    return VerifyResult(True, None, "replay verified")


def verify_file(path: str) -> VerifyResult:
    with open(path, "r", encoding="utf-8") as fh:
        return replay_verify(fh)
