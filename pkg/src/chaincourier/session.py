"""Authoritative game session: joins, per-tick command queue, bots, snapshots.

Clients never mutate state directly.  Messages bind characters or enqueue a
command for the next tick (the latest input in a tick wins); the single
tick loop drains the queue in node-id order, steps the simulation, and
publishes immutable snapshot dicts.  Every join and command is written to
the replay log, so a finished session is verifiable bit for bit.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace as dc_replace
from typing import IO

from .bots import BotPolicy, BotRuntime, run_policy
from .replay import ReplayWriter
from .rng import STREAM_BOTS, SplitMix64, derive_seed
from .scenario import Scenario
from .sim import (
    Command,
    Event,
    NodeState,
    SimState,
    add_node,
    new_state,
    node_connectivity,
    spawn_positions,
    step,
)

RECENT_EVENTS = 32


@dataclass(frozen=True)
class Ack:
    seq: int
    info: dict | None = None


@dataclass(frozen=True)
class Reject:
    seq: int
    reason: str


@dataclass
class ClientBinding:
    client_id: str
    player: str
    node_id: int
    last_seq: int


class Session:
    """One round: owns the sim state, the roster, and the replay log."""

    def __init__(
        self,
        scenario: Scenario,
        max_ticks: int,
        out: IO[str] | None = None,
        seed: int | None = None,
        leave_policy: str = "random",
        bots: list[str] | None = None,
    ):
        if seed is not None:
            scenario = dc_replace(scenario, seed=seed)
        self.scenario = scenario
        self.max_ticks = max_ticks
        self.leave_policy = leave_policy
        self.state: SimState = new_state(scenario)
        self._spawns = spawn_positions(scenario, self.state.world)
        self.runtime = BotRuntime(self.state.world)
        self.clients: dict[str, ClientBinding] = {}
        self.client_seqs: dict[str, int] = {}
        self.bots: dict[int, tuple[BotPolicy, SplitMix64]] = {}
        self.claimed: dict[str, int] = {}
        self.pending_inputs: dict[int, Command] = {}
        self.recent_events: deque[Event] = deque(maxlen=RECENT_EVENTS)
        self.finished = False
        bot_specs = list(bots or [])
        self.writer = ReplayWriter(out) if out is not None else None
        if self.writer:
            self.writer.header(scenario, max_ticks, [{"policy": p} for p in bot_specs])
        for policy_name in bot_specs:
            self.add_bot(policy_name)

    # -- roster ---------------------------------------------------------

    def _claim(self, character: str) -> NodeState:
        profile = self.scenario.profile_named(character)
        if profile is None:
            raise KeyError(character)
        pos = next(self._spawns)
        node = add_node(self.state, profile, pos)
        self.claimed[character] = node.id
        return node

    def add_bot(self, policy_name: str, character: str | None = None) -> int:
        """Bind a bot to the named character, or the next unclaimed one."""
        if character is None:
            character = next(
                (p.name for p in self.scenario.catalog if p.name not in self.claimed), None
            )
            if character is None:
                raise RuntimeError("no unclaimed characters left for bots")
        elif character in self.claimed:
            raise RuntimeError(f"character {character!r} already claimed")
        node = self._claim(character)
        rng = SplitMix64(derive_seed(self.scenario.seed, STREAM_BOTS, node.id))
        self.bots[node.id] = (BotPolicy(policy_name), rng)
        if self.writer:
            self.writer.join(
                self.state.tick + 1, node.id, character, f"bot:{policy_name}", node.pos
            )
        return node.id

    # -- client protocol -------------------------------------------------

    def handle_message(self, client_id: str, msg: dict) -> Ack | Reject:
        """Process one client message; Input commands wait for the next tick."""
        seq = msg.get("seq", -1)
        expected = self.client_seqs.get(client_id, -1) + 1
        if not isinstance(seq, int) or seq != expected:
            return Reject(seq if isinstance(seq, int) else -1, "sequence_gap")
        self.client_seqs[client_id] = seq
        kind = msg.get("type")
        if kind == "join":
            return self._handle_join(client_id, msg, seq)
        binding = self.clients.get(client_id)
        if binding is None:
            return Reject(seq, "not_joined")
        if kind == "input":
            cmd_doc = msg.get("command")
            if not isinstance(cmd_doc, dict):
                return Reject(seq, "bad_command")
            cmd = Command.from_dict(binding.node_id, cmd_doc)
            self.pending_inputs[binding.node_id] = cmd
            return Ack(seq)
        if kind == "leave":
            self._detach(binding)
            return Ack(seq)
        return Reject(seq, "unknown_message")

    def _handle_join(self, client_id: str, msg: dict, seq: int) -> Ack | Reject:
        if client_id in self.clients:
            return Reject(seq, "already_joined")
        if len(self.claimed) >= len(self.scenario.catalog):
            return Reject(seq, "session_full")
        character = msg.get("character")
        player = msg.get("player")
        if not isinstance(character, str) or not isinstance(player, str):
            return Reject(seq, "bad_join")
        if self.scenario.profile_named(character) is None:
            return Reject(seq, "unknown_character")
        if character in self.claimed:
            return Reject(seq, "character_taken")
        node = self._claim(character)
        self.clients[client_id] = ClientBinding(client_id, player, node.id, seq)
        if self.writer:
            self.writer.join(
                self.state.tick + 1, node.id, character, f"player:{player}", node.pos
            )
        return Ack(seq, info={"node": node.id})

    def _detach(self, binding: ClientBinding) -> None:
        del self.clients[binding.client_id]
        if self.leave_policy == "random":
            rng = SplitMix64(derive_seed(self.scenario.seed, STREAM_BOTS, binding.node_id))
            self.bots[binding.node_id] = (BotPolicy("random"), rng)

    def drop_client(self, client_id: str) -> None:
        """Connection lost without a Leave message; same fallback applies."""
        binding = self.clients.get(client_id)
        if binding is not None:
            self._detach(binding)

    # -- tick loop --------------------------------------------------------

    def collect_commands(self) -> list[Command]:
        commands: list[Command] = []
        for node_id in sorted(self.bots):
            policy, rng = self.bots[node_id]
            cmd = run_policy(policy, self.state, node_id, rng, self.runtime)
            if cmd is not None and cmd.kind != "idle":
                commands.append(cmd)
        for node_id in sorted(self.pending_inputs):
            cmd = self.pending_inputs[node_id]
            if cmd.kind != "idle":
                commands.append(cmd)
        self.pending_inputs.clear()
        commands.sort(key=lambda c: c.node)
        return commands

    def tick_once(self) -> list[Event]:
        commands = self.collect_commands()
        tick = self.state.tick + 1
        if self.writer:
            for cmd in commands:
                self.writer.command(tick, cmd)
        events = step(self.state, commands)
        if self.writer:
            self.writer.events(events)
        self.recent_events.extend(events)
        return events

    def anyone_active(self) -> bool:
        return any(n.active for n in self.state.nodes)

    def finish(self) -> None:
        if not self.finished:
            self.finished = True
            if self.writer:
                self.writer.end(self.state.tick)

    def run(self) -> SimState:
        """Turbo loop: advance as fast as possible to max_ticks or a dead round."""
        while self.state.tick < self.max_ticks and self.anyone_active():
            self.tick_once()
        self.finish()
        return self.state

    # -- snapshots ---------------------------------------------------------

    def world_payload(self) -> dict:
        world = self.state.world
        return {
            "width": world.width,
            "height": world.height,
            "geography": world.geography,
            "tile_size_m": 10,
            "tiles": world.tiles.tolist(),
            "stations": [
                {"tech": s.tech, "pos": [s.pos[0], s.pos[1]], "tx_power_dbm": s.tx_power_dbm}
                for s in world.stations
            ],
        }

    def public_snapshot(self) -> dict:
        state = self.state
        nodes = []
        for node in state.nodes:
            nodes.append(
                {
                    "node": node.id,
                    "character": node.profile.name,
                    "role": node.profile.role.value,
                    "pos": [node.pos[0], node.pos[1]],
                    "energy_mu": node.energy_mu,
                    "initial_energy_mu": state.scenario.energy.initial_mu,
                    "connectivity": node_connectivity(state, node) if node.active else 0.0,
                    "carried_count": len(node.carried),
                    "active": node.active,
                }
            )
        return {
            "v": 1,
            "type": "snapshot",
            "tick": state.tick,
            "nodes": nodes,
            "chain": {"length": len(state.chain), "head": state.chain.head_hash.hex()[:16]},
            "events": [
                {"tick": ev.tick, "seq": ev.seq, "type": ev.kind, "data": ev.data}
                for ev in self.recent_events
            ],
        }

    def snapshot_for(self, client_id: str, base: dict | None = None) -> dict:
        snap = dict(base if base is not None else self.public_snapshot())
        binding = self.clients.get(client_id)
        if binding is not None:
            node = self.state.nodes[binding.node_id]
            job = node.job
            snap["you"] = {
                "node": node.id,
                "carried": list(node.carried),
                "job": None
                if job is None
                else {"block": job.block.id, "attempts": job.attempts_done},
            }
        return snap


def handle_message(session: Session, client_id: str, msg: dict) -> Ack | Reject:
    return session.handle_message(client_id, msg)


def run_session(
    scenario: Scenario,
    max_ticks: int,
    bots: list[str],
    out: IO[str],
    seed: int | None = None,
) -> SimState:
    """Headless turbo run with bot players; writes the replay log to out."""
    session = Session(scenario, max_ticks=max_ticks, out=out, seed=seed, bots=bots)
    return session.run()
