"""Authoritative tick loop: movement, block lifecycle, energy, scoring.

Each step advances exactly one tick through a fixed phase order:

  1. command validation and movement (node id order)
  2. block generation on interval boundaries
  3. transfers
  4. mining (job starts, then hash attempts)
  5. chain appends
  6. expiry sweep (timeouts and superseded parents)
  7. energy accounting and deactivation

Events are emitted in phase order and stamped (tick, seq); replaying the
same state and commands reproduces them exactly.  Energy is integer
milli-units throughout, so the ledger closes with zero tolerance.

Per-command failures become illegal_command events and never abort a tick.
A move or jump issued before the movement accumulator has banked a full
tile is silently absorbed: it is not illegal, the node simply is not ready.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from . import blockchain as engine
from .blockchain import Block, BlockStatus, Chain, MiningJob, Role
from .connectivity import LinkVerdict, connectivity_score, link_up
from .rng import STREAM_BLOCKS, STREAM_SPAWN, SplitMix64, derive_seed
from .scenario import CharacterProfile, EnergyCosts, Scenario
from .worldgen import DIRECTION_VECTORS, World, generate_world

# Movement accumulator: milli-tiles/second banked each tick; one tile of
# travel costs tick_rate * 1000.
ACC_SCALE = 1000


@dataclass(frozen=True)
class Command:
    node: int
    kind: str  # move | jump | transfer | mine | idle
    direction: str | None = None
    block_id: int | None = None
    target: int | None = None

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.direction is not None:
            out["dir"] = self.direction
        if self.block_id is not None:
            out["block"] = self.block_id
        if self.target is not None:
            out["target"] = self.target
        return out

    @classmethod
    def from_dict(cls, node: int, doc: Mapping) -> "Command":
        return cls(
            node=node,
            kind=doc.get("kind", "idle"),
            direction=doc.get("dir"),
            block_id=doc.get("block"),
            target=doc.get("target"),
        )


@dataclass(frozen=True)
class Event:
    tick: int
    seq: int
    kind: str
    data: dict


@dataclass(frozen=True)
class EnergyDelta:
    """Itemized energy spend for one node over one tick, in milli-units."""

    idle_mu: int = 0
    move_mu: int = 0
    transmit_mu: int = 0
    hash_mu: int = 0
    applied_mu: int = 0  # actually subtracted; capped at remaining energy

    @property
    def total_mu(self) -> int:
        return self.idle_mu + self.move_mu + self.transmit_mu + self.hash_mu


@dataclass
class TickActivity:
    tiles_moved: int = 0
    jumps: int = 0
    transfers_sent: int = 0
    hash_attempts: int = 0


class NodeState:
    """One character's live state; mutated only by step()."""

    __slots__ = ("id", "profile", "pos", "energy_mu", "carried", "job", "active", "move_acc")

    def __init__(self, node_id: int, profile: CharacterProfile, pos: tuple[int, int], energy_mu: int):
        self.id = node_id
        self.profile = profile
        self.pos = pos
        self.energy_mu = energy_mu
        self.carried: list[int] = []
        self.job: MiningJob | None = None
        self.active = True
        self.move_acc = 0

    # Radio endpoint protocol used by the connectivity functions.
    @property
    def radios(self) -> frozenset[str]:
        return self.profile.radios

    @property
    def penetration_bonus_db(self) -> float:
        return self.profile.penetration_bonus_db


@dataclass
class NodeStats:
    blocks_created_validated: int = 0
    blocks_mined: int = 0


@dataclass
class SimState:
    scenario: Scenario
    world: World
    tick: int = 0
    nodes: list[NodeState] = field(default_factory=list)
    pending: dict[int, Block] = field(default_factory=dict)
    chain: Chain = field(default_factory=Chain)
    rng: SplitMix64 = None  # type: ignore[assignment]
    next_block_id: int = 0
    seq: int = 0
    stats: dict[int, NodeStats] = field(default_factory=dict)
    ttv_ticks_total: int = 0
    ttv_count: int = 0
    last_energy: dict[int, EnergyDelta] = field(default_factory=dict)

    @property
    def target(self) -> int:
        return engine.target_for_difficulty(self.scenario.difficulty_bits)

    def node(self, node_id: int) -> NodeState | None:
        if 0 <= node_id < len(self.nodes):
            return self.nodes[node_id]
        return None


def new_state(scenario: Scenario, world: World | None = None) -> SimState:
    """Fresh simulation state; the world regenerates from the scenario seed."""
    if world is None:
        station_power = {
            tech: radio.tx_power_dbm for tech, radio in scenario.radios.items() if not radio.direct
        }
        world = generate_world(scenario.seed, scenario.map, station_power)
    return SimState(
        scenario=scenario,
        world=world,
        rng=SplitMix64(derive_seed(scenario.seed, STREAM_BLOCKS)),
    )


def spawn_positions(scenario: Scenario, world: World):
    """Endless deterministic stream of spawn tiles, one draw per join."""
    rng = SplitMix64(derive_seed(scenario.seed, STREAM_SPAWN))
    tiles = world.road_tiles()
    while True:
        yield tiles[rng.randrange(len(tiles))]


def add_node(state: SimState, profile: CharacterProfile, pos: tuple[int, int]) -> NodeState:
    if not state.world.is_road(pos):
        raise ValueError(f"spawn tile {pos} is not a road tile")
    node = NodeState(len(state.nodes), profile, pos, state.scenario.energy.initial_mu)
    state.nodes.append(node)
    state.stats[node.id] = NodeStats()
    return node


def best_link(state: SimState, a: NodeState, b: NodeState) -> LinkVerdict | None:
    """Highest-margin usable link between two nodes, ties to the earlier tech."""
    best: LinkVerdict | None = None
    for tech_id in ("bluetooth", "wifi", "3g", "5g"):
        if tech_id not in a.radios or tech_id not in b.radios:
            continue
        tech = state.scenario.radios.get(tech_id)
        if tech is None:
            continue
        verdict = link_up(state.world, state.scenario.env, a, b, tech)
        if verdict.usable and (best is None or verdict.margin_db > best.margin_db):
            best = verdict
    return best


def node_connectivity(state: SimState, node: NodeState) -> float:
    peers = [p for p in state.nodes if p.id != node.id and p.active]
    return connectivity_score(state.world, state.scenario.env, state.scenario.radios, node, peers)


def validate_command(state: SimState, cmd: Command) -> tuple[bool, str | None]:
    """Pure legality check; readiness (movement accumulator) is not judged here."""
    node = state.node(cmd.node)
    if node is None:
        return False, "unknown_node"
    if not node.active:
        return False, "inactive"
    if cmd.kind == "idle":
        return True, None
    if cmd.kind in ("move", "jump"):
        vec = DIRECTION_VECTORS.get(cmd.direction or "")
        if vec is None:
            return False, "bad_command"
        span = 1 if cmd.kind == "move" else 2
        if cmd.kind == "jump" and not node.profile.can_jump:
            return False, "illegal_move"
        dest = (node.pos[0] + vec[0] * span, node.pos[1] + vec[1] * span)
        if not state.world.is_road(dest):
            return False, "illegal_move"
        return True, None
    if cmd.kind == "transfer":
        if cmd.block_id not in node.carried:
            return False, "not_holder"
        block = state.pending.get(cmd.block_id)
        if block is None or block.status is not BlockStatus.GENERATED:
            return False, "block_busy"
        target = state.node(cmd.target) if cmd.target is not None else None
        if target is None or not target.active or target.id == node.id:
            return False, "no_link"
        if best_link(state, node, target) is None:
            return False, "no_link"
        return True, None
    if cmd.kind == "mine":
        if node.profile.role is not Role.FULL:
            return False, "role_violation"
        if cmd.block_id not in node.carried:
            return False, "not_holder"
        block = state.pending.get(cmd.block_id)
        if block is None or block.status is not BlockStatus.GENERATED or node.job is not None:
            return False, "block_busy"
        return True, None
    return False, "bad_command"


def account_energy(costs: EnergyCosts, activity: TickActivity, available_mu: int) -> EnergyDelta:
    """Itemize one node's tick spend; the applied amount floors energy at zero."""
    idle = costs.idle_cost_mu
    move = costs.move_cost_mu * activity.tiles_moved + 3 * costs.move_cost_mu * activity.jumps
    transmit = costs.transmit_cost_mu * activity.transfers_sent
    hashes = costs.hash_cost_mu * activity.hash_attempts
    total = idle + move + transmit + hashes
    return EnergyDelta(
        idle_mu=idle,
        move_mu=move,
        transmit_mu=transmit,
        hash_mu=hashes,
        applied_mu=min(total, available_mu),
    )


def step(state: SimState, commands: Sequence[Command]) -> list[Event]:
    """Advance one tick; returns the events it emitted, already sequenced."""
    tick = state.tick + 1
    events: list[Event] = []

    def emit(kind: str, **data) -> None:
        events.append(Event(tick=tick, seq=state.seq, kind=kind, data=data))
        state.seq += 1

    # Movement allowance accrues for every active node, capped at one tile.
    acc_cap = state.scenario.tick_rate * ACC_SCALE
    for node in state.nodes:
        if node.active:
            node.move_acc = min(node.move_acc + node.profile.move_speed_milli, acc_cap)

    by_node: dict[int, Command] = {}
    for cmd in commands:
        if cmd.node in by_node:
            emit("illegal_command", node=cmd.node, reason="duplicate_command", command=cmd.kind)
            continue
        by_node[cmd.node] = cmd

    activity: dict[int, TickActivity] = {}

    def act(node_id: int) -> TickActivity:
        if node_id not in activity:
            activity[node_id] = TickActivity()
        return activity[node_id]

    # Phase 1: command validation and movement, node id order.
    transfer_queue: list[Command] = []
    mine_queue: list[Command] = []
    for node_id in sorted(by_node):
        cmd = by_node[node_id]
        node = state.node(node_id)
        if node is None:
            emit("illegal_command", node=node_id, reason="unknown_node", command=cmd.kind)
            continue
        if not node.active:
            emit("illegal_command", node=node_id, reason="inactive", command=cmd.kind)
            continue
        if cmd.kind == "idle":
            continue
        if cmd.kind in ("move", "jump"):
            if node.move_acc < acc_cap:
                continue  # not ready; absorbed without effect
            ok, reason = validate_command(state, cmd)
            if not ok:
                emit("illegal_command", node=node_id, reason=reason, command=cmd.kind)
                continue
            vec = DIRECTION_VECTORS[cmd.direction]
            span = 1 if cmd.kind == "move" else 2
            node.pos = (node.pos[0] + vec[0] * span, node.pos[1] + vec[1] * span)
            node.move_acc -= acc_cap
            if cmd.kind == "move":
                act(node_id).tiles_moved += 1
            else:
                act(node_id).jumps += 1
            continue
        ok, reason = validate_command(state, cmd)
        if not ok:
            emit("illegal_command", node=node_id, reason=reason, command=cmd.kind)
            continue
        if cmd.kind == "transfer":
            transfer_queue.append(cmd)
        elif cmd.kind == "mine":
            mine_queue.append(cmd)

    # Phase 2: block generation on interval boundaries.
    if tick % state.scenario.generation_period_ticks == 0:
        active_ids = [n.id for n in state.nodes if n.active]
        if active_ids:
            block, creator = engine.generate_block(
                state.rng, tick, active_ids, state.chain.head_hash, state.next_block_id
            )
            state.next_block_id += 1
            state.pending[block.id] = block
            state.nodes[creator].carried.append(block.id)
            emit("block_generated", block=block.id, creator=creator)

    # Phase 3: transfers, re-checked against post-movement positions.
    for cmd in transfer_queue:
        node = state.nodes[cmd.node]
        target = state.nodes[cmd.target]
        block = state.pending.get(cmd.block_id)
        if block is None or cmd.block_id not in node.carried:
            emit("illegal_command", node=cmd.node, reason="not_holder", command=cmd.kind)
            continue
        verdict = best_link(state, node, target) if target.active else None
        if verdict is None:
            emit("illegal_command", node=cmd.node, reason="no_link", command=cmd.kind)
            continue
        moving = engine.start_transfer(block, node, target, verdict)
        node.carried.remove(block.id)
        target.carried.append(block.id)
        state.pending[block.id] = replace(moving, status=BlockStatus.GENERATED)
        act(cmd.node).transfers_sent += 1
        emit("transfer_completed", block=block.id, **{"from": cmd.node}, to=cmd.target, tech=verdict.tech)

    # Phase 4: start queued jobs, then advance every active job.
    for cmd in mine_queue:
        node = state.nodes[cmd.node]
        block = state.pending[cmd.block_id]
        job = engine.start_mining(block, node.id, node.profile.role)
        node.job = job
        state.pending[block.id] = job.block
        emit("mining_started", block=block.id, miner=node.id)
    append_queue: list[tuple[NodeState, Block]] = []
    for node in state.nodes:
        if node.job is None or not node.active:
            continue
        job = node.job
        budget = node.profile.mining_rate
        outcome = engine.mine_step(job, budget, state.target)
        if isinstance(outcome, engine.Found):
            used = outcome.attempts - job.attempts_done
            act(node.id).hash_attempts += used
            emit("mining_attempted", block=job.block.id, miner=node.id, attempts=used)
            emit("mining_result", block=job.block.id, miner=node.id, found=True)
            mined = replace(job.block, nonce=outcome.nonce)
            state.pending[job.block.id] = mined
            node.job = None
            append_queue.append((node, mined))
        else:
            act(node.id).hash_attempts += budget
            emit("mining_attempted", block=job.block.id, miner=node.id, attempts=budget)
            node.job = outcome.job

    # Phase 5: appends; a lost race expires the runner-up immediately.
    for node, block in append_queue:
        if block.prev_hash == state.chain.head_hash:
            state.chain = engine.append(state.chain, block, state.target)
            del state.pending[block.id]
            node.carried.remove(block.id)
            creator_stats = state.stats.get(block.creator)
            if creator_stats is not None:
                creator_stats.blocks_created_validated += 1
            state.stats[node.id].blocks_mined += 1
            state.ttv_ticks_total += tick - block.created_tick
            state.ttv_count += 1
            emit(
                "block_appended",
                block=block.id,
                miner=node.id,
                height=len(state.chain),
                head=state.chain.head_hash.hex(),
            )
        else:
            del state.pending[block.id]
            node.carried.remove(block.id)
            emit("block_expired", block=block.id, holder=node.id, reason="stale")

    # Phase 6: expiry sweep; timeouts plus blocks whose parent was superseded.
    head = state.chain.head_hash
    for block in list(state.pending.values()):
        timed_out = tick - block.created_tick >= state.scenario.expiry_ticks
        doomed = block.prev_hash != head
        if not (timed_out or doomed):
            continue
        holder = next(n for n in state.nodes if block.id in n.carried)
        del state.pending[block.id]
        holder.carried.remove(block.id)
        emit(
            "block_expired",
            block=block.id,
            holder=holder.id,
            reason="timeout" if timed_out else "stale",
        )
        if holder.job is not None and holder.job.block.id == block.id:
            holder.job = None
            emit("mining_result", block=block.id, miner=holder.id, found=False)

    # Phase 7: energy accounting and deactivation.
    state.last_energy = {}
    for node in state.nodes:
        if not node.active:
            continue
        delta = account_energy(
            state.scenario.energy, activity.get(node.id, TickActivity()), node.energy_mu
        )
        node.energy_mu -= delta.applied_mu
        state.last_energy[node.id] = delta
        if node.energy_mu <= 0:
            node.energy_mu = 0
            node.active = False
            emit("energy_depleted", node=node.id)
            if node.job is not None:
                block = node.job.block
                state.pending[block.id] = replace(block, status=BlockStatus.GENERATED)
                node.job = None
                emit("mining_result", block=block.id, miner=node.id, found=False)

    state.tick = tick
    return events


@dataclass(frozen=True)
class NodeScore:
    node_id: int
    character: str
    role: str
    blocks_created_validated: int
    blocks_mined: int
    points: int
    energy_remaining_mu: int


@dataclass(frozen=True)
class ScoreReport:
    per_node: tuple[NodeScore, ...]
    validated_per_minute: float
    mean_time_to_validation_ticks: float | None


def score(state: SimState) -> ScoreReport:
    """Per-node points and global throughput derived from the current state."""
    weights = state.scenario.scoring
    rows = []
    for node in state.nodes:
        stats = state.stats[node.id]
        rows.append(
            NodeScore(
                node_id=node.id,
                character=node.profile.name,
                role=node.profile.role.value,
                blocks_created_validated=stats.blocks_created_validated,
                blocks_mined=stats.blocks_mined,
                points=weights.create_points * stats.blocks_created_validated
                + weights.mine_points * stats.blocks_mined,
                energy_remaining_mu=node.energy_mu,
            )
        )
    ticks_per_minute = state.scenario.tick_rate * 60
    vpm = len(state.chain) * ticks_per_minute / state.tick if state.tick > 0 else 0.0
    mean_ttv = state.ttv_ticks_total / state.ttv_count if state.ttv_count else None
    return ScoreReport(
        per_node=tuple(rows),
        validated_per_minute=vpm,
        mean_time_to_validation_ticks=mean_ttv,
    )


def audit_block_conservation(state: SimState) -> None:
    """Debug sweep: every pending block is held exactly once, chained blocks by nobody."""
    held: dict[int, int] = {}
    for node in state.nodes:
        for block_id in node.carried:
            if block_id in held:
                raise AssertionError(f"block {block_id} held by {held[block_id]} and {node.id}")
            held[block_id] = node.id
    pending_ids = set(state.pending)
    if set(held) != pending_ids:
        raise AssertionError(f"held {sorted(held)} != pending {sorted(pending_ids)}")
    chained = {b.id for b in state.chain.blocks}
    if chained & pending_ids:
        raise AssertionError("chained blocks still pending")
