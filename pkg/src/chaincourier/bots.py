"""Bot controllers: random walk, coverage seeking, block couriering.

Policies are deterministic functions of the authoritative state and a
per-bot seeded generator, so bot-driven rounds replay exactly.  The courier
policy needs shortest road distances to the nearest full node every tick;
those come from one shared multi-source graph search over the static road
adjacency, recomputed only when a full node actually moves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .blockchain import Role
from .connectivity import Endpoint, coverage, link_up
from .rng import SplitMix64
from .sim import ACC_SCALE, Command, NodeState, SimState, best_link
from .worldgen import DIRECTIONS, TileKind, World

POLICY_NAMES = ("random", "greedy", "courier", "miner")


@dataclass(frozen=True)
class BotPolicy:
    kind: str

    def __post_init__(self):
        if self.kind not in POLICY_NAMES:
            raise ValueError(f"unknown bot policy {self.kind!r}")


class RoadGraph:
    """Static 4-neighbor adjacency over road tiles with a distance-field cache."""

    def __init__(self, world: World):
        self.world = world
        road = world.tiles == TileKind.ROAD
        self.cell_index = np.full(road.shape, -1, dtype=np.int64)
        ys, xs = np.nonzero(road)
        self.cells = list(zip(xs.tolist(), ys.tolist()))
        for i, (x, y) in enumerate(self.cells):
            self.cell_index[y, x] = i
        rows, cols = [], []
        for i, (x, y) in enumerate(self.cells):
            for _, dx, dy in DIRECTIONS:
                nx, ny = x + dx, y + dy
                if 0 <= nx < world.width and 0 <= ny < world.height:
                    j = self.cell_index[ny, nx]
                    if j >= 0:
                        rows.append(i)
                        cols.append(int(j))
        data = np.ones(len(rows), dtype=np.float64)
        n = len(self.cells)
        self.adjacency = csr_matrix((data, (rows, cols)), shape=(n, n))
        self._sources_key: tuple = ()
        self._field: np.ndarray | None = None

    def distance_field(self, sources: list[tuple[int, int]]) -> np.ndarray | None:
        """Road distance from every road tile to the nearest source tile."""
        key = tuple(sorted(sources))
        if key != self._sources_key or self._field is None:
            indices = [int(self.cell_index[y, x]) for x, y in key if self.cell_index[y, x] >= 0]
            if not indices:
                self._field = None
            else:
                self._field = dijkstra(
                    self.adjacency, directed=False, indices=indices, unweighted=True, min_only=True
                )
            self._sources_key = key
        return self._field

    def value_at(self, field: np.ndarray, pos: tuple[int, int]) -> float:
        idx = self.cell_index[pos[1], pos[0]]
        return float("inf") if idx < 0 else float(field[idx])


class BotRuntime:
    """Shared per-session helpers for all bots."""

    def __init__(self, world: World):
        self.roads = RoadGraph(world)

    def nearest_full_field(self, state: SimState) -> np.ndarray | None:
        fulls = [n.pos for n in state.nodes if n.active and n.profile.role is Role.FULL]
        if not fulls:
            return None
        return self.roads.distance_field(fulls)


def _move_ready(state: SimState, node: NodeState) -> bool:
    cap = state.scenario.tick_rate * ACC_SCALE
    return node.move_acc + node.profile.move_speed_milli >= cap


def _road_neighbors(state: SimState, pos) -> list[tuple[str, tuple[int, int]]]:
    out = []
    for name, dx, dy in DIRECTIONS:
        dest = (pos[0] + dx, pos[1] + dy)
        if state.world.is_road(dest):
            out.append((name, dest))
    return out


def _score_at(state: SimState, node: NodeState, tile: tuple[int, int]) -> float:
    """Connectivity score the node would have standing on the given tile."""
    ghost = Endpoint(tile, node.radios, node.penetration_bonus_db)
    owned = [t for t in state.scenario.radios.values() if t.id in node.radios]
    if not owned:
        return 0.0
    usable = 0
    for tech in owned:
        if tech.direct:
            for peer in state.nodes:
                if peer.id == node.id or not peer.active or tech.id not in peer.radios:
                    continue
                if link_up(state.world, state.scenario.env, ghost, peer, tech).usable:
                    usable += 1
                    break
        else:
            if coverage(state.world, state.scenario.env, tech, tile):
                usable += 1
    return usable / len(owned)


def _greedy_move(state: SimState, node: NodeState) -> Command | None:
    if not _move_ready(state, node):
        return None
    options = _road_neighbors(state, node.pos)
    if not options:
        return None
    best_dir, best_score = None, -1.0
    for name, dest in options:
        s = _score_at(state, node, dest)
        if s > best_score:
            best_dir, best_score = name, s
    return Command(node=node.id, kind="move", direction=best_dir)


def _random_move(state: SimState, node: NodeState, rng: SplitMix64) -> Command | None:
    if not _move_ready(state, node):
        return None
    options = _road_neighbors(state, node.pos)
    if not options:
        return None
    name, _ = options[rng.randrange(len(options))]
    return Command(node=node.id, kind="move", direction=name)


def _courier_move(state: SimState, node: NodeState, runtime: BotRuntime) -> Command | None:
    field = runtime.nearest_full_field(state)
    if field is None:
        return _greedy_move(state, node)
    here = runtime.roads.value_at(field, node.pos)
    if here == float("inf"):
        return _greedy_move(state, node)
    # Transfer beats walking whenever some full node is already linked.
    linked: list[tuple[float, int]] = []
    for peer in state.nodes:
        if peer.id == node.id or not peer.active or peer.profile.role is not Role.FULL:
            continue
        if best_link(state, node, peer) is not None:
            linked.append((runtime.roads.value_at(field, peer.pos), peer.id))
    if linked and node.carried:
        linked.sort()
        return Command(
            node=node.id, kind="transfer", block_id=node.carried[0], target=linked[0][1]
        )
    if not _move_ready(state, node):
        return None
    step_dir, step_val = None, here
    for name, dest in _road_neighbors(state, node.pos):
        val = runtime.roads.value_at(field, dest)
        if val < step_val:
            step_dir, step_val = name, val
    if step_dir is None:
        return _greedy_move(state, node)
    return Command(node=node.id, kind="move", direction=step_dir)


def run_policy(
    policy: BotPolicy,
    state: SimState,
    node_id: int,
    rng: SplitMix64,
    runtime: BotRuntime | None = None,
) -> Command | None:
    """Decide one node's command for the upcoming tick; None means idle."""
    node = state.node(node_id)
    if node is None or not node.active:
        return None
    if runtime is None:
        runtime = BotRuntime(state.world)
    if policy.kind == "random":
        return _random_move(state, node, rng)
    if policy.kind == "greedy":
        return _greedy_move(state, node)
    if policy.kind == "courier":
        if node.carried and node.profile.role is not Role.FULL:
            return _courier_move(state, node, runtime)
        return _greedy_move(state, node)
    if policy.kind == "miner":
        if node.profile.role is Role.FULL and node.job is not None:
            return None
        if node.profile.role is Role.FULL and node.carried:
            return Command(node=node.id, kind="mine", block_id=node.carried[0])
        return _greedy_move(state, node)
    return None
