"""Deterministic simulator of a proof-of-work blockchain riding on a mobile
wireless network.

Player characters (full and half blockchain nodes) move along the roads of
a procedurally generated tile world, courier freshly generated blocks to
full nodes for proof-of-work validation, and budget their energy and radio
connectivity.  Rounds are tick-based and fully deterministic: a scenario
file, a seed, and a command trace reproduce the identical event log, which
the bundled tools can verify bit for bit and turn into score reports.

Layers, bottom up: `worldgen` (tiles, roads, obstacles, stations),
`propagation` / `connectivity` (path loss, link budgets, coverage),
`blockchain` (blocks, mining, chain), `sim` (the tick loop), `bots`,
`session` / `server` (multiplayer protocol), `replay` / `metrics`
(verification and reporting), `cli` (serve / run / verify / metrics).
"""

from .blockchain import Block, Chain, MiningJob, Role, verify_chain
from .connectivity import LinkVerdict, connectivity_graph, connectivity_score, coverage, link_up
from .propagation import PropagationEnv, RadioTech, default_radios, path_loss_db
from .scenario import CharacterProfile, Scenario, load_scenario
from .sim import Command, Event, SimState, new_state, score, step
from .worldgen import MapParams, World, generate_world, obstacles_between, road_path

__all__ = [
    "Block",
    "Chain",
    "CharacterProfile",
    "Command",
    "Event",
    "LinkVerdict",
    "MapParams",
    "MiningJob",
    "PropagationEnv",
    "RadioTech",
    "Role",
    "Scenario",
    "SimState",
    "World",
    "connectivity_graph",
    "connectivity_score",
    "coverage",
    "default_radios",
    "generate_world",
    "link_up",
    "load_scenario",
    "new_state",
    "obstacles_between",
    "path_loss_db",
    "road_path",
    "score",
    "step",
    "verify_chain",
]

__version__ = "0.1.0"
