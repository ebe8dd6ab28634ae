"""Link feasibility, base-station coverage, and per-node connectivity.

Direct technologies (Bluetooth, Wi-Fi) close a link when the tech's link
budget survives the path loss between the two nodes.  Infrastructure
technologies (3G, 5G) connect any two nodes that both sit inside coverage
of some base station of that tech; the backhaul is assumed ideal.  Every
function here is pure, so the whole module is safe under concurrent reads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .propagation import DirectModeTech, PropagationEnv, RadioTech, path_loss_db
from .worldgen import World, distance_m, obstacles_between


class TechNotOwned(Exception):
    """Link queried for a tech missing from a node's radio set."""


class NoRadios(Exception):
    """Node owns no radios at all."""


@dataclass(frozen=True)
class LinkVerdict:
    usable: bool
    margin_db: float
    tech: str


@dataclass(frozen=True)
class Endpoint:
    """Minimal radio endpoint: anything with these attributes works too."""

    pos: tuple[int, int]
    radios: frozenset[str]
    penetration_bonus_db: float = 0.0


def coverage_margin(world: World, env: PropagationEnv, tech: RadioTech, pos) -> float:
    """Best station link margin in dB at a tile; -inf with no stations of the tech."""
    best = float("-inf")
    for station in world.stations:
        if station.tech != tech.id:
            continue
        loss = path_loss_db(
            env,
            world.geography,
            distance_m(pos, station.pos),
            obstacles_between(world, pos, station.pos),
            0.0,
            tech.ref_loss_db,
        )
        best = max(best, station.tx_power_dbm - loss - tech.sensitivity_dbm)
    return best


def coverage(world: World, env: PropagationEnv, tech: RadioTech, pos) -> bool:
    """Whether a tile closes a link to at least one base station of the tech."""
    if tech.direct:
        raise DirectModeTech(f"{tech.id} has no base stations")
    return coverage_margin(world, env, tech, pos) >= 0.0


def link_up(world: World, env: PropagationEnv, a, b, tech: RadioTech) -> LinkVerdict:
    """Link verdict between two nodes on one tech; symmetric in (a, b).

    Direct mode: margin is tx power minus path loss minus sensitivity, with
    the better of the two penetration bonuses softening obstacle losses.
    Infrastructure mode: usable iff both endpoints are covered; margin is
    the weaker endpoint's coverage margin.
    """
    if tech.id not in a.radios or tech.id not in b.radios:
        raise TechNotOwned(f"both nodes must own {tech.id}")
    if tech.direct:
        bonus = max(a.penetration_bonus_db, b.penetration_bonus_db)
        loss = path_loss_db(
            env,
            world.geography,
            distance_m(a.pos, b.pos),
            obstacles_between(world, a.pos, b.pos),
            bonus,
            tech.ref_loss_db,
        )
        margin = tech.tx_power_dbm - loss - tech.sensitivity_dbm
    else:
        margin = min(
            coverage_margin(world, env, tech, a.pos),
            coverage_margin(world, env, tech, b.pos),
        )
    return LinkVerdict(usable=margin >= 0.0, margin_db=margin, tech=tech.id)


def connectivity_score(
    world: World,
    env: PropagationEnv,
    radios: Mapping[str, RadioTech],
    node,
    peers: Iterable = (),
) -> float:
    """Fraction of the node's owned techs that are currently usable.

    A direct tech counts as usable when at least one peer closes a link on
    it; an infrastructure tech when the node's tile is covered.
    """
    owned = [tech for tech in radios.values() if tech.id in node.radios]
    if not owned:
        raise NoRadios("node owns no radio technologies")
    peers = list(peers)
    usable = 0
    for tech in owned:
        if tech.direct:
            for peer in peers:
                if tech.id not in peer.radios:
                    continue
                if link_up(world, env, node, peer, tech).usable:
                    usable += 1
                    break
        else:
            if coverage(world, env, tech, node.pos):
                usable += 1
    return usable / len(owned)


def connectivity_graph(
    world: World,
    env: PropagationEnv,
    radios: Mapping[str, RadioTech],
    nodes: Sequence,
) -> set[tuple[int, int, str]]:
    """Undirected multigraph of usable links as (low id, high id, tech) edges."""
    edges: set[tuple[int, int, str]] = set()
    for i, a in enumerate(nodes):
        for b in nodes[i + 1 :]:
            shared = a.radios & b.radios
            for tech_id in shared:
                tech = radios.get(tech_id)
                if tech is None:
                    continue
                if link_up(world, env, a, b, tech).usable:
                    lo, hi = sorted((a.id, b.id))
                    edges.add((lo, hi, tech_id))
    return edges
