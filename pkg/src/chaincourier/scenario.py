"""Scenario documents: one round's full parameterization.

Scenarios are UTF-8 JSON with snake_case field names matching the dataclass
fields below.  Unknown fields are rejected (ParseError names the offender),
absent optional fields take the documented defaults, and constraint
violations raise ValidationError.  Energy quantities are converted to
integer milli-units at load time so every later energy computation is exact
integer arithmetic.

Defaults: tick_rate 10 (fixed), block_interval_n 5 s, difficulty_bits 8,
expiry_ticks 3000, energy {initial 1000, idle 0.1/tick, move 1/tile,
transmit 5/transfer, hash 0.01/attempt}, scoring {create 1, mine 3}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

from .blockchain import Role
from .propagation import (
    DIRECT_TECHS,
    GEOGRAPHIES,
    OBSTACLE_KINDS,
    TECH_IDS,
    PropagationEnv,
    RadioTech,
    default_radios,
)
from .worldgen import MapParams

TICK_RATE = 10
ENERGY_SCALE = 1000  # milli-units per scenario energy unit


class ParseError(ValueError):
    """Structural problem: bad JSON, unknown field, wrong type."""


class ValidationError(ValueError):
    """Well-formed document violating a constraint."""

    def __init__(self, field_name: str, constraint: str):
        super().__init__(f"{field_name}: {constraint}")
        self.field = field_name
        self.constraint = constraint


def to_milli(value: float) -> int:
    """Scale an energy quantity to integer milli-units."""
    return round(value * ENERGY_SCALE)


@dataclass(frozen=True)
class EnergyCosts:
    """All values in integer milli-units."""

    initial_mu: int = 1000 * ENERGY_SCALE
    idle_cost_mu: int = to_milli(0.1)
    move_cost_mu: int = to_milli(1.0)
    transmit_cost_mu: int = to_milli(5.0)
    hash_cost_mu: int = to_milli(0.01)


@dataclass(frozen=True)
class ScoringWeights:
    create_points: int = 1
    mine_points: int = 3


@dataclass(frozen=True)
class CharacterProfile:
    name: str
    role: Role
    radios: frozenset[str] = frozenset({"wifi"})
    move_speed: float = 1.0  # tiles per second
    mining_rate: int = 20  # hash attempts per tick; 0 for half nodes
    penetration_bonus_db: float = 0.0
    can_jump: bool = False

    @property
    def move_speed_milli(self) -> int:
        return round(self.move_speed * 1000)


@dataclass(frozen=True)
class Scenario:
    seed: int
    map: MapParams
    catalog: tuple[CharacterProfile, ...]
    tick_rate: int = TICK_RATE
    block_interval_n: int = 5
    difficulty_bits: int = 8
    expiry_ticks: int = 3000
    env: PropagationEnv = field(default_factory=PropagationEnv)
    radios: Mapping[str, RadioTech] = field(default_factory=default_radios)
    energy: EnergyCosts = field(default_factory=EnergyCosts)
    scoring: ScoringWeights = field(default_factory=ScoringWeights)

    @property
    def generation_period_ticks(self) -> int:
        return self.block_interval_n * self.tick_rate

    def profile_named(self, name: str) -> CharacterProfile | None:
        for profile in self.catalog:
            if profile.name == name:
                return profile
        return None


def _expect_mapping(obj: Any, where: str) -> Mapping[str, Any]:
    if not isinstance(obj, dict):
        raise ParseError(f"{where} must be a JSON object")
    return obj


def _take(doc: dict, consumed: set[str], where: str) -> None:
    unknown = set(doc) - consumed
    if unknown:
        name = sorted(unknown)[0]
        raise ParseError(f"unknown field {name!r} in {where}")


def _get_number(doc, key, where, default=None, required=False):
    if key not in doc:
        if required:
            raise ParseError(f"missing required field {key!r} in {where}")
        return default
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"field {key!r} in {where} must be a number")
    return value


def _get_int(doc, key, where, default=None, required=False):
    if key not in doc:
        if required:
            raise ParseError(f"missing required field {key!r} in {where}")
        return default
    value = _get_number(doc, key, where, required=True)
    if isinstance(value, float):
        if not value.is_integer():
            raise ParseError(f"field {key!r} in {where} must be an integer")
        value = int(value)
    return value


def _parse_map(doc: Any) -> MapParams:
    doc = _expect_mapping(doc, "map")
    width = _get_int(doc, "width", "map", required=True)
    height = _get_int(doc, "height", "map", required=True)
    geography = doc.get("geography", "urban")
    if geography not in GEOGRAPHIES:
        raise ValidationError("map.geography", f"must be one of {GEOGRAPHIES}")
    road_density = _get_number(doc, "road_density", "map", 0.2)
    obstacle_density = _get_number(doc, "obstacle_density", "map", 0.1)
    stations_doc = doc.get("stations", [])
    if not isinstance(stations_doc, list):
        raise ParseError("field 'stations' in map must be a list of [tech, count] pairs")
    stations = []
    for entry in stations_doc:
        if not (isinstance(entry, list) and len(entry) == 2 and isinstance(entry[0], str)):
            raise ParseError("each map station must be a [tech, count] pair")
        tech, count = entry[0], entry[1]
        if isinstance(count, bool) or not isinstance(count, int):
            raise ParseError("station count must be an integer")
        if tech not in TECH_IDS or tech in DIRECT_TECHS:
            raise ValidationError("map.stations", f"{tech!r} is not an infrastructure tech")
        if count < 0:
            raise ValidationError("map.stations", "count must be >= 0")
        stations.append((tech, count))
    _take(doc, {"width", "height", "geography", "road_density", "obstacle_density", "stations"}, "map")
    if width < 8 or height < 8:
        raise ValidationError("map.width/height", "map must be at least 8x8")
    if not 0.0 < road_density <= 1.0:
        raise ValidationError("map.road_density", "must be in (0, 1]")
    if not 0.0 <= obstacle_density < 1.0:
        raise ValidationError("map.obstacle_density", "must be in [0, 1)")
    return MapParams(
        width=width,
        height=height,
        geography=geography,
        road_density=float(road_density),
        obstacle_density=float(obstacle_density),
        stations=tuple(stations),
    )


def _parse_env(doc: Any) -> PropagationEnv:
    doc = _expect_mapping(doc, "env")
    _take(doc, {"exponent", "obstacle_loss"}, "env")
    defaults = PropagationEnv()
    exponent = dict(defaults.exponent)
    if "exponent" in doc:
        sub = _expect_mapping(doc["exponent"], "env.exponent")
        _take(sub, set(GEOGRAPHIES), "env.exponent")
        for geo in sub:
            value = _get_number(sub, geo, "env.exponent")
            if value < 2.0:
                raise ValidationError(f"env.exponent.{geo}", "must be >= 2.0")
            exponent[geo] = float(value)
    obstacle_loss = dict(defaults.obstacle_loss)
    if "obstacle_loss" in doc:
        sub = _expect_mapping(doc["obstacle_loss"], "env.obstacle_loss")
        _take(sub, set(OBSTACLE_KINDS), "env.obstacle_loss")
        for kind in sub:
            value = _get_number(sub, kind, "env.obstacle_loss")
            if value < 0:
                raise ValidationError(f"env.obstacle_loss.{kind}", "must be >= 0")
            obstacle_loss[kind] = float(value)
    return PropagationEnv(exponent=exponent, obstacle_loss=obstacle_loss)


def _parse_radios(doc: Any) -> dict[str, RadioTech]:
    doc = _expect_mapping(doc, "radios")
    radios = default_radios()
    for tech_id in doc:
        if tech_id not in TECH_IDS:
            raise ParseError(f"unknown field {tech_id!r} in radios")
        sub = _expect_mapping(doc[tech_id], f"radios.{tech_id}")
        _take(sub, {"tx_power_dbm", "sensitivity_dbm", "ref_loss_db"}, f"radios.{tech_id}")
        base = radios[tech_id]
        try:
            radios[tech_id] = RadioTech(
                id=tech_id,
                mode=base.mode,
                tx_power_dbm=float(_get_number(sub, "tx_power_dbm", tech_id, base.tx_power_dbm)),
                sensitivity_dbm=float(
                    _get_number(sub, "sensitivity_dbm", tech_id, base.sensitivity_dbm)
                ),
                ref_loss_db=float(_get_number(sub, "ref_loss_db", tech_id, base.ref_loss_db)),
            )
        except ValueError as exc:
            raise ValidationError(f"radios.{tech_id}", str(exc)) from exc
    return radios


def _parse_energy(doc: Any) -> EnergyCosts:
    doc = _expect_mapping(doc, "energy")
    _take(doc, {"initial", "idle_cost", "move_cost", "transmit_cost", "hash_cost"}, "energy")
    defaults = EnergyCosts()
    initial = _get_number(doc, "initial", "energy", defaults.initial_mu / ENERGY_SCALE)
    costs = {
        "idle_cost": _get_number(doc, "idle_cost", "energy", defaults.idle_cost_mu / ENERGY_SCALE),
        "move_cost": _get_number(doc, "move_cost", "energy", defaults.move_cost_mu / ENERGY_SCALE),
        "transmit_cost": _get_number(
            doc, "transmit_cost", "energy", defaults.transmit_cost_mu / ENERGY_SCALE
        ),
        "hash_cost": _get_number(doc, "hash_cost", "energy", defaults.hash_cost_mu / ENERGY_SCALE),
    }
    if initial <= 0:
        raise ValidationError("energy.initial", "must be > 0")
    for name, value in costs.items():
        if value < 0:
            raise ValidationError(f"energy.{name}", "must be >= 0")
    return EnergyCosts(
        initial_mu=to_milli(initial),
        idle_cost_mu=to_milli(costs["idle_cost"]),
        move_cost_mu=to_milli(costs["move_cost"]),
        transmit_cost_mu=to_milli(costs["transmit_cost"]),
        hash_cost_mu=to_milli(costs["hash_cost"]),
    )


def _parse_scoring(doc: Any) -> ScoringWeights:
    doc = _expect_mapping(doc, "scoring")
    _take(doc, {"create_points", "mine_points"}, "scoring")
    defaults = ScoringWeights()
    return ScoringWeights(
        create_points=_get_int(doc, "create_points", "scoring", defaults.create_points),
        mine_points=_get_int(doc, "mine_points", "scoring", defaults.mine_points),
    )


def _parse_profile(doc: Any, index: int, radios: Mapping[str, RadioTech]) -> CharacterProfile:
    where = f"catalog[{index}]"
    doc = _expect_mapping(doc, where)
    _take(
        doc,
        {"name", "role", "radios", "move_speed", "mining_rate", "penetration_bonus_db", "can_jump"},
        where,
    )
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise ParseError(f"missing or invalid field 'name' in {where}")
    role_raw = doc.get("role")
    if role_raw not in (Role.FULL.value, Role.HALF.value):
        raise ValidationError(f"{where}.role", "must be 'full' or 'half'")
    role = Role(role_raw)
    radio_ids = doc.get("radios", ["wifi"])
    if not isinstance(radio_ids, list) or not all(isinstance(r, str) for r in radio_ids):
        raise ParseError(f"field 'radios' in {where} must be a list of tech ids")
    for tech in radio_ids:
        if tech not in radios:
            raise ValidationError(f"{where}.radios", f"unknown tech {tech!r}")
    if not radio_ids:
        raise ValidationError(f"{where}.radios", "must own at least one radio")
    move_speed = _get_number(doc, "move_speed", where, 1.0)
    if move_speed <= 0:
        raise ValidationError(f"{where}.move_speed", "must be > 0")
    default_rate = 20 if role is Role.FULL else 0
    mining_rate = _get_int(doc, "mining_rate", where, default_rate)
    if role is Role.FULL and mining_rate <= 0:
        raise ValidationError(f"{where}.mining_rate", "full nodes need a positive mining rate")
    if role is Role.HALF and mining_rate != 0:
        raise ValidationError(f"{where}.mining_rate", "half nodes cannot mine")
    penetration = _get_number(doc, "penetration_bonus_db", where, 0.0)
    if penetration < 0:
        raise ValidationError(f"{where}.penetration_bonus_db", "must be >= 0")
    can_jump = doc.get("can_jump", False)
    if not isinstance(can_jump, bool):
        raise ParseError(f"field 'can_jump' in {where} must be a boolean")
    return CharacterProfile(
        name=name,
        role=role,
        radios=frozenset(radio_ids),
        move_speed=float(move_speed),
        mining_rate=mining_rate,
        penetration_bonus_db=float(penetration),
        can_jump=can_jump,
    )


def load_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document, applying defaults."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    doc = _expect_mapping(doc, "scenario")
    _take(
        doc,
        {
            "seed",
            "tick_rate",
            "block_interval_n",
            "difficulty_bits",
            "expiry_ticks",
            "map",
            "env",
            "radios",
            "energy",
            "catalog",
            "scoring",
        },
        "scenario",
    )
    seed = _get_int(doc, "seed", "scenario", required=True)
    tick_rate = _get_int(doc, "tick_rate", "scenario", TICK_RATE)
    if tick_rate != TICK_RATE:
        raise ValidationError("tick_rate", f"fixed at {TICK_RATE} ticks/second")
    block_interval = _get_int(doc, "block_interval_n", "scenario", 5)
    if block_interval < 1:
        raise ValidationError("block_interval_n", "must be >= 1 second")
    difficulty = _get_int(doc, "difficulty_bits", "scenario", 8)
    if not 0 <= difficulty <= 256:
        raise ValidationError("difficulty_bits", "must be in [0, 256]")
    expiry = _get_int(doc, "expiry_ticks", "scenario", 3000)
    if expiry < 1:
        raise ValidationError("expiry_ticks", "must be >= 1 tick")
    if "map" not in doc:
        raise ParseError("missing required field 'map' in scenario")
    map_params = _parse_map(doc["map"])
    env = _parse_env(doc.get("env", {}))
    radios = _parse_radios(doc.get("radios", {}))
    energy = _parse_energy(doc.get("energy", {}))
    scoring = _parse_scoring(doc.get("scoring", {}))
    catalog_doc = doc.get("catalog")
    if not isinstance(catalog_doc, list) or not catalog_doc:
        raise ParseError("scenario needs a non-empty 'catalog' list")
    catalog = tuple(_parse_profile(p, i, radios) for i, p in enumerate(catalog_doc))
    names = [p.name for p in catalog]
    if len(set(names)) != len(names):
        raise ValidationError("catalog", "character names must be unique")
    return Scenario(
        seed=seed,
        map=map_params,
        catalog=catalog,
        tick_rate=tick_rate,
        block_interval_n=block_interval,
        difficulty_bits=difficulty,
        expiry_ticks=expiry,
        env=env,
        radios=radios,
        energy=energy,
        scoring=scoring,
    )


def scenario_to_dict(sc: Scenario) -> dict:
    """Canonical fully-defaulted dict form, reparseable by load_scenario."""
    return {
        "seed": sc.seed,
        "tick_rate": sc.tick_rate,
        "block_interval_n": sc.block_interval_n,
        "difficulty_bits": sc.difficulty_bits,
        "expiry_ticks": sc.expiry_ticks,
        "map": {
            "width": sc.map.width,
            "height": sc.map.height,
            "geography": sc.map.geography,
            "road_density": sc.map.road_density,
            "obstacle_density": sc.map.obstacle_density,
            "stations": [[tech, count] for tech, count in sc.map.stations],
        },
        "env": {
            "exponent": {geo: sc.env.exponent[geo] for geo in GEOGRAPHIES},
            "obstacle_loss": {k: sc.env.obstacle_loss[k] for k in OBSTACLE_KINDS},
        },
        "radios": {
            tech_id: {
                "tx_power_dbm": radio.tx_power_dbm,
                "sensitivity_dbm": radio.sensitivity_dbm,
                "ref_loss_db": radio.ref_loss_db,
            }
            for tech_id, radio in sorted(sc.radios.items())
        },
        "energy": {
            "initial": sc.energy.initial_mu / ENERGY_SCALE,
            "idle_cost": sc.energy.idle_cost_mu / ENERGY_SCALE,
            "move_cost": sc.energy.move_cost_mu / ENERGY_SCALE,
            "transmit_cost": sc.energy.transmit_cost_mu / ENERGY_SCALE,
            "hash_cost": sc.energy.hash_cost_mu / ENERGY_SCALE,
        },
        "scoring": {
            "create_points": sc.scoring.create_points,
            "mine_points": sc.scoring.mine_points,
        },
        "catalog": [
            {
                "name": p.name,
                "role": p.role.value,
                "radios": sorted(p.radios),
                "move_speed": p.move_speed,
                "mining_rate": p.mining_rate,
                "penetration_bonus_db": p.penetration_bonus_db,
                "can_jump": p.can_jump,
            }
            for p in sc.catalog
        ],
    }
