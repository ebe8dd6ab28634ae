"""Procedural tile world: roads, obstacles, base stations.

The world is a grid of 10 m x 10 m tiles.  Roads are carved by seeded
drunkard's-walk corridors that always extend from already-carved road, so
the road network is one connected component by construction.  Obstacles
(buildings and cars) fill a share of the remaining tiles, and base stations
land on random non-obstacle tiles.  Everything is a pure function of
(seed, params): the same inputs rebuild the identical world.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterator

import numpy as np
from scipy import ndimage

from .rng import STREAM_WORLD, SplitMix64, derive_seed
from .propagation import INFRASTRUCTURE_TECHS, default_station_power

TILE_SIZE_M = 10.0

# Neighbor order north, east, south, west; used for every directional
# tie-break in the package.  North is decreasing y.
DIRECTIONS = (("n", 0, -1), ("e", 1, 0), ("s", 0, 1), ("w", -1, 0))
DIRECTION_VECTORS = {name: (dx, dy) for name, dx, dy in DIRECTIONS}

GENERATION_ATTEMPTS = 64


class TileKind(IntEnum):
    ROAD = 0
    OPEN = 1
    BUILDING = 2
    CAR = 3

    @property
    def obstacle(self) -> bool:
        return self >= TileKind.BUILDING

    @property
    def kind_name(self) -> str:
        return self.name.lower()


class InvalidParams(ValueError):
    pass


class GenerationFailed(Exception):
    """Road connectivity constraint unmet after the retry budget."""


class OutOfBounds(IndexError):
    pass


class NotARoadTile(ValueError):
    pass


@dataclass(frozen=True)
class BaseStation:
    tech: str
    pos: tuple[int, int]
    tx_power_dbm: float


@dataclass(frozen=True)
class MapParams:
    width: int
    height: int
    geography: str = "urban"
    road_density: float = 0.2
    obstacle_density: float = 0.1
    stations: tuple[tuple[str, int], ...] = ()

    def validate(self) -> None:
        if self.width < 8 or self.height < 8:
            raise InvalidParams("map must be at least 8x8 tiles")
        if not 0.0 < self.road_density <= 1.0:
            raise InvalidParams("road_density must be in (0, 1]")
        if not 0.0 <= self.obstacle_density < 1.0:
            raise InvalidParams("obstacle_density must be in [0, 1)")
        if self.geography not in ("urban", "rural"):
            raise InvalidParams(f"unknown geography {self.geography!r}")
        for tech, count in self.stations:
            if tech not in INFRASTRUCTURE_TECHS:
                raise InvalidParams(f"station tech {tech!r} is not infrastructure mode")
            if count < 0:
                raise InvalidParams("station count must be >= 0")


@dataclass
class World:
    """Immutable-after-construction tile world.

    tiles is indexed [y, x] with TileKind integer codes.  The obstacle-line
    memo caches segment traversals; entries are pure recomputations, so
    concurrent readers stay safe.
    """

    width: int
    height: int
    geography: str
    tiles: np.ndarray
    stations: tuple[BaseStation, ...] = ()
    _line_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def in_bounds(self, pos: tuple[int, int]) -> bool:
        x, y = pos
        return 0 <= x < self.width and 0 <= y < self.height

    def kind(self, pos: tuple[int, int]) -> TileKind:
        if not self.in_bounds(pos):
            raise OutOfBounds(f"tile {pos} outside {self.width}x{self.height} map")
        return TileKind(int(self.tiles[pos[1], pos[0]]))

    def is_road(self, pos: tuple[int, int]) -> bool:
        return self.in_bounds(pos) and self.tiles[pos[1], pos[0]] == TileKind.ROAD

    def road_tiles(self) -> list[tuple[int, int]]:
        """All road tiles in row-major order."""
        ys, xs = np.nonzero(self.tiles == TileKind.ROAD)
        return [(int(x), int(y)) for y, x in zip(ys, xs)]

    def check_invariants(self) -> None:
        if self.tiles.shape != (self.height, self.width):
            raise InvalidParams("grid dimensions do not match width x height")
        if largest_road_component(self.tiles) < 2:
            raise InvalidParams("road network must contain a component of >= 2 tiles")
        for station in self.stations:
            if not self.in_bounds(station.pos):
                raise InvalidParams(f"station at {station.pos} out of bounds")
            if self.kind(station.pos).obstacle:
                raise InvalidParams(f"station at {station.pos} sits on an obstacle")


def distance_m(a: tuple[int, int], b: tuple[int, int]) -> float:
    """Distance between tile centers in meters."""
    return TILE_SIZE_M * math.hypot(b[0] - a[0], b[1] - a[1])


def largest_road_component(tiles: np.ndarray) -> int:
    road = tiles == TileKind.ROAD
    labels, count = ndimage.label(road, structure=[[0, 1, 0], [1, 1, 1], [0, 1, 0]])
    if count == 0:
        return 0
    return int(np.max(np.bincount(labels.ravel())[1:]))


def generate_world(seed: int, params: MapParams, station_power=None) -> World:
    """Build a random world satisfying the road-connectivity constraint.

    Retries with fresh derived seeds up to the attempt budget; raises
    GenerationFailed if the largest road component never reaches
    road_density/2 of all tiles.
    """
    params.validate()
    if station_power is None:
        station_power = default_station_power()
    total = params.width * params.height
    required = params.road_density / 2.0 * total

    for attempt in range(GENERATION_ATTEMPTS):
        rng = SplitMix64(derive_seed(seed, STREAM_WORLD, attempt))
        tiles = _carve_roads(rng, params)
        if largest_road_component(tiles) < max(required, 2):
            continue
        _scatter_obstacles(rng, tiles, params)
        stations = _place_stations(rng, tiles, params, station_power)
        world = World(
            width=params.width,
            height=params.height,
            geography=params.geography,
            tiles=tiles,
            stations=stations,
        )
        world.check_invariants()
        return world
    raise GenerationFailed(
        f"no road layout met the connectivity constraint in {GENERATION_ATTEMPTS} attempts"
    )


def _carve_roads(rng: SplitMix64, params: MapParams) -> np.ndarray:
    w, h = params.width, params.height
    tiles = np.full((h, w), TileKind.OPEN, dtype=np.uint8)
    target = max(2, round(params.road_density * w * h))
    budget = target * 12

    x = rng.randrange(w)
    y = rng.randrange(h)
    tiles[y, x] = TileKind.ROAD
    carved = [(x, y)]
    dir_idx = rng.randrange(4)
    steps = 0
    since_restart = 0
    while len(carved) < target and steps < budget:
        steps += 1
        since_restart += 1
        # Corridors: mostly keep heading, occasionally turn; restart from a
        # carved tile now and then so the network branches.
        if since_restart > (w + h) // 2:
            x, y = carved[rng.randrange(len(carved))]
            dir_idx = rng.randrange(4)
            since_restart = 0
        if rng.random() >= 0.6:
            dir_idx = rng.randrange(4)
        _, dx, dy = DIRECTIONS[dir_idx]
        nx, ny = x + dx, y + dy
        if not (0 <= nx < w and 0 <= ny < h):
            dir_idx = rng.randrange(4)
            continue
        x, y = nx, ny
        if tiles[y, x] != TileKind.ROAD:
            tiles[y, x] = TileKind.ROAD
            carved.append((x, y))
    return tiles


def _scatter_obstacles(rng: SplitMix64, tiles: np.ndarray, params: MapParams) -> None:
    h, w = tiles.shape
    wanted = round(params.obstacle_density * w * h)
    if wanted <= 0:
        return
    open_cells = [(x, y) for y in range(h) for x in range(w) if tiles[y, x] == TileKind.OPEN]
    rng.shuffle(open_cells)
    building_share = 0.7 if params.geography == "urban" else 0.5
    for x, y in open_cells[:wanted]:
        kind = TileKind.BUILDING if rng.random() < building_share else TileKind.CAR
        tiles[y, x] = kind


def _place_stations(rng, tiles, params, station_power) -> tuple[BaseStation, ...]:
    h, w = tiles.shape
    free = [
        (x, y)
        for y in range(h)
        for x in range(w)
        if not TileKind(int(tiles[y, x])).obstacle
    ]
    rng.shuffle(free)
    stations = []
    cursor = 0
    for tech, count in params.stations:
        power = station_power.get(tech)
        if power is None:
            raise InvalidParams(f"no transmit power known for station tech {tech!r}")
        for _ in range(count):
            if cursor >= len(free):
                raise GenerationFailed("not enough non-obstacle tiles for base stations")
            stations.append(BaseStation(tech=tech, pos=free[cursor], tx_power_dbm=power))
            cursor += 1
    return tuple(stations)


def line_tiles(a: tuple[int, int], b: tuple[int, int]) -> Iterator[tuple[int, int]]:
    """Interior tiles of the discrete line a -> b, endpoints excluded.

    Integer DDA: the longer axis steps one tile at a time and the other
    rounds to the nearest tile, so the traversal is exact and the same set
    comes back for either endpoint order once the segment is canonicalized.
    """
    (x0, y0), (x1, y1) = a, b
    dx, dy = x1 - x0, y1 - y0
    steps = max(abs(dx), abs(dy))
    for i in range(1, steps):
        # round(x0 + dx*i/steps + 1/2) in exact integer arithmetic
        x = (2 * x0 * steps + 2 * dx * i + steps) // (2 * steps)
        y = (2 * y0 * steps + 2 * dy * i + steps) // (2 * steps)
        yield x, y


def obstacles_between(world: World, a: tuple[int, int], b: tuple[int, int]) -> tuple[str, ...]:
    """Obstacle kind names crossed by the segment between two tiles.

    Symmetric in (a, b); results are memoized on the world since the grid
    never changes after generation.
    """
    for pos in (a, b):
        if not world.in_bounds(pos):
            raise OutOfBounds(f"tile {pos} outside map")
    key = (a, b) if a <= b else (b, a)
    cached = world._line_cache.get(key)
    if cached is not None:
        return cached
    tiles = world.tiles
    kinds = tuple(
        TileKind(int(tiles[y, x])).kind_name
        for x, y in line_tiles(*key)
        if tiles[y, x] >= TileKind.BUILDING
    )
    world._line_cache[key] = kinds
    return kinds


def road_path(
    world: World, a: tuple[int, int], b: tuple[int, int]
) -> list[tuple[int, int]] | None:
    """Shortest 4-neighbor road path from a to b, inclusive; None if disconnected.

    Ties break by expanding neighbors in north, east, south, west order.
    """
    for pos in (a, b):
        if not world.in_bounds(pos):
            raise OutOfBounds(f"tile {pos} outside map")
        if not world.is_road(pos):
            raise NotARoadTile(f"tile {pos} is not a road tile")
    if a == b:
        return [a]
    tiles = world.tiles
    w, h = world.width, world.height
    parent: dict[tuple[int, int], tuple[int, int]] = {a: a}
    frontier = [a]
    while frontier:
        nxt: list[tuple[int, int]] = []
        for pos in frontier:
            x, y = pos
            for _, dx, dy in DIRECTIONS:
                np_ = (x + dx, y + dy)
                if not (0 <= np_[0] < w and 0 <= np_[1] < h):
                    continue
                if np_ in parent or tiles[np_[1], np_[0]] != TileKind.ROAD:
                    continue
                parent[np_] = pos
                if np_ == b:
                    path = [b]
                    while path[-1] != a:
                        path.append(parent[path[-1]])
                    path.reverse()
                    return path
                nxt.append(np_)
        frontier = nxt
    return None
