"""Shared fixtures: hand-built worlds and compact scenario documents."""

from __future__ import annotations

import json

import numpy as np
import pytest

from chaincourier.scenario import Scenario, load_scenario
from chaincourier.worldgen import BaseStation, TileKind, World

CHAR_KINDS = {
    "r": TileKind.ROAD,
    ".": TileKind.OPEN,
    "B": TileKind.BUILDING,
    "C": TileKind.CAR,
}


def world_from_rows(rows: list[str], stations: list[BaseStation] = (), geography="urban") -> World:
    """Build a world from ascii art: r=road, .=open, B=building, C=car."""
    height = len(rows)
    width = len(rows[0])
    tiles = np.zeros((height, width), dtype=np.uint8)
    for y, row in enumerate(rows):
        assert len(row) == width, "ragged map rows"
        for x, ch in enumerate(row):
            tiles[y, x] = CHAR_KINDS[ch]
    return World(
        width=width,
        height=height,
        geography=geography,
        tiles=tiles,
        stations=tuple(stations),
    )


def road_strip(length: int) -> World:
    """A 1-row straight road of the given length."""
    return world_from_rows(["r" * length])


def scenario_doc(**overrides) -> dict:
    """A small valid scenario document; override any top-level field."""
    doc = {
        "seed": 11,
        "map": {"width": 16, "height": 16, "road_density": 0.3, "obstacle_density": 0.05},
        "catalog": [
            {"name": "Alice", "role": "full", "radios": ["wifi", "3g", "5g"], "move_speed": 2.0},
            {"name": "Bob", "role": "half", "radios": ["wifi", "bluetooth"], "move_speed": 2.0},
        ],
    }
    doc.update(overrides)
    return doc


def make_scenario(**overrides) -> Scenario:
    return load_scenario(json.dumps(scenario_doc(**overrides)))


@pytest.fixture
def small_scenario() -> Scenario:
    return make_scenario()
