"""Log-distance path-loss model and radio technology catalog.

Signal attenuation follows the classic log-distance form with a fixed
reference loss at 10 m (one tile) plus per-obstacle penetration losses:

    PL(d) = PL0 + 10 * n * log10(max(d, 10) / 10) + sum(obstacle losses)

where the exponent n depends on the geography (urban vs rural) and each
obstacle on the straight line between the endpoints adds a fixed loss,
reduced by the receiver's penetration bonus (floored at zero per obstacle).
Distances below the 10 m reference clamp to PL0, so a link at reference
distance always closes for any sane radio.

Four radio technologies are modeled.  Bluetooth and Wi-Fi are direct
device-to-device; 3G and 5G are infrastructure radios that only work inside
base-station coverage.  All numbers here are defaults; scenario files may
override any of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

REFERENCE_DISTANCE_M = 10.0

GEOGRAPHIES = ("urban", "rural")
OBSTACLE_KINDS = ("building", "car")

# Canonical tech ordering, used for deterministic tie-breaking.
TECH_IDS = ("bluetooth", "wifi", "3g", "5g")
DIRECT_TECHS = frozenset({"bluetooth", "wifi"})
INFRASTRUCTURE_TECHS = frozenset({"3g", "5g"})


class DirectModeTech(Exception):
    """Coverage queried for a device-to-device technology."""


@dataclass(frozen=True)
class RadioTech:
    """One radio technology's link-budget parameters.

    tx_power_dbm is the transmit power used on device-to-device links; base
    stations carry their own transmit power.  A tech is usable end-to-end
    when received power (tx minus path loss) meets sensitivity_dbm.
    """

    id: str
    mode: str  # "direct" | "infrastructure"
    tx_power_dbm: float
    sensitivity_dbm: float
    ref_loss_db: float = 40.0

    def __post_init__(self):
        if self.id not in TECH_IDS:
            raise ValueError(f"unknown radio tech {self.id!r}")
        expected = "direct" if self.id in DIRECT_TECHS else "infrastructure"
        if self.mode != expected:
            raise ValueError(f"tech {self.id} must be {expected} mode")
        if not self.sensitivity_dbm < self.tx_power_dbm - self.ref_loss_db:
            raise ValueError(
                f"tech {self.id}: sensitivity must close a reference-distance link"
            )

    @property
    def direct(self) -> bool:
        return self.mode == "direct"


def default_radios() -> dict[str, RadioTech]:
    """Default radio parameter table, ordered Bluetooth < WiFi < cellular in range."""
    return {
        "bluetooth": RadioTech("bluetooth", "direct", 0.0, -90.0),
        "wifi": RadioTech("wifi", "direct", 20.0, -85.0),
        "3g": RadioTech("3g", "infrastructure", 43.0, -110.0),
        "5g": RadioTech("5g", "infrastructure", 40.0, -100.0),
    }


def default_station_power() -> dict[str, float]:
    return {tech: radio.tx_power_dbm for tech, radio in default_radios().items() if not radio.direct}


@dataclass(frozen=True)
class PropagationEnv:
    """Path-loss exponents per geography and penetration loss per obstacle kind."""

    exponent: Mapping[str, float] = field(
        default_factory=lambda: {"urban": 3.5, "rural": 2.7}
    )
    obstacle_loss: Mapping[str, float] = field(
        default_factory=lambda: {"building": 15.0, "car": 3.0}
    )

    def __post_init__(self):
        for geo in GEOGRAPHIES:
            if geo not in self.exponent:
                raise ValueError(f"missing path-loss exponent for {geo}")
            if self.exponent[geo] < 2.0:
                raise ValueError(f"path-loss exponent for {geo} must be >= 2.0")
        for kind in OBSTACLE_KINDS:
            if kind not in self.obstacle_loss:
                raise ValueError(f"missing obstacle loss for {kind}")
            if self.obstacle_loss[kind] < 0.0:
                raise ValueError(f"obstacle loss for {kind} must be >= 0")


def path_loss_db(
    env: PropagationEnv,
    geography: str,
    distance_m: float,
    obstacles: Sequence[str] = (),
    penetration_bonus_db: float = 0.0,
    ref_loss_db: float = 40.0,
) -> float:
    """Total path loss in dB over a straight line.

    Monotone non-decreasing in distance and in obstacle count; the
    penetration bonus reduces each obstacle's loss but never below zero.
    """
    if distance_m < 0:
        raise ValueError("distance must be >= 0")
    if penetration_bonus_db < 0:
        raise ValueError("penetration bonus must be >= 0")
    n = env.exponent[geography]
    d = max(distance_m, REFERENCE_DISTANCE_M)
    loss = ref_loss_db + 10.0 * n * math.log10(d / REFERENCE_DISTANCE_M)
    for kind in obstacles:
        loss += max(0.0, env.obstacle_loss[kind] - penetration_bonus_db)
    return loss
