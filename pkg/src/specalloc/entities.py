"""Domain types for one shared-spectrum world snapshot.

All types are immutable after construction and safe to share read-only
across worker processes. The JSONL text form (one scenario per line)
round-trips bit-exactly because floats are serialized with shortest
round-trip repr.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .units import subarea_index

__all__ = [
    "Region",
    "Location",
    "PuReceiver",
    "PrimaryUser",
    "SecondaryUser",
    "SpectrumSensor",
    "Scenario",
    "scenario_to_dict",
    "scenario_from_dict",
    "scenario_to_json",
    "scenario_from_json",
]


@dataclass(frozen=True)
class Region:
    """Rectangular deployment area; grid_cell_m is the quantization step
    for deterministic randomness and subarea weights."""

    width_m: float = 1000.0
    height_m: float = 1000.0
    grid_cell_m: float = 10.0

    def __post_init__(self) -> None:
        if self.width_m <= 0 or self.height_m <= 0:
            raise ValueError("region dimensions must be positive")
        if not (0 < self.grid_cell_m <= min(self.width_m, self.height_m)):
            raise ValueError("grid_cell_m must be in (0, min(width, height)]")

    def contains(self, loc: "Location") -> bool:
        return 0.0 <= loc.x_m <= self.width_m and 0.0 <= loc.y_m <= self.height_m

    def subarea(self, loc: "Location") -> tuple[int, int]:
        return subarea_index(loc.x_m, loc.y_m, self.width_m, self.height_m, self.grid_cell_m)


@dataclass(frozen=True)
class Location:
    x_m: float
    y_m: float


@dataclass(frozen=True)
class PuReceiver:
    id: int
    loc: Location


@dataclass(frozen=True)
class PrimaryUser:
    id: int
    loc: Location
    tx_power_dbm: float
    receivers: tuple[PuReceiver, ...]

    def __post_init__(self) -> None:
        if len(self.receivers) == 0:
            raise ValueError(f"primary user {self.id} has no receivers")


@dataclass(frozen=True)
class SecondaryUser:
    id: int
    loc: Location


@dataclass(frozen=True)
class SpectrumSensor:
    id: int
    loc: Location
    reading_dbm: float | None = None


@dataclass(frozen=True)
class Scenario:
    """One world snapshot: the feature side of a training sample."""

    region: Region
    pus: tuple[PrimaryUser, ...] = ()
    sensors: tuple[SpectrumSensor, ...] = ()
    sus: tuple[SecondaryUser, ...] = ()
    active_sus: tuple[tuple[SecondaryUser, float], ...] = ()
    seed: int = 0

    def with_sensors(self, sensors: tuple[SpectrumSensor, ...]) -> "Scenario":
        return replace(self, sensors=sensors)

    def with_active(self, active: tuple[tuple[SecondaryUser, float], ...]) -> "Scenario":
        return replace(self, active_sus=active)

    def all_purs(self) -> list[tuple[PrimaryUser, PuReceiver]]:
        """Flat (PU, PUR) pairs in deterministic scenario order."""
        return [(pu, pur) for pu in self.pus for pur in pu.receivers]


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "region": {
            "width_m": s.region.width_m,
            "height_m": s.region.height_m,
            "grid_cell_m": s.region.grid_cell_m,
        },
        "pus": [
            {
                "id": pu.id,
                "x": pu.loc.x_m,
                "y": pu.loc.y_m,
                "power_dbm": pu.tx_power_dbm,
                "purs": [{"id": r.id, "x": r.loc.x_m, "y": r.loc.y_m} for r in pu.receivers],
            }
            for pu in s.pus
        ],
        "sensors": [
            {"id": ss.id, "x": ss.loc.x_m, "y": ss.loc.y_m, "reading_dbm": ss.reading_dbm}
            for ss in s.sensors
        ],
        "sus": [{"id": su.id, "x": su.loc.x_m, "y": su.loc.y_m} for su in s.sus],
        "active_sus": [
            {"id": su.id, "x": su.loc.x_m, "y": su.loc.y_m, "power_dbm": p}
            for su, p in s.active_sus
        ],
        "seed": s.seed,
    }


def scenario_from_dict(d: dict) -> Scenario:
    region = Region(**d["region"])
    pus = tuple(
        PrimaryUser(
            id=p["id"],
            loc=Location(p["x"], p["y"]),
            tx_power_dbm=p["power_dbm"],
            receivers=tuple(PuReceiver(r["id"], Location(r["x"], r["y"])) for r in p["purs"]),
        )
        for p in d["pus"]
    )
    sensors = tuple(
        SpectrumSensor(ss["id"], Location(ss["x"], ss["y"]), ss["reading_dbm"]) for ss in d["sensors"]
    )
    sus = tuple(SecondaryUser(u["id"], Location(u["x"], u["y"])) for u in d["sus"])
    active = tuple(
        (SecondaryUser(a["id"], Location(a["x"], a["y"])), a["power_dbm"]) for a in d["active_sus"]
    )
    return Scenario(region=region, pus=pus, sensors=sensors, sus=sus, active_sus=active, seed=d["seed"])


def scenario_to_json(s: Scenario) -> str:
    """Single-line JSON form used in scenarios.jsonl."""
    return json.dumps(scenario_to_dict(s), separators=(",", ":"))


def scenario_from_json(line: str) -> Scenario:
    return scenario_from_dict(json.loads(line))
