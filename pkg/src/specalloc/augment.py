"""Synthetic-sample generation.

Three schemes, each preserving the original label: lowering the power of
transmitters far from the binding one (verified afterwards against the
oracle and dropped when the true label drifts), extending the sensor
list with interpolated readings, and rotating whole worlds about the
region center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .entities import Location, PrimaryUser, PuReceiver, Scenario, SecondaryUser, SpectrumSensor
from .labeling import LabelRow
from .oracle import AllocationDecision, OracleConfig, optimal_power
from .propagation import LogDistanceParams
from .units import mw_to_dbm

__all__ = [
    "FarPuConfig",
    "FarPuSynthetic",
    "far_pu_synthetics",
    "idw_interpolate",
    "augment_idw",
    "augment_rotate",
    "label_drift_db",
]


def label_drift_db(a: AllocationDecision, b: AllocationDecision) -> float:
    """Absolute dB difference between two decisions; a grant/denial flip
    counts as infinite drift."""
    if a.is_granted != b.is_granted:
        return math.inf
    if not a.is_granted:
        return 0.0
    return abs(a.power_dbm - b.power_dbm)


@dataclass(frozen=True)
class FarPuConfig:
    d_far_m: float = 500.0
    delta_db: float = 10.0
    per_sample: int = 2
    drift_tolerance_db: float = 0.5


@dataclass(frozen=True)
class FarPuSynthetic:
    scenario: Scenario
    label: LabelRow
    true_drift_db: float
    kept: bool


def far_pu_synthetics(
    scenario: Scenario,
    label: LabelRow,
    model: LogDistanceParams,
    cfg: OracleConfig,
    acfg: FarPuConfig,
    rng: np.random.Generator,
) -> list[FarPuSynthetic]:
    """Reduce the powers of PUs far from the binding PU, keep the label.

    Each synthetic draws an independent reduction in (0, delta_db] per far
    PU. A verification pass recomputes the oracle label; synthetics whose
    true label moved by more than the tolerance are marked not kept.
    """
    binding_id = label.decision.binding_pu_id
    if binding_id is None:
        return []
    binding = next(pu for pu in scenario.pus if pu.id == binding_id)
    far_ids = {
        pu.id
        for pu in scenario.pus
        if math.hypot(pu.loc.x_m - binding.loc.x_m, pu.loc.y_m - binding.loc.y_m) > acfg.d_far_m
    }
    if not far_ids:
        return []
    out = []
    for _ in range(acfg.per_sample):
        pus = tuple(
            replace(pu, tx_power_dbm=pu.tx_power_dbm - acfg.delta_db * (1.0 - float(rng.uniform())))
            if pu.id in far_ids
            else pu
            for pu in scenario.pus
        )
        synth = replace(scenario, pus=pus)
        relabeled = optimal_power(synth, synth.sus[0], model, cfg)
        drift = label_drift_db(label.decision, relabeled)
        out.append(
            FarPuSynthetic(
                scenario=synth,
                label=label,
                true_drift_db=drift,
                kept=drift <= acfg.drift_tolerance_db,
            )
        )
    return out


def idw_interpolate(
    sensors: list[SpectrumSensor],
    loc: Location,
    k_nearest: int = 4,
    linear_domain: bool = False,
) -> float:
    """Inverse-distance-weighted reading at a new location, w = 1/log10(d).

    Interpolation happens in dBm (matching the log-distance behaviour the
    weights assume); set linear_domain=True to average in mW instead. A
    sensor within 1 m (where log10(d) <= 0) short-circuits to that
    sensor's reading.
    """
    usable = [s for s in sensors if s.reading_dbm is not None]
    if len(usable) < k_nearest:
        raise ValueError(f"need at least {k_nearest} sensors with readings, got {len(usable)}")
    d = np.array([math.hypot(s.loc.x_m - loc.x_m, s.loc.y_m - loc.y_m) for s in usable])
    near = np.where(d <= 1.0)[0]
    if near.size:
        return float(usable[int(near[np.argmin(d[near])])].reading_dbm)
    order = np.argsort(d, kind="stable")[:k_nearest]
    w = 1.0 / np.log10(d[order])
    p = np.array([usable[int(i)].reading_dbm for i in order])
    if linear_domain:
        return mw_to_dbm(float(np.dot(w, np.power(10.0, p / 10.0)) / np.sum(w)))
    return float(np.dot(w, p) / np.sum(w))


def augment_idw(scenario: Scenario, new_locs: list[Location], k_nearest: int = 4) -> Scenario:
    """Extend the sensor list with interpolated readings; label unchanged."""
    sensors = list(scenario.sensors)
    next_id = max((s.id for s in sensors), default=-1) + 1
    for loc in new_locs:
        reading = idw_interpolate(sensors, loc, k_nearest=k_nearest)
        sensors.append(SpectrumSensor(next_id, loc, reading))
        next_id += 1
    return replace(scenario, sensors=tuple(sensors))


def _rotate_loc(loc: Location, cx: float, cy: float, degrees: int) -> Location:
    dx, dy = loc.x_m - cx, loc.y_m - cy
    if degrees == 90:
        return Location(cx - dy, cy + dx)
    if degrees == 180:
        return Location(cx - dx, cy - dy)
    if degrees == 270:
        return Location(cx + dy, cy - dx)
    raise ValueError("rotation must be one of 90, 180, 270 degrees")


def augment_rotate(scenario: Scenario, degrees: int) -> Scenario:
    """Rotate every entity about the region center; label unchanged.

    Images are re-encoded from the rotated world rather than pixel-rotated
    so disks render identically. Requires a square region.
    """
    if degrees not in (90, 180, 270):
        raise ValueError("rotation must be one of 90, 180, 270 degrees")
    region = scenario.region
    if region.width_m != region.height_m:
        raise ValueError("rotation augmentation needs a square region")
    cx = cy = region.width_m / 2.0

    def rot(loc: Location) -> Location:
        return _rotate_loc(loc, cx, cy, degrees)

    pus = tuple(
        PrimaryUser(
            pu.id,
            rot(pu.loc),
            pu.tx_power_dbm,
            tuple(PuReceiver(r.id, rot(r.loc)) for r in pu.receivers),
        )
        for pu in scenario.pus
    )
    sensors = tuple(SpectrumSensor(s.id, rot(s.loc), s.reading_dbm) for s in scenario.sensors)
    sus = tuple(SecondaryUser(u.id, rot(u.loc)) for u in scenario.sus)
    active = tuple((SecondaryUser(u.id, rot(u.loc)), q) for u, q in scenario.active_sus)
    return replace(scenario, pus=pus, sensors=sensors, sus=sus, active_sus=active)
