"""Seeded scenario sampling.

Every scenario is a pure function of (seed, index): counts and powers
draw uniformly from configured ranges, PU receivers fall uniformly in a
disk around their PU (rejection-sampled into the region), sensors sit on
a uniform square grid, and SUs are uniform over the region.

Two optional constraints keep sampled worlds usable as training data:
a minimum PU separation, and rejection of worlds whose PURs already
violate the SNR requirement (plus a margin) before any SU transmits.
Both are recorded in the dataset manifest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entities import Location, PrimaryUser, PuReceiver, Region, Scenario, SecondaryUser, SpectrumSensor
from .oracle import OracleConfig, _pur_arrays
from .propagation import LogDistanceParams

__all__ = ["SamplerConfig", "sample_scenario", "sample_scenarios", "sensor_grid"]

_MAX_TRIES = 1000


@dataclass(frozen=True)
class SamplerConfig:
    n_pus: tuple[int, int] = (10, 20)
    pu_power_dbm: tuple[float, float] = (-30.0, 0.0)
    purs_per_pu: tuple[int, int] = (5, 10)
    pur_radius_m: float = 50.0
    n_sensors: int = 400
    n_sus: int = 1
    seed: int = 0
    min_pu_separation_m: float = 0.0
    snr_margin_db: float | None = None

    def __post_init__(self) -> None:
        for name, (lo, hi) in (("n_pus", self.n_pus), ("pu_power_dbm", self.pu_power_dbm), ("purs_per_pu", self.purs_per_pu)):
            if lo > hi:
                raise ValueError(f"{name}: empty range ({lo}, {hi})")
        if self.pur_radius_m <= 0:
            raise ValueError("pur_radius_m must be > 0")
        root = math.isqrt(self.n_sensors)
        if root * root != self.n_sensors:
            raise ValueError("n_sensors must be a perfect square for grid placement")
        if self.n_sus < 0:
            raise ValueError("n_sus must be >= 0")


def sensor_grid(region: Region, n_sensors: int) -> tuple[SpectrumSensor, ...]:
    """Uniform sqrt(n) x sqrt(n) grid of sensors at cell centers."""
    k = math.isqrt(n_sensors)
    sensors = []
    sid = 0
    for i in range(k):
        for j in range(k):
            x = (j + 0.5) * region.width_m / k
            y = (i + 0.5) * region.height_m / k
            sensors.append(SpectrumSensor(sid, Location(x, y)))
            sid += 1
    return tuple(sensors)


def _place_pus(rng: np.random.Generator, region: Region, n: int, min_sep: float) -> list[Location]:
    locs: list[Location] = []
    tries = 0
    while len(locs) < n:
        x = float(rng.uniform(0.0, region.width_m))
        y = float(rng.uniform(0.0, region.height_m))
        if min_sep > 0 and any(math.hypot(x - l.x_m, y - l.y_m) < min_sep for l in locs):
            tries += 1
            if tries > _MAX_TRIES * n:
                raise ValueError(
                    f"cannot place {n} PUs with min separation {min_sep} m in the region"
                )
            continue
        locs.append(Location(x, y))
    return locs


def _sample_once(rng: np.random.Generator, cfg: SamplerConfig, region: Region, scenario_seed: int) -> Scenario:
    n_pu = int(rng.integers(cfg.n_pus[0], cfg.n_pus[1] + 1))
    pu_locs = _place_pus(rng, region, n_pu, cfg.min_pu_separation_m)
    pus = []
    pur_id = 0
    for k in range(n_pu):
        power = float(rng.uniform(cfg.pu_power_dbm[0], cfg.pu_power_dbm[1]))
        n_purs = int(rng.integers(cfg.purs_per_pu[0], cfg.purs_per_pu[1] + 1))
        receivers = []
        while len(receivers) < n_purs:
            r = cfg.pur_radius_m * math.sqrt(float(rng.uniform()))
            theta = float(rng.uniform(0.0, 2.0 * math.pi))
            loc = Location(pu_locs[k].x_m + r * math.cos(theta), pu_locs[k].y_m + r * math.sin(theta))
            if region.contains(loc):
                receivers.append(PuReceiver(pur_id, loc))
                pur_id += 1
        pus.append(PrimaryUser(k, pu_locs[k], power, tuple(receivers)))
    sus = tuple(
        SecondaryUser(i, Location(float(rng.uniform(0, region.width_m)), float(rng.uniform(0, region.height_m))))
        for i in range(cfg.n_sus)
    )
    return Scenario(region=region, pus=tuple(pus), sensors=sensor_grid(region, cfg.n_sensors), sus=sus, seed=scenario_seed)


def _world_feasible(s: Scenario, model: LogDistanceParams, oracle_cfg: OracleConfig, margin_db: float) -> bool:
    _, _, s_mw, i_mw, _, _ = _pur_arrays(s, model, oracle_cfg)
    if len(s_mw) == 0:
        return True
    required = oracle_cfg.beta_linear * 10.0 ** (margin_db / 10.0)
    return bool(np.all(s_mw >= required * i_mw))


def sample_scenario(
    cfg: SamplerConfig,
    region: Region,
    index: int,
    model: LogDistanceParams | None = None,
    oracle_cfg: OracleConfig | None = None,
) -> Scenario:
    """Deterministic scenario for (cfg.seed, index)."""
    ss = np.random.SeedSequence(entropy=cfg.seed, spawn_key=(index,))
    scenario_seed = int(ss.generate_state(1, dtype=np.uint64)[0])
    rng = np.random.default_rng(ss)
    if cfg.snr_margin_db is None:
        return _sample_once(rng, cfg, region, scenario_seed)
    if model is None or oracle_cfg is None:
        raise ValueError("snr_margin_db rejection needs a propagation model and oracle config")
    for _ in range(_MAX_TRIES):
        s = _sample_once(rng, cfg, region, scenario_seed)
        if _world_feasible(s, model, oracle_cfg, cfg.snr_margin_db):
            return s
    raise ValueError(
        f"no SNR-feasible world found in {_MAX_TRIES} tries for index {index}; relax snr_margin_db or the sampler ranges"
    )


def sample_scenarios(
    cfg: SamplerConfig,
    region: Region,
    count: int,
    model: LogDistanceParams | None = None,
    oracle_cfg: OracleConfig | None = None,
) -> list[Scenario]:
    if count < 1:
        raise ValueError("count must be >= 1")
    return [sample_scenario(cfg, region, i, model, oracle_cfg) for i in range(count)]
