"""Shared scenario builders and an independent brute-force allocator.

The brute force implements the SNR feasibility check from first
principles (explicit loops over receivers) and scans a dB grid for the
largest non-violating power; it deliberately shares no code path with
the analytic allocator it cross-checks.
"""

import math

import numpy as np
import pytest

from specalloc.entities import Location, PrimaryUser, PuReceiver, Region, Scenario, SecondaryUser
from specalloc.propagation import LogDistanceParams, path_loss_db


def make_pu(pu_id, x, y, power_dbm, pur_locs, pur_id_base=None):
    base = pu_id * 100 if pur_id_base is None else pur_id_base
    receivers = tuple(PuReceiver(base + k, Location(px, py)) for k, (px, py) in enumerate(pur_locs))
    return PrimaryUser(pu_id, Location(x, y), power_dbm, receivers)


def flat_model(alpha=3.0, pl0=40.0, d0=1.0, seed=0):
    """Shadowing/fading-free log-distance model."""
    return LogDistanceParams(alpha=alpha, pl0_db=pl0, d0_m=d0, shadowing_sigma_db=0.0, fading_amplitude_db=0.0, seed=seed)


@pytest.fixture
def region():
    return Region(1000.0, 1000.0, 10.0)


def brute_force_feasible(scenario, grants, model, cfg):
    """First-principles SNR check: loops over every PUR explicitly."""
    beta = 10.0 ** (cfg.beta_db / 10.0)
    noise = 10.0 ** (cfg.noise_dbm / 10.0)
    for pu in scenario.pus:
        for pur in pu.receivers:
            s = 10.0 ** ((pu.tx_power_dbm - path_loss_db(model, pu.loc, pur.loc)) / 10.0)
            i = noise
            for other in scenario.pus:
                if other.id == pu.id:
                    continue
                i += 10.0 ** ((other.tx_power_dbm - path_loss_db(model, other.loc, pur.loc)) / 10.0)
            for su, q in scenario.active_sus:
                i += 10.0 ** ((q - path_loss_db(model, su.loc, pur.loc)) / 10.0)
            for su, q in grants:
                if q is None:
                    continue
                i += 10.0 ** ((q - path_loss_db(model, su.loc, pur.loc)) / 10.0)
            if s / i < beta * (1.0 - 1e-9):
                return False
    return True


def brute_force_power(scenario, su, model, cfg, step=0.01):
    """Largest power on a dB grid passing the feasibility check, or None.

    Vectorized over the grid for speed but still independent of the
    analytic path: per PUR it tests s/(i + q*rho) >= beta directly.
    """
    beta = 10.0 ** (cfg.beta_db / 10.0)
    noise = 10.0 ** (cfg.noise_dbm / 10.0)
    n_steps = int(round((cfg.max_su_power_dbm - cfg.denial_floor_dbm) / step))
    grid = cfg.denial_floor_dbm + step * np.arange(n_steps + 1)
    grid_mw = np.power(10.0, grid / 10.0)
    ok = np.ones(grid.shape, dtype=bool)
    for pu in scenario.pus:
        for pur in pu.receivers:
            s = 10.0 ** ((pu.tx_power_dbm - path_loss_db(model, pu.loc, pur.loc)) / 10.0)
            i = noise
            for other in scenario.pus:
                if other.id != pu.id:
                    i += 10.0 ** ((other.tx_power_dbm - path_loss_db(model, other.loc, pur.loc)) / 10.0)
            for asu, q in scenario.active_sus:
                i += 10.0 ** ((q - path_loss_db(model, asu.loc, pur.loc)) / 10.0)
            rho = 10.0 ** (-path_loss_db(model, su.loc, pur.loc) / 10.0)
            ok &= s >= beta * (1.0 - 1e-9) * (i + grid_mw * rho)
    if not ok.any():
        return None
    return float(grid[np.nonzero(ok)[0][-1]])


def random_small_scenario(rng, region_obj=None, max_pus=3, max_purs=3, power_range=(-10.0, 10.0)):
    """Small random world for oracle-vs-brute-force sweeps."""
    reg = region_obj or Region(1000.0, 1000.0, 10.0)
    n_pu = int(rng.integers(1, max_pus + 1))
    pus = []
    pur_id = 0
    for k in range(n_pu):
        x, y = rng.uniform(100, 900, 2)
        n_purs = int(rng.integers(1, max_purs + 1))
        purs = []
        for _ in range(n_purs):
            ang = rng.uniform(0, 2 * math.pi)
            r = rng.uniform(5, 50)
            purs.append(PuReceiver(pur_id, Location(x + r * math.cos(ang), y + r * math.sin(ang))))
            pur_id += 1
        pus.append(PrimaryUser(k, Location(x, y), float(rng.uniform(*power_range)), tuple(purs)))
    su = SecondaryUser(0, Location(float(rng.uniform(0, 1000)), float(rng.uniform(0, 1000))))
    return Scenario(region=reg, pus=tuple(pus), sus=(su,), seed=int(rng.integers(0, 2**63))), su
