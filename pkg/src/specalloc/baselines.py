"""Non-learning allocators used as comparison points.

Listen-before-talk grants a fixed power whenever the locally sensed
aggregate is below a threshold. The interpolation-based allocator has
both the PU parameters and the sensor readings: it estimates every
needed link loss from a fitted log-distance exponent, optionally
correcting its received-power estimates at protected receivers with an
inverse-distance-weighted field of sensor residuals, and applies the
same link-budget arithmetic as the oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entities import Location, Scenario, SecondaryUser
from .oracle import AllocationDecision, OracleConfig, received_power_dbm, _decide_from_bounds
from .propagation import LogDistanceParams

__all__ = ["LbtConfig", "IpbConfig", "lbt_allocate", "ipb_allocate"]


@dataclass(frozen=True)
class LbtConfig:
    threshold_dbm: float = -90.0
    grant_power_dbm: float = 0.0


@dataclass(frozen=True)
class IpbConfig:
    alpha_fitted: float = 3.3
    pl0_db: float = 56.0
    d0_m: float = 25.0
    use_idw_correction: bool = False
    idw_neighbors: int = 4

    def __post_init__(self) -> None:
        if self.alpha_fitted <= 0:
            raise ValueError("alpha_fitted must be > 0")
        if self.idw_neighbors < 1:
            raise ValueError("idw_neighbors must be >= 1")


def lbt_allocate(
    scenario: Scenario,
    su: SecondaryUser,
    model: LogDistanceParams,
    cfg: OracleConfig,
    lbt: LbtConfig,
) -> AllocationDecision:
    """Grant the fixed power iff the aggregate received power at the SU
    location (computed exactly like a sensor reading) is below threshold."""
    sensed = received_power_dbm(scenario, su.loc, model, cfg)
    if sensed < lbt.threshold_dbm:
        return AllocationDecision.granted(lbt.grant_power_dbm)
    return AllocationDecision.denied()


def _est_loss(ipb: IpbConfig, ax, ay, bx, by) -> np.ndarray:
    d = np.hypot(np.asarray(ax, dtype=float) - bx, np.asarray(ay, dtype=float) - by)
    d = np.maximum(d, ipb.d0_m)
    return ipb.pl0_db + 10.0 * ipb.alpha_fitted * np.log10(d / ipb.d0_m)


def _bias_field(scenario: Scenario, cfg: OracleConfig, ipb: IpbConfig):
    """Per-sensor residual (observed - model-predicted reading, dB) plus an
    IDW evaluator with log-distance weights over the nearest sensors."""
    sensors = [s for s in scenario.sensors if s.reading_dbm is not None]
    if len(sensors) < ipb.idw_neighbors:
        raise ValueError(
            f"idw correction needs >= {ipb.idw_neighbors} sensors with readings, got {len(sensors)}"
        )
    sx = np.array([s.loc.x_m for s in sensors])
    sy = np.array([s.loc.y_m for s in sensors])
    pu_x = np.array([pu.loc.x_m for pu in scenario.pus])
    pu_y = np.array([pu.loc.y_m for pu in scenario.pus])
    pu_p = np.array([pu.tx_power_dbm for pu in scenario.pus])
    if len(pu_x):
        loss = _est_loss(ipb, pu_x[:, None], pu_y[:, None], sx[None, :], sy[None, :])
        pred_mw = np.sum(np.power(10.0, (pu_p[:, None] - loss) / 10.0), axis=0) + cfg.noise_mw
    else:
        pred_mw = np.full(len(sx), cfg.noise_mw)
    residual = np.array([s.reading_dbm for s in sensors]) - 10.0 * np.log10(pred_mw)

    def bias_at(loc: Location) -> float:
        d = np.hypot(sx - loc.x_m, sy - loc.y_m)
        near = np.where(d <= 1.0)[0]
        if near.size:
            return float(residual[near[np.argmin(d[near])]])
        order = np.argsort(d, kind="stable")[: ipb.idw_neighbors]
        w = 1.0 / np.log10(d[order])
        return float(np.dot(w, residual[order]) / np.sum(w))

    return bias_at


def ipb_allocate(
    scenario: Scenario,
    su: SecondaryUser,
    cfg: OracleConfig,
    ipb: IpbConfig,
) -> AllocationDecision:
    """Link-budget allocation on estimated losses.

    With the correction enabled, the estimated loss into each PUR is
    reduced by the interpolated sensor residual at that PUR, so places
    where the world is hotter than the fitted model predicts get their
    budgets tightened accordingly.
    """
    pairs = scenario.all_purs()
    if not pairs:
        return AllocationDecision.granted(cfg.max_su_power_dbm)
    pur_x = np.array([pur.loc.x_m for _, pur in pairs])
    pur_y = np.array([pur.loc.y_m for _, pur in pairs])
    pur_ids = np.array([pur.id for _, pur in pairs], dtype=np.int64)
    owner_ids = np.array([pu.id for pu, _ in pairs], dtype=np.int64)
    pu_x = np.array([pu.loc.x_m for pu in scenario.pus])
    pu_y = np.array([pu.loc.y_m for pu in scenario.pus])
    pu_p = np.array([pu.tx_power_dbm for pu in scenario.pus])
    pu_ids = np.array([pu.id for pu in scenario.pus], dtype=np.int64)

    # The bias corrects the model's received-power estimates at protected
    # locations (the PU-side links observable through sensors). The SU link
    # stays purely model-based: applying one common bias to every link into
    # a receiver cancels algebraically in the Eq.-budget ratio.
    bias = np.zeros(len(pairs))
    if ipb.use_idw_correction:
        bias_at = _bias_field(scenario, cfg, ipb)
        bias = np.array([bias_at(pur.loc) for _, pur in pairs])

    loss = _est_loss(ipb, pu_x[:, None], pu_y[:, None], pur_x[None, :], pur_y[None, :]) - bias[None, :]
    rcvd_mw = np.power(10.0, (pu_p[:, None] - loss) / 10.0)
    own = pu_ids[:, None] == owner_ids[None, :]
    s_mw = np.sum(rcvd_mw * own, axis=0)
    i_mw = np.sum(rcvd_mw, axis=0) - s_mw + cfg.noise_mw
    for asu, q_dbm in scenario.active_sus:
        lo = _est_loss(ipb, asu.loc.x_m, asu.loc.y_m, pur_x, pur_y)
        i_mw = i_mw + np.power(10.0, (q_dbm - lo) / 10.0)

    su_loss = _est_loss(ipb, su.loc.x_m, su.loc.y_m, pur_x, pur_y)
    rho = np.power(10.0, -su_loss / 10.0)
    pi_mw = (s_mw / cfg.beta_linear - i_mw) / rho
    return _decide_from_bounds(pi_mw, pur_ids, owner_ids, cfg)
