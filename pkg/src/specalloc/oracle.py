"""Ground-truth spectrum allocation.

Everything here works in the linear (mW) domain: for every protected
receiver j with own-signal s_j and interference-plus-noise I_j, a
secondary transmitter at linear gain rho_j may add at most
(s_j / beta - I_j) / rho_j before the receiver's SNR drops below beta.
The grant is the minimum of that bound over all receivers, clamped to
the configured ceiling, or an explicit denial.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entities import Location, Scenario, SecondaryUser, SpectrumSensor
from .propagation import LogDistanceParams, path_loss_db_many
from .units import dbm_to_mw, mw_to_dbm

__all__ = [
    "OracleConfig",
    "AllocationDecision",
    "PurLinkState",
    "pur_link_states",
    "optimal_power",
    "sensor_readings",
    "check_feasible",
    "FeasibilityCache",
]

# Relative SNR slack guarding dBm<->mW round-trip noise when a grant sits
# exactly on the constraint boundary; ~8 orders below any tested tolerance.
_SNR_RTOL = 1e-9


@dataclass(frozen=True)
class OracleConfig:
    beta_db: float = 10.0
    noise_dbm: float = -115.0
    max_su_power_dbm: float = 30.0
    denial_floor_dbm: float = -100.0

    def __post_init__(self) -> None:
        if self.beta_db <= 0:
            raise ValueError("beta_db must be > 0")
        if self.max_su_power_dbm <= self.denial_floor_dbm:
            raise ValueError("max_su_power_dbm must exceed denial_floor_dbm")

    @property
    def beta_linear(self) -> float:
        return 10.0 ** (self.beta_db / 10.0)

    @property
    def noise_mw(self) -> float:
        return dbm_to_mw(self.noise_dbm)


@dataclass(frozen=True)
class AllocationDecision:
    """A power grant in dBm or an explicit denial (never a sentinel value)."""

    power_dbm: float | None
    binding_pu_id: int | None = None
    binding_pur_id: int | None = None

    @classmethod
    def granted(cls, power_dbm: float, pu_id: int | None = None, pur_id: int | None = None) -> "AllocationDecision":
        return cls(power_dbm=power_dbm, binding_pu_id=pu_id, binding_pur_id=pur_id)

    @classmethod
    def denied(cls, pu_id: int | None = None, pur_id: int | None = None) -> "AllocationDecision":
        return cls(power_dbm=None, binding_pu_id=pu_id, binding_pur_id=pur_id)

    @property
    def is_granted(self) -> bool:
        return self.power_dbm is not None


@dataclass(frozen=True)
class PurLinkState:
    pur_id: int
    pu_id: int
    s_dbm: float
    i_mw: float


def _pur_arrays(scenario: Scenario, model: LogDistanceParams, cfg: OracleConfig):
    """Flattened per-PUR link budget: own signal (mW) and interference (mW).

    Interference aggregates the other PUs, the already-active SUs, and the
    noise floor, all in the linear domain.
    """
    pus = scenario.pus
    pairs = scenario.all_purs()
    n_pur = len(pairs)
    pur_x = np.array([pur.loc.x_m for _, pur in pairs])
    pur_y = np.array([pur.loc.y_m for _, pur in pairs])
    pur_ids = np.array([pur.id for _, pur in pairs], dtype=np.int64)
    owner_ids = np.array([pu.id for pu, _ in pairs], dtype=np.int64)

    if n_pur == 0:
        return pur_ids, owner_ids, np.empty(0), np.empty(0), pur_x, pur_y

    pu_x = np.array([pu.loc.x_m for pu in pus])
    pu_y = np.array([pu.loc.y_m for pu in pus])
    pu_p = np.array([pu.tx_power_dbm for pu in pus])
    pu_ids = np.array([pu.id for pu in pus], dtype=np.int64)

    loss = path_loss_db_many(model, pu_x[:, None], pu_y[:, None], pur_x[None, :], pur_y[None, :])
    rcvd_mw = np.power(10.0, (pu_p[:, None] - loss) / 10.0)  # (n_pu, n_pur)

    own = pu_ids[:, None] == owner_ids[None, :]
    s_mw = np.sum(rcvd_mw * own, axis=0)
    i_mw = np.sum(rcvd_mw, axis=0) - s_mw + cfg.noise_mw

    for su, q_dbm in scenario.active_sus:
        lo = path_loss_db_many(model, su.loc.x_m, su.loc.y_m, pur_x, pur_y)
        i_mw = i_mw + np.power(10.0, (q_dbm - lo) / 10.0)

    return pur_ids, owner_ids, s_mw, i_mw, pur_x, pur_y


def pur_link_states(scenario: Scenario, model: LogDistanceParams, cfg: OracleConfig) -> list[PurLinkState]:
    pur_ids, owner_ids, s_mw, i_mw, _, _ = _pur_arrays(scenario, model, cfg)
    return [
        PurLinkState(pur_id=int(pur_ids[j]), pu_id=int(owner_ids[j]), s_dbm=mw_to_dbm(float(s_mw[j])), i_mw=float(i_mw[j]))
        for j in range(len(pur_ids))
    ]


def _decide_from_bounds(pi_mw: np.ndarray, pur_ids: np.ndarray, owner_ids: np.ndarray, cfg: OracleConfig) -> AllocationDecision:
    """Turn per-PUR power bounds (mW, may be <= 0) into one decision."""
    j = int(np.argmin(pi_mw))
    pu_id, pur_id = int(owner_ids[j]), int(pur_ids[j])
    bound = float(pi_mw[j])
    if bound <= dbm_to_mw(cfg.denial_floor_dbm):
        return AllocationDecision.denied(pu_id, pur_id)
    return AllocationDecision.granted(min(mw_to_dbm(bound), cfg.max_su_power_dbm), pu_id, pur_id)


def optimal_power(scenario: Scenario, su: SecondaryUser, model: LogDistanceParams, cfg: OracleConfig) -> AllocationDecision:
    """Largest safe SU power: min over PURs of (s_j/beta - I_j)/rho_j.

    Exposes the binding PU/PUR (the argmin) because conservative labeling
    and far-transmitter augmentation both key off it.
    """
    pur_ids, owner_ids, s_mw, i_mw, pur_x, pur_y = _pur_arrays(scenario, model, cfg)
    if len(pur_ids) == 0:
        return AllocationDecision.granted(cfg.max_su_power_dbm)
    loss = path_loss_db_many(model, su.loc.x_m, su.loc.y_m, pur_x, pur_y)
    rho = np.power(10.0, -loss / 10.0)
    numerator = s_mw / cfg.beta_linear - i_mw
    pi_mw = numerator / rho
    return _decide_from_bounds(pi_mw, pur_ids, owner_ids, cfg)


def sensor_readings(scenario: Scenario, model: LogDistanceParams, cfg: OracleConfig) -> tuple[SpectrumSensor, ...]:
    """Aggregate received power from all PUs plus noise, per sensor."""
    if not scenario.sensors:
        return ()
    sx = np.array([s.loc.x_m for s in scenario.sensors])
    sy = np.array([s.loc.y_m for s in scenario.sensors])
    total_mw = np.full(len(sx), cfg.noise_mw)
    if scenario.pus:
        pu_x = np.array([pu.loc.x_m for pu in scenario.pus])
        pu_y = np.array([pu.loc.y_m for pu in scenario.pus])
        pu_p = np.array([pu.tx_power_dbm for pu in scenario.pus])
        loss = path_loss_db_many(model, pu_x[:, None], pu_y[:, None], sx[None, :], sy[None, :])
        total_mw = total_mw + np.sum(np.power(10.0, (pu_p[:, None] - loss) / 10.0), axis=0)
    readings = 10.0 * np.log10(total_mw)
    return tuple(
        SpectrumSensor(s.id, s.loc, float(readings[k])) for k, s in enumerate(scenario.sensors)
    )


def received_power_dbm(scenario: Scenario, loc: Location, model: LogDistanceParams, cfg: OracleConfig) -> float:
    """Aggregate PU power plus noise at an arbitrary location (sensor view)."""
    probe = Scenario(region=scenario.region, pus=scenario.pus, sensors=(SpectrumSensor(0, loc),), seed=scenario.seed)
    return sensor_readings(probe, model, cfg)[0].reading_dbm  # type: ignore[return-value]


class FeasibilityCache:
    """Precomputed link budgets for repeated feasibility tests over a fixed
    scenario and SU list (the inner loop of the multi-SU search)."""

    def __init__(self, scenario: Scenario, sus: list[SecondaryUser], model: LogDistanceParams, cfg: OracleConfig):
        self.cfg = cfg
        pur_ids, owner_ids, s_mw, i_mw, pur_x, pur_y = _pur_arrays(scenario, model, cfg)
        self.pur_ids = pur_ids
        self.owner_ids = owner_ids
        self.s_mw = s_mw
        self.i_mw = i_mw
        self.n_pur = len(pur_ids)
        if self.n_pur and sus:
            su_x = np.array([su.loc.x_m for su in sus])
            su_y = np.array([su.loc.y_m for su in sus])
            loss = path_loss_db_many(model, su_x[:, None], su_y[:, None], pur_x[None, :], pur_y[None, :])
            self.gain = np.power(10.0, -loss / 10.0)  # (n_su, n_pur)
        else:
            self.gain = np.zeros((len(sus), self.n_pur))

    def feasible(self, powers_mw: np.ndarray) -> bool:
        """True iff every PUR keeps SNR >= beta with SUs at powers_mw (0 = silent)."""
        if self.n_pur == 0:
            return True
        su_mw = powers_mw @ self.gain
        return bool(np.all(self.s_mw >= self.cfg.beta_linear * (1.0 - _SNR_RTOL) * (self.i_mw + su_mw)))

    def su_bounds_mw(self, su_index: int) -> np.ndarray:
        """Per-PUR stand-alone power bound for one SU (numerator / gain)."""
        numerator = self.s_mw / self.cfg.beta_linear - self.i_mw
        return numerator / self.gain[su_index]


def check_feasible(
    scenario: Scenario,
    grants: list[tuple[SecondaryUser, float | None]],
    model: LogDistanceParams,
    cfg: OracleConfig,
) -> bool:
    """True iff no PUR's SNR falls below beta with the granted SUs
    transmitting; denied grants contribute 0 mW."""
    sus = [su for su, _ in grants]
    cache = FeasibilityCache(scenario, sus, model, cfg)
    powers = np.array([0.0 if q is None else dbm_to_mw(q) for _, q in grants])
    return cache.feasible(powers)
