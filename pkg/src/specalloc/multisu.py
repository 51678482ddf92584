"""Concurrent-SU power assignment.

Two labelers: a binary-search heuristic that keeps a per-SU power range
whose lower ends are always jointly feasible, and a sequential greedy
pass that allocates one SU at a time in a low-congestion-first order.
Multi-channel requests are handled by seeded uniform partitioning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entities import Scenario, SecondaryUser
from .oracle import AllocationDecision, FeasibilityCache, LogDistanceParams, OracleConfig, optimal_power
from .units import dbm_to_mw

__all__ = [
    "PowerRange",
    "MultiAllocation",
    "binary_alloc",
    "greedy_order",
    "sequential_alloc",
    "partition_channels",
]


@dataclass(frozen=True)
class PowerRange:
    su_id: int
    lo_dbm: float
    hi_dbm: float

    def __post_init__(self) -> None:
        if self.lo_dbm > self.hi_dbm:
            raise ValueError("lo_dbm must not exceed hi_dbm")


@dataclass(frozen=True)
class MultiAllocation:
    """Simultaneous grants, one per requesting SU, plus the channel index
    when channelized. ``infeasible_scenario`` flags worlds whose PURs
    violate SNR before any SU transmits (every SU is then denied)."""

    grants: tuple[tuple[int, AllocationDecision], ...]
    channel: int | None = None
    infeasible_scenario: bool = False

    def granted_powers(self) -> dict[int, float | None]:
        return {su_id: d.power_dbm for su_id, d in self.grants}


def binary_alloc(
    scenario: Scenario,
    sus: list[SecondaryUser],
    model: LogDistanceParams,
    cfg: OracleConfig,
    threshold_db: float = 0.1,
) -> MultiAllocation:
    """Binary-search labeling of simultaneous SU powers.

    Every SU holds a range [lo, hi] in dB such that all SUs transmitting
    at their lo (denial when lo is still the floor) cause no PUR
    violation. Each iteration picks the SU with the widest range (ties by
    lowest su_id), tests its midpoint with all the others held at their
    lower bounds, and halves the range on that side, until every range is
    narrower than threshold_db. Final grant = lo.
    """
    if not sus:
        raise ValueError("binary_alloc needs at least one SU")
    if threshold_db <= 0:
        raise ValueError("threshold_db must be > 0")
    order = sorted(range(len(sus)), key=lambda k: sus[k].id)
    sus = [sus[k] for k in order]
    cache = FeasibilityCache(scenario, sus, model, cfg)
    n = len(sus)
    floor, ceil = cfg.denial_floor_dbm, cfg.max_su_power_dbm

    def powers_mw(lo: np.ndarray, override: tuple[int, float] | None = None) -> np.ndarray:
        p = np.where(lo > floor, np.power(10.0, lo / 10.0), 0.0)
        if override is not None:
            i, v = override
            p[i] = dbm_to_mw(v)
        return p

    lo = np.full(n, floor)
    hi = np.full(n, ceil)
    if not cache.feasible(powers_mw(lo)):
        # the PU-only world already violates SNR; label everyone denied
        grants = tuple((su.id, AllocationDecision.denied()) for su in sus)
        return MultiAllocation(grants=grants, infeasible_scenario=True)

    while True:
        width = hi - lo
        i = int(np.argmax(width))  # ties resolve to lowest index = lowest su_id
        if width[i] < threshold_db:
            break
        mid = (lo[i] + hi[i]) / 2.0
        if cache.feasible(powers_mw(lo, override=(i, mid))):
            lo[i] = mid
        else:
            hi[i] = mid
        assert cache.feasible(powers_mw(lo)), "all-lower-bound feasibility invariant violated"

    grants = tuple(
        (su.id, AllocationDecision.granted(float(lo[k])) if lo[k] > floor else AllocationDecision.denied())
        for k, su in enumerate(sus)
    )
    assert cache.feasible(powers_mw(lo))
    return MultiAllocation(grants=grants)


def greedy_order(scenario: Scenario, sus: list[SecondaryUser]) -> list[SecondaryUser]:
    """Sort SUs by the aggregate transmit power (linear) of PUs and active
    SUs located in their subarea or its 8 adjoining cells, ascending;
    quiet-neighborhood SUs go first. Ties break by su_id."""
    region = scenario.region
    cell_mw: dict[tuple[int, int], float] = {}
    emitters: list[tuple[float, float]] = []
    for pu in scenario.pus:
        emitters.append((pu.loc.x_m, pu.loc.y_m))
    weights = [dbm_to_mw(pu.tx_power_dbm) for pu in scenario.pus]
    for su, q in scenario.active_sus:
        emitters.append((su.loc.x_m, su.loc.y_m))
        weights.append(dbm_to_mw(q))
    from .units import subarea_index

    for (x, y), w in zip(emitters, weights):
        cell = subarea_index(x, y, region.width_m, region.height_m, region.grid_cell_m)
        cell_mw[cell] = cell_mw.get(cell, 0.0) + w

    def su_weight(su: SecondaryUser) -> float:
        r, c = region.subarea(su.loc)
        total = 0.0
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                total += cell_mw.get((r + dr, c + dc), 0.0)
        return total

    return sorted(sus, key=lambda su: (su_weight(su), su.id))


def sequential_alloc(
    scenario: Scenario,
    ordered_sus: list[SecondaryUser],
    model: LogDistanceParams,
    cfg: OracleConfig,
) -> MultiAllocation:
    """Allocate SUs one at a time, each granted its single-SU optimum given
    everyone granted before it appended to the active set."""
    active = list(scenario.active_sus)
    grants: list[tuple[int, AllocationDecision]] = []
    for su in ordered_sus:
        decision = optimal_power(scenario.with_active(tuple(active)), su, model, cfg)
        grants.append((su.id, decision))
        if decision.is_granted:
            active.append((su, decision.power_dbm))
    return MultiAllocation(grants=tuple(grants))


def partition_channels(sus: list[SecondaryUser], n_channels: int, seed: int) -> list[list[SecondaryUser]]:
    """Seeded uniform partition: shuffle then deal round-robin, so set
    sizes differ by at most one."""
    if n_channels < 1:
        raise ValueError("n_channels must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0x0C4A,)))
    perm = rng.permutation(len(sus))
    shuffled = [sus[int(k)] for k in perm]
    return [shuffled[c::n_channels] for c in range(n_channels)]
