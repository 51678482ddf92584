"""Sample labeling: the oracle grant for the requesting SU, plus the
conservative variant that lowers labels by the local small-scale spread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .entities import Scenario
from .oracle import AllocationDecision, OracleConfig, _decide_from_bounds, _pur_arrays, optimal_power
from .propagation import LogDistanceParams, fade_db_many, path_loss_db_many
from .validation import require_single_su

__all__ = ["LabelRow", "ConservativeConfig", "label_sample", "label_samples", "conservative_labels"]


@dataclass(frozen=True)
class LabelRow:
    sample_id: int
    decision: AllocationDecision
    conservative_dbm: float | None = None
    conservative_denied: bool = False


@dataclass(frozen=True)
class ConservativeConfig:
    neighborhood_radius_m: float = 5.0
    n_probes: int = 16
    scale: float = 1.0  # fraction of the probe spread subtracted from the label

    def __post_init__(self) -> None:
        if self.neighborhood_radius_m <= 0:
            raise ValueError("neighborhood_radius_m must be > 0")
        if self.n_probes < 2:
            raise ValueError("n_probes must be >= 2")


def label_sample(scenario: Scenario, model: LogDistanceParams, cfg: OracleConfig) -> LabelRow:
    require_single_su(scenario)
    return LabelRow(sample_id=-1, decision=optimal_power(scenario, scenario.sus[0], model, cfg))


def label_samples(scenarios: list[Scenario], model: LogDistanceParams, cfg: OracleConfig) -> list[LabelRow]:
    return [replace(label_sample(s, model, cfg), sample_id=i) for i, s in enumerate(scenarios)]


def _probe_grants(scenario: Scenario, model: LogDistanceParams, cfg: OracleConfig, ccfg: ConservativeConfig) -> list[AllocationDecision]:
    """Grant at each probe with only the small-scale term varying.

    The large-scale and shadowing parts of the SU-to-PUR losses stay
    frozen at the SU's own location, so the probe spread isolates the
    bounded fading component rather than the distance trend across the
    neighborhood.
    """
    su = scenario.sus[0]
    region = scenario.region
    pur_ids, owner_ids, s_mw, i_mw, pur_x, pur_y = _pur_arrays(scenario, model, cfg)
    if len(pur_ids) == 0:
        return [AllocationDecision.granted(cfg.max_su_power_dbm)] * ccfg.n_probes
    base_loss = path_loss_db_many(model, su.loc.x_m, su.loc.y_m, pur_x, pur_y, include_fade=False)
    numerator = s_mw / cfg.beta_linear - i_mw

    rng = np.random.default_rng(np.random.SeedSequence(entropy=scenario.seed & ((1 << 64) - 1), spawn_key=(0xC095,)))
    decisions = []
    for _ in range(ccfg.n_probes):
        r = ccfg.neighborhood_radius_m * math.sqrt(float(rng.uniform()))
        theta = float(rng.uniform(0.0, 2.0 * math.pi))
        px = min(max(su.loc.x_m + r * math.cos(theta), 0.0), region.width_m)
        py = min(max(su.loc.y_m + r * math.sin(theta), 0.0), region.height_m)
        loss = base_loss + fade_db_many(model, px, py, pur_x, pur_y)
        rho = np.power(10.0, -loss / 10.0)
        decisions.append(_decide_from_bounds(numerator / rho, pur_ids, owner_ids, cfg))
    return decisions


def conservative_labels(
    scenarios: list[Scenario],
    labels: list[LabelRow],
    model: LogDistanceParams,
    cfg: OracleConfig,
    ccfg: ConservativeConfig,
) -> list[LabelRow]:
    """Lower each granted label by the amplitude of the small-scale effect.

    The amplitude y is the max-min spread of the grant over probe
    locations in a small neighborhood of the SU. Denied probes make the
    conservative label a denial outright; denied labels pass through.
    """
    out: list[LabelRow] = []
    for scenario, row in zip(scenarios, labels):
        if not row.decision.is_granted:
            out.append(replace(row, conservative_dbm=None, conservative_denied=True))
            continue
        probes = _probe_grants(scenario, model, cfg, ccfg)
        if any(not d.is_granted for d in probes):
            out.append(replace(row, conservative_dbm=None, conservative_denied=True))
            continue
        values = [d.power_dbm for d in probes]
        y = max(values) - min(values)
        out.append(replace(row, conservative_dbm=row.decision.power_dbm - ccfg.scale * y, conservative_denied=False))
    return out
