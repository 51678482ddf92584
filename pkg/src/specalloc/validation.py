"""Input validation helpers.

Raise ValueError with a dotted key path pointing at the offending
entity, so callers (CLI, estimators) surface actionable messages.
"""

from __future__ import annotations

from .entities import Scenario

__all__ = ["validate_scenario", "require_single_su"]


def _check_unique(ids: list[int], what: str) -> None:
    seen: set[int] = set()
    for i in ids:
        if i in seen:
            raise ValueError(f"{what}: duplicate id {i}")
        seen.add(i)


def validate_scenario(s: Scenario) -> Scenario:
    """Check in-region placement and id uniqueness per entity class."""
    for pu in s.pus:
        if not s.region.contains(pu.loc):
            raise ValueError(f"pus[{pu.id}]: location outside region")
        for pur in pu.receivers:
            if not s.region.contains(pur.loc):
                raise ValueError(f"pus[{pu.id}].purs[{pur.id}]: location outside region")
        _check_unique([r.id for r in pu.receivers], f"pus[{pu.id}].purs")
    for ss in s.sensors:
        if not s.region.contains(ss.loc):
            raise ValueError(f"sensors[{ss.id}]: location outside region")
    for su in s.sus:
        if not s.region.contains(su.loc):
            raise ValueError(f"sus[{su.id}]: location outside region")
    for su, _p in s.active_sus:
        if not s.region.contains(su.loc):
            raise ValueError(f"active_sus[{su.id}]: location outside region")
    _check_unique([p.id for p in s.pus], "pus")
    _check_unique([ss.id for ss in s.sensors], "sensors")
    _check_unique([u.id for u in s.sus], "sus")
    return s


def require_single_su(s: Scenario) -> None:
    if len(s.sus) != 1:
        raise ValueError(f"expected exactly one requesting SU, got {len(s.sus)}")
