"""Scenario-to-image encoding.

A sample becomes an (n_pu_sheets + 1) x H x W float32 tensor. PUs land on
the sheet matching their transmit-power band and are drawn as disks whose
center brightness and radius scale with power, falling off logarithmically
to zero at the rim; overlapping disks on one sheet sum. Sensors are drawn
the same way but their sheet is chosen from their subarea (location), not
their reading. The last sheet is reserved for SUs: the requesting SU at
full brightness and minimum radius, active SUs power-scaled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entities import Scenario

__all__ = ["SheetConfig", "SampleImage", "encode_image"]

_MIN_CENTER_BRIGHTNESS = 0.05


@dataclass(frozen=True)
class SheetConfig:
    n_pu_sheets: int = 6
    sheet_width_db: float = 5.0
    image_px: int = 100
    r_min_px: int = 2
    r_max_px: int = 8
    pu_p_min_dbm: float = -30.0
    ss_p_min_dbm: float = -100.0
    ss_p_max_dbm: float = -50.0

    def __post_init__(self) -> None:
        if self.n_pu_sheets < 1:
            raise ValueError("n_pu_sheets must be >= 1")
        if not (5.0 <= self.sheet_width_db <= 10.0):
            raise ValueError("sheet_width_db must be in [5, 10]")
        if not (1 <= self.r_min_px <= self.r_max_px):
            raise ValueError("need r_max_px >= r_min_px >= 1")
        if self.image_px < 2 * self.r_max_px:
            raise ValueError("image_px too small for the configured disk radii")

    @property
    def n_sheets(self) -> int:
        return self.n_pu_sheets + 1

    @property
    def pu_p_max_dbm(self) -> float:
        return self.pu_p_min_dbm + self.n_pu_sheets * self.sheet_width_db

    def pu_sheet(self, power_dbm: float) -> int:
        k = math.floor((power_dbm - self.pu_p_min_dbm) / self.sheet_width_db)
        return min(max(k, 0), self.n_pu_sheets - 1)


@dataclass(frozen=True)
class SampleImage:
    sample_id: int
    sheets: np.ndarray  # float32 (S, H, W)


def _frac(p: float, p_min: float, p_max: float) -> float:
    return min(max((p - p_min) / (p_max - p_min), 0.0), 1.0)


def _draw_disk(sheet: np.ndarray, row: int, col: int, radius: int, center_brightness: float) -> None:
    """Additively stamp one disk; intensity c*(1 - ln(1+d)/ln(1+r))."""
    h, w = sheet.shape
    r0, r1 = max(0, row - radius), min(h - 1, row + radius)
    c0, c1 = max(0, col - radius), min(w - 1, col + radius)
    rows = np.arange(r0, r1 + 1)
    cols = np.arange(c0, c1 + 1)
    d = np.hypot(rows[:, None] - row, cols[None, :] - col)
    patch = center_brightness * (1.0 - np.log1p(d) / math.log1p(radius))
    np.maximum(patch, 0.0, out=patch)
    patch[d > radius] = 0.0
    sheet[r0 : r1 + 1, c0 : c1 + 1] += patch.astype(np.float32)


def encode_image(scenario: Scenario, scfg: SheetConfig) -> np.ndarray:
    """Render one scenario to its (S, H, W) float32 tensor."""
    n = scfg.image_px
    img = np.zeros((scfg.n_sheets, n, n), dtype=np.float32)
    region = scenario.region

    def pixel(x: float, y: float) -> tuple[int, int]:
        col = min(n - 1, int(x / region.width_m * n))
        row = min(n - 1, int(y / region.height_m * n))
        return row, col

    def radius(frac: float) -> int:
        return int(round(scfg.r_min_px + frac * (scfg.r_max_px - scfg.r_min_px)))

    p_min, p_max = scfg.pu_p_min_dbm, scfg.pu_p_max_dbm
    for pu in scenario.pus:
        f = _frac(pu.tx_power_dbm, p_min, p_max)
        row, col = pixel(pu.loc.x_m, pu.loc.y_m)
        _draw_disk(img[scfg.pu_sheet(pu.tx_power_dbm)], row, col, radius(f), max(f, _MIN_CENTER_BRIGHTNESS))

    for ss in scenario.sensors:
        if ss.reading_dbm is None:
            continue
        r_idx, c_idx = region.subarea(ss.loc)
        sheet = (r_idx + c_idx) % scfg.n_pu_sheets
        f = _frac(ss.reading_dbm, scfg.ss_p_min_dbm, scfg.ss_p_max_dbm)
        row, col = pixel(ss.loc.x_m, ss.loc.y_m)
        _draw_disk(img[sheet], row, col, radius(f), max(f, _MIN_CENTER_BRIGHTNESS))

    su_sheet = img[scfg.n_pu_sheets]
    for su in scenario.sus:
        row, col = pixel(su.loc.x_m, su.loc.y_m)
        _draw_disk(su_sheet, row, col, scfg.r_min_px, 1.0)
    for su, q_dbm in scenario.active_sus:
        f = _frac(q_dbm, p_min, p_max)
        row, col = pixel(su.loc.x_m, su.loc.y_m)
        _draw_disk(su_sheet, row, col, radius(f), max(f, _MIN_CENTER_BRIGHTNESS))

    return img
