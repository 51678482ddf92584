"""Power-unit conversions and grid arithmetic shared by every module.

Powers are stored in dBm at rest; any summation of signals happens in
mW (linear domain), so these two conversions are the only unit code in
the package.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["dbm_to_mw", "mw_to_dbm", "dbm_to_mw_array", "mw_to_dbm_array", "subarea_index"]


def dbm_to_mw(power_dbm: float) -> float:
    """Convert a power in dBm to milliwatts: 10^(p/10)."""
    if not math.isfinite(power_dbm):
        raise ValueError(f"power must be finite, got {power_dbm}")
    return 10.0 ** (power_dbm / 10.0)


def mw_to_dbm(power_mw: float) -> float:
    """Convert a power in milliwatts to dBm: 10*log10(m).

    Raises ValueError for m <= 0 (not representable in dB).
    """
    if power_mw <= 0.0:
        raise ValueError(f"power must be > 0 mW to express in dBm, got {power_mw}")
    return 10.0 * math.log10(power_mw)


def dbm_to_mw_array(power_dbm: np.ndarray) -> np.ndarray:
    return np.power(10.0, np.asarray(power_dbm, dtype=np.float64) / 10.0)


def mw_to_dbm_array(power_mw: np.ndarray) -> np.ndarray:
    return 10.0 * np.log10(np.asarray(power_mw, dtype=np.float64))


def subarea_index(x_m: float, y_m: float, width_m: float, height_m: float, grid_cell_m: float) -> tuple[int, int]:
    """Return the (row, col) subarea containing a location.

    row = floor(y / cell), col = floor(x / cell); locations on the far
    boundary clamp to the last cell so the partition covers the closed
    region.
    """
    if not (0.0 <= x_m <= width_m and 0.0 <= y_m <= height_m):
        raise ValueError(f"location ({x_m}, {y_m}) outside region {width_m}x{height_m}")
    n_rows = max(1, int(math.ceil(height_m / grid_cell_m)))
    n_cols = max(1, int(math.ceil(width_m / grid_cell_m)))
    row = min(int(y_m // grid_cell_m), n_rows - 1)
    col = min(int(x_m // grid_cell_m), n_cols - 1)
    return row, col
