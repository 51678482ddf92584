"""Deterministic path-loss models.

The log-distance model realizes medium-scale shadowing and small-scale
fading as stateless hashes of (seed, quantized unordered endpoint pair),
so a world is fully reproducible from its parameters alone: no stored
random fields, identical values across runs and thread schedules, and
reciprocity by construction. Shadowing quantizes endpoints at
``shadow_cell_m``; fading at ``shadow_cell_m / 16`` so it varies over a
few wavelengths. Gaussian shadow values come from the hash through the
inverse normal CDF on a 53-bit uniform, which is platform-independent.

An externally computed per-transmitter loss raster can be loaded instead
(``GridPathLoss``) and queried with bilinear interpolation.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .entities import Location

__all__ = [
    "LogDistanceParams",
    "path_loss_db",
    "path_loss_db_many",
    "fade_db_many",
    "fit_alpha",
    "GridPathLoss",
    "grid_loss",
    "save_grid",
    "load_grid",
]

_SHADOW_TAG = np.uint64(0x5AD05AD05AD05AD0)
_FADE_TAG = np.uint64(0xFADEFADEFADEFADE)
_MASK64 = (1 << 64) - 1
# cells are packed into one uint64 key; 2**24 cells per axis is far
# beyond any region this package targets
_CELL_STRIDE = np.uint64(1 << 24)


@dataclass(frozen=True)
class LogDistanceParams:
    """Log-distance propagation with seeded shadowing and fading.

    ``alpha`` is the path-loss exponent; ``pl0_db`` the reference loss at
    ``d0_m``. Distances below ``d0_m`` clamp to the reference loss.
    """

    alpha: float = 3.3
    pl0_db: float = 56.0
    d0_m: float = 25.0
    shadowing_sigma_db: float = 4.0
    fading_amplitude_db: float = 0.0
    seed: int = 0
    shadow_cell_m: float = 10.0

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.d0_m <= 0:
            raise ValueError("d0_m must be > 0")
        if self.shadowing_sigma_db < 0 or self.fading_amplitude_db < 0:
            raise ValueError("noise magnitudes must be >= 0")
        if self.shadow_cell_m <= 0:
            raise ValueError("shadow_cell_m must be > 0")


def _splitmix64(x: np.ndarray) -> np.ndarray:
    """One splitmix64 scramble round; wraps mod 2**64."""
    z = (x + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(_MASK64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _pair_uniform(seed: int, tag: np.uint64, ax, ay, bx, by, cell_m: float) -> np.ndarray:
    """Uniform in (0, 1) keyed by (seed, unordered quantized endpoint pair)."""
    ia = np.floor(np.asarray(ax, dtype=np.float64) / cell_m).astype(np.uint64)
    ja = np.floor(np.asarray(ay, dtype=np.float64) / cell_m).astype(np.uint64)
    ib = np.floor(np.asarray(bx, dtype=np.float64) / cell_m).astype(np.uint64)
    jb = np.floor(np.asarray(by, dtype=np.float64) / cell_m).astype(np.uint64)
    ka = ia * _CELL_STRIDE + ja
    kb = ib * _CELL_STRIDE + jb
    lo = np.minimum(ka, kb)
    hi = np.maximum(ka, kb)
    with np.errstate(over="ignore"):
        h = _splitmix64(np.uint64(seed & _MASK64) ^ tag)
        h = _splitmix64(h ^ lo)
        h = _splitmix64(h ^ hi)
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def _shadow_db_many(p: LogDistanceParams, ax, ay, bx, by) -> np.ndarray:
    if p.shadowing_sigma_db == 0.0:
        return np.zeros(np.broadcast(np.asarray(ax), np.asarray(bx)).shape)
    u = _pair_uniform(p.seed, _SHADOW_TAG, ax, ay, bx, by, p.shadow_cell_m)
    return p.shadowing_sigma_db * ndtri(u)


def fade_db_many(p: LogDistanceParams, ax, ay, bx, by) -> np.ndarray:
    """Bounded zero-mean small-scale term in [-A, A], A = fading_amplitude_db."""
    if p.fading_amplitude_db == 0.0:
        return np.zeros(np.broadcast(np.asarray(ax), np.asarray(bx)).shape)
    u = _pair_uniform(p.seed, _FADE_TAG, ax, ay, bx, by, p.shadow_cell_m / 16.0)
    return p.fading_amplitude_db * (2.0 * u - 1.0)


def path_loss_db_many(p: LogDistanceParams, ax, ay, bx, by, *, include_fade: bool = True) -> np.ndarray:
    """Vectorized loss in dB between endpoint arrays (broadcastable)."""
    ax = np.asarray(ax, dtype=np.float64)
    ay = np.asarray(ay, dtype=np.float64)
    bx = np.asarray(bx, dtype=np.float64)
    by = np.asarray(by, dtype=np.float64)
    d = np.hypot(ax - bx, ay - by)
    d = np.maximum(d, p.d0_m)
    loss = p.pl0_db + 10.0 * p.alpha * np.log10(d / p.d0_m)
    loss = loss + _shadow_db_many(p, ax, ay, bx, by)
    if include_fade:
        loss = loss + fade_db_many(p, ax, ay, bx, by)
    return loss


def path_loss_db(p: LogDistanceParams, a: Location, b: Location) -> float:
    """Loss in dB between two locations; reciprocal by construction."""
    return float(path_loss_db_many(p, a.x_m, a.y_m, b.x_m, b.y_m))


def fit_alpha(samples: list[tuple[float, float]], pl0_db: float, d0_m: float) -> float:
    """Least-squares path-loss exponent from (distance_m, loss_db) samples.

    Minimizes sum((loss_i - pl0 - 10*a*log10(d_i/d0))**2); with pl0 and d0
    fixed this is regression through the origin, so the slope is closed
    form: a = sum(x*y) / (10 * sum(x**2)), x = log10(d/d0), y = loss - pl0.
    """
    if len(samples) < 2:
        raise ValueError("need at least 2 samples to fit alpha")
    d = np.array([s[0] for s in samples], dtype=np.float64)
    loss = np.array([s[1] for s in samples], dtype=np.float64)
    if np.any(d <= d0_m):
        raise ValueError("all sample distances must exceed the reference distance")
    if np.all(d == d[0]):
        raise ValueError("sample distances are all equal; exponent not identifiable")
    x = np.log10(d / d0_m)
    y = loss - pl0_db
    return float(np.dot(x, y) / (10.0 * np.dot(x, x)))


@dataclass(frozen=True)
class GridPathLoss:
    """Per-transmitter loss raster over the region (row-major, ny x nx)."""

    width_m: float
    height_m: float
    tx_locations: tuple[Location, ...]
    rasters: np.ndarray  # float32, shape (n_tx, ny, nx), losses in dB

    def __post_init__(self) -> None:
        if self.rasters.ndim != 3 or self.rasters.shape[0] != len(self.tx_locations):
            raise ValueError("raster shape does not match transmitter list")
        if np.any(self.rasters < 0):
            raise ValueError("losses must be >= 0 dB")


def grid_loss(grid: GridPathLoss, tx_index: int, rx: Location) -> float:
    """Bilinear interpolation between raster cell centers; exact at centers."""
    if not (0 <= tx_index < len(grid.tx_locations)):
        raise ValueError(f"no transmitter with index {tx_index}")
    if not (0.0 <= rx.x_m <= grid.width_m and 0.0 <= rx.y_m <= grid.height_m):
        raise ValueError("receiver outside raster")
    raster = grid.rasters[tx_index]
    ny, nx = raster.shape
    dx = grid.width_m / nx
    dy = grid.height_m / ny

    def axis(coord: float, step: float, n: int) -> tuple[int, int, float]:
        t = coord / step - 0.5
        i0 = int(math.floor(t))
        frac = t - i0
        if i0 < 0:
            return 0, 0, 0.0
        if i0 >= n - 1:
            return n - 1, n - 1, 0.0
        return i0, i0 + 1, frac

    j0, j1, fx = axis(rx.x_m, dx, nx)
    i0, i1, fy = axis(rx.y_m, dy, ny)
    v00 = float(raster[i0, j0])
    v01 = float(raster[i0, j1])
    v10 = float(raster[i1, j0])
    v11 = float(raster[i1, j1])
    return (v00 * (1 - fx) + v01 * fx) * (1 - fy) + (v10 * (1 - fx) + v11 * fx) * fy


def save_grid(grid: GridPathLoss, sidecar_path: str) -> None:
    """Write the JSON sidecar plus a little-endian float32 raster file."""
    data_file = os.path.splitext(os.path.basename(sidecar_path))[0] + ".bin"
    meta = {
        "format_version": 1,
        "width_m": grid.width_m,
        "height_m": grid.height_m,
        "nx": int(grid.rasters.shape[2]),
        "ny": int(grid.rasters.shape[1]),
        "data_file": data_file,
        "tx": [{"x": t.x_m, "y": t.y_m} for t in grid.tx_locations],
    }
    with open(sidecar_path, "w", encoding="utf-8") as f:
        json.dump(meta, f, sort_keys=True, separators=(",", ":"))
    grid.rasters.astype("<f4").tofile(os.path.join(os.path.dirname(sidecar_path) or ".", data_file))


def load_grid(sidecar_path: str) -> GridPathLoss:
    try:
        with open(sidecar_path, encoding="utf-8") as f:
            meta = json.load(f)
        nx, ny = int(meta["nx"]), int(meta["ny"])
        tx = tuple(Location(t["x"], t["y"]) for t in meta["tx"])
        data_path = os.path.join(os.path.dirname(sidecar_path) or ".", meta["data_file"])
        raw = np.fromfile(data_path, dtype="<f4")
    except (KeyError, json.JSONDecodeError, OSError) as exc:
        raise ValueError(f"malformed grid raster: {exc}") from exc
    if raw.size != len(tx) * ny * nx:
        raise ValueError(
            f"malformed grid raster: expected {len(tx) * ny * nx} values, file holds {raw.size}"
        )
    return GridPathLoss(
        width_m=float(meta["width_m"]),
        height_m=float(meta["height_m"]),
        tx_locations=tx,
        rasters=raw.reshape(len(tx), ny, nx),
    )
