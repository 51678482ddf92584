"""Estimator-style facade over the allocators and the image encoder.

Thin wrappers exposing the package's allocation functions through the
fit/predict/transform idiom (with get_params/set_params from
scikit-learn's BaseEstimator) so they drop into pipelines, grid
searches, and cross-validation harnesses. Predictions are float arrays
in dBm with NaN marking a denial; use allocate() for the explicit
decision objects.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .baselines import IpbConfig, LbtConfig, ipb_allocate, lbt_allocate
from .entities import Scenario
from .imaging import SheetConfig, encode_image
from .oracle import AllocationDecision, OracleConfig, optimal_power
from .propagation import LogDistanceParams, fit_alpha
from .validation import require_single_su, validate_scenario

__all__ = ["OracleAllocator", "ListenBeforeTalkAllocator", "InterpolationAllocator", "ScenarioImageEncoder"]


def _as_array(decisions: list[AllocationDecision]) -> np.ndarray:
    return np.array([d.power_dbm if d.is_granted else np.nan for d in decisions], dtype=np.float64)


def _check_scenarios(X) -> list[Scenario]:
    scenarios = list(X)
    for s in scenarios:
        if not isinstance(s, Scenario):
            raise TypeError(f"expected Scenario inputs, got {type(s).__name__}")
        validate_scenario(s)
        require_single_su(s)
    return scenarios


class OracleAllocator(BaseEstimator):
    """Ground-truth allocator; predict() maps scenarios to grants in dBm."""

    def __init__(self, propagation: LogDistanceParams | None = None, oracle: OracleConfig | None = None):
        self.propagation = propagation
        self.oracle = oracle

    def fit(self, X=None, y=None):
        return self

    def allocate(self, X) -> list[AllocationDecision]:
        model = self.propagation or LogDistanceParams()
        cfg = self.oracle or OracleConfig()
        return [optimal_power(s, s.sus[0], model, cfg) for s in _check_scenarios(X)]

    def predict(self, X) -> np.ndarray:
        return _as_array(self.allocate(X))


class ListenBeforeTalkAllocator(BaseEstimator):
    def __init__(self, threshold_dbm: float = -90.0, grant_power_dbm: float = 0.0,
                 propagation: LogDistanceParams | None = None, oracle: OracleConfig | None = None):
        self.threshold_dbm = threshold_dbm
        self.grant_power_dbm = grant_power_dbm
        self.propagation = propagation
        self.oracle = oracle

    def fit(self, X=None, y=None):
        return self

    def allocate(self, X) -> list[AllocationDecision]:
        model = self.propagation or LogDistanceParams()
        cfg = self.oracle or OracleConfig()
        lbt = LbtConfig(threshold_dbm=self.threshold_dbm, grant_power_dbm=self.grant_power_dbm)
        return [lbt_allocate(s, s.sus[0], model, cfg, lbt) for s in _check_scenarios(X)]

    def predict(self, X) -> np.ndarray:
        return _as_array(self.allocate(X))


class InterpolationAllocator(BaseEstimator):
    """Link-budget allocator on a fitted exponent.

    fit() takes (distance_m, loss_db) rows and recovers the exponent by
    least squares; predict() then applies the estimated model, optionally
    with the sensor-residual correction.
    """

    def __init__(self, alpha: float = 3.3, pl0_db: float = 56.0, d0_m: float = 25.0,
                 use_idw_correction: bool = False, idw_neighbors: int = 4,
                 oracle: OracleConfig | None = None):
        self.alpha = alpha
        self.pl0_db = pl0_db
        self.d0_m = d0_m
        self.use_idw_correction = use_idw_correction
        self.idw_neighbors = idw_neighbors
        self.oracle = oracle

    def fit(self, X, y=None):
        """X: array-like of (distance_m, loss_db) path-loss samples."""
        samples = [(float(d), float(l)) for d, l in np.asarray(X, dtype=np.float64)]
        self.alpha_fitted_ = fit_alpha(samples, pl0_db=self.pl0_db, d0_m=self.d0_m)
        return self

    def _config(self) -> IpbConfig:
        return IpbConfig(
            alpha_fitted=getattr(self, "alpha_fitted_", self.alpha),
            pl0_db=self.pl0_db,
            d0_m=self.d0_m,
            use_idw_correction=self.use_idw_correction,
            idw_neighbors=self.idw_neighbors,
        )

    def allocate(self, X) -> list[AllocationDecision]:
        cfg = self.oracle or OracleConfig()
        ipb = self._config()
        return [ipb_allocate(s, s.sus[0], cfg, ipb) for s in _check_scenarios(X)]

    def predict(self, X) -> np.ndarray:
        return _as_array(self.allocate(X))


class ScenarioImageEncoder(BaseEstimator, TransformerMixin):
    """Stateless transformer from scenarios to (n, S, H, W) float32 tensors."""

    def __init__(self, n_pu_sheets: int = 6, sheet_width_db: float = 5.0, image_px: int = 100,
                 r_min_px: int = 2, r_max_px: int = 8, pu_p_min_dbm: float = -30.0,
                 ss_p_min_dbm: float = -100.0, ss_p_max_dbm: float = -50.0):
        self.n_pu_sheets = n_pu_sheets
        self.sheet_width_db = sheet_width_db
        self.image_px = image_px
        self.r_min_px = r_min_px
        self.r_max_px = r_max_px
        self.pu_p_min_dbm = pu_p_min_dbm
        self.ss_p_min_dbm = ss_p_min_dbm
        self.ss_p_max_dbm = ss_p_max_dbm

    def _config(self) -> SheetConfig:
        return SheetConfig(
            n_pu_sheets=self.n_pu_sheets,
            sheet_width_db=self.sheet_width_db,
            image_px=self.image_px,
            r_min_px=self.r_min_px,
            r_max_px=self.r_max_px,
            pu_p_min_dbm=self.pu_p_min_dbm,
            ss_p_min_dbm=self.ss_p_min_dbm,
            ss_p_max_dbm=self.ss_p_max_dbm,
        )

    def fit(self, X=None, y=None):
        self._config()  # validates parameters
        return self

    def transform(self, X) -> np.ndarray:
        scfg = self._config()
        scenarios = list(X)
        for s in scenarios:
            if not isinstance(s, Scenario):
                raise TypeError(f"expected Scenario inputs, got {type(s).__name__}")
        return np.stack([encode_image(s, scfg) for s in scenarios])
