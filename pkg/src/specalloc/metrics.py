"""Scoring of prediction files against ground truth.

Error metrics follow the allocation-error conventions: a_err is the mean
absolute dB difference between predicted and true grants; a sample is a
false positive when the prediction exceeds the truth, and a_fp is the
aggregate false-positive excess divided by the *total* sample count.
Denial on either side is mapped to the denial floor so the metrics stay
total; a granted prediction against a denied label therefore counts as a
false positive with error (prediction - floor).
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from .entities import Location, Scenario, SecondaryUser
from .oracle import OracleConfig
from .propagation import LogDistanceParams, path_loss_db_many
from .units import dbm_to_mw

__all__ = ["EvalReport", "score", "fairness", "data_rate", "total_power_w", "report"]

REPORT_COLUMNS = ["algo", "dataset", "n", "a_err_db", "a_fp_db", "fp_rate", "fairness", "total_rate_bps", "total_power_w"]


@dataclass(frozen=True)
class EvalReport:
    algo: str
    dataset: str
    n_samples: int
    a_err_db: float
    a_fp_db: float
    fp_rate: float
    fairness_ratio: float | None = None
    total_rate_bps: float | None = None
    total_power_w: float | None = None

    def __post_init__(self) -> None:
        if self.a_err_db < 0 or self.a_fp_db < 0:
            raise ValueError("error metrics cannot be negative")
        if not (0.0 <= self.fp_rate <= 1.0):
            raise ValueError("fp_rate must be in [0, 1]")


def score(
    predictions: list[tuple[int, float | None]],
    labels: list[tuple[int, float | None]],
    cfg: OracleConfig,
    algo: str = "",
    dataset: str = "",
) -> EvalReport:
    """Score (sample_id, dBm-or-None) predictions against same-keyed labels."""
    label_map: dict[int, float | None] = {}
    for sid, y in labels:
        if sid in label_map:
            raise ValueError(f"duplicate label for sample {sid}")
        label_map[sid] = y
    seen: set[int] = set()
    floor = cfg.denial_floor_dbm
    abs_err = 0.0
    fp_excess = 0.0
    n_fp = 0
    for sid, y_hat in predictions:
        if sid in seen:
            raise ValueError(f"duplicate prediction for sample {sid}")
        seen.add(sid)
        if sid not in label_map:
            raise ValueError(f"prediction for unknown sample {sid}")
        y = label_map[sid]
        y_eff = floor if y is None else y
        y_hat_eff = floor if y_hat is None else y_hat
        abs_err += abs(y_hat_eff - y_eff)
        if y_hat_eff > y_eff:
            n_fp += 1
            fp_excess += y_hat_eff - y_eff
    missing = set(label_map) - seen
    if missing:
        raise ValueError(f"missing predictions for samples {sorted(missing)[:5]}")
    n = len(predictions)
    if n == 0:
        return EvalReport(algo=algo, dataset=dataset, n_samples=0, a_err_db=0.0, a_fp_db=0.0, fp_rate=0.0)
    return EvalReport(
        algo=algo,
        dataset=dataset,
        n_samples=n,
        a_err_db=abs_err / n,
        a_fp_db=fp_excess / n,
        fp_rate=n_fp / n,
    )


def fairness(grants: list[float | None]) -> float:
    """Max/min ratio of granted powers in the linear domain; denials excluded."""
    mw = [dbm_to_mw(q) for q in grants if q is not None]
    if not mw:
        raise ValueError("fairness undefined when every SU is denied")
    return max(mw) / min(mw)


def total_power_w(grants: list[float | None]) -> float:
    return sum(dbm_to_mw(q) for q in grants if q is not None) / 1000.0


def data_rate(
    scenario: Scenario,
    grants: list[tuple[SecondaryUser, float | None]],
    model: LogDistanceParams,
    cfg: OracleConfig,
    bandwidth_hz: float = 1e6,
    rx_radius_m: float = 100.0,
    seed: int = 0,
) -> float:
    """Total Shannon rate over granted SUs, each paired with a receiver
    placed uniformly (seeded) within rx_radius_m, interference from PUs
    and the other granted SUs plus noise."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0xDA7A,)))
    granted = [(su, q) for su, q in grants if q is not None]
    total = 0.0
    for su, q in granted:
        while True:
            r = rx_radius_m * math.sqrt(float(rng.uniform()))
            theta = float(rng.uniform(0.0, 2.0 * math.pi))
            rx = Location(su.loc.x_m + r * math.cos(theta), su.loc.y_m + r * math.sin(theta))
            if scenario.region.contains(rx):
                break
        own = q - float(path_loss_db_many(model, su.loc.x_m, su.loc.y_m, rx.x_m, rx.y_m))
        interference = cfg.noise_mw
        for pu in scenario.pus:
            loss = float(path_loss_db_many(model, pu.loc.x_m, pu.loc.y_m, rx.x_m, rx.y_m))
            interference += dbm_to_mw(pu.tx_power_dbm - loss)
        for other, oq in granted:
            if other.id == su.id:
                continue
            loss = float(path_loss_db_many(model, other.loc.x_m, other.loc.y_m, rx.x_m, rx.y_m))
            interference += dbm_to_mw(oq - loss)
        sinr = dbm_to_mw(own) / interference
        total += bandwidth_hz * math.log2(1.0 + sinr)
    return total


def _cell(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def report(reports: list[EvalReport], path: str, fmt: str = "csv") -> None:
    """Write reports in a stable column order as CSV or a markdown table."""
    rows = [
        [
            r.algo,
            r.dataset,
            str(r.n_samples),
            _cell(r.a_err_db),
            _cell(r.a_fp_db),
            _cell(r.fp_rate),
            _cell(r.fairness_ratio),
            _cell(r.total_rate_bps),
            _cell(r.total_power_w),
        ]
        for r in reports
    ]
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as f:
            w = csv.writer(f)
            w.writerow(REPORT_COLUMNS)
            w.writerows(rows)
    elif fmt == "md":
        with open(path, "w", encoding="utf-8") as f:
            f.write("| " + " | ".join(REPORT_COLUMNS) + " |\n")
            f.write("|" + "|".join(["---"] * len(REPORT_COLUMNS)) + "|\n")
            for row in rows:
                f.write("| " + " | ".join(row) + " |\n")
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    os.stat(path)
