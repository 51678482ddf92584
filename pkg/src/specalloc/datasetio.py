"""Dataset directory layout and bit-exact serialization.

A dataset directory holds:

    manifest.json              format/version, seed, every config, counts,
                               tensor dims, augmentation provenance
    scenarios.jsonl            one scenario per line
    labels.csv                 sample_id, optimal_dbm (empty = denial),
                               binding_pu_id, binding_pur_id, conservative_dbm
    multisu_labels.csv         sample_id, su_id, granted_dbm, channel (optional)
    images/sample_%08d.bin     raw float32 little-endian, C order, S*H*W
    predictions.csv            sample_id, predicted_dbm, algo (written by
                               allocators/learners, consumed by metrics)

Floats are serialized with shortest round-trip repr, so read(write(x))
is bit-exact. Nothing here embeds wall-clock time or process ids.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass

import numpy as np

from .entities import Region, Scenario, scenario_from_json, scenario_to_json
from .imaging import SheetConfig
from .labeling import ConservativeConfig, LabelRow
from .oracle import AllocationDecision, OracleConfig
from .propagation import LogDistanceParams
from .sampling import SamplerConfig

__all__ = [
    "FORMAT_VERSION",
    "DatasetFormatError",
    "Dataset",
    "build_manifest",
    "write_manifest",
    "read_manifest",
    "write_scenarios",
    "read_scenarios",
    "write_labels",
    "read_labels",
    "write_multisu_labels",
    "read_multisu_labels",
    "write_predictions",
    "read_predictions",
    "image_path",
    "write_image",
    "read_image",
    "read_dataset",
]

FORMAT_VERSION = 1


class DatasetFormatError(ValueError):
    pass


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def _parse(s: str) -> float | None:
    return None if s == "" else float(s)


def build_manifest(
    *,
    seed: int,
    count: int,
    region: Region,
    propagation: LogDistanceParams,
    oracle: OracleConfig,
    sampler: SamplerConfig | None = None,
    sheets: SheetConfig | None = None,
    conservative: ConservativeConfig | None = None,
    augmentation: list[str] | None = None,
    extra: dict | None = None,
) -> dict:
    manifest = {
        "format_version": FORMAT_VERSION,
        "seed": seed,
        "count": count,
        "region": asdict(region),
        "propagation": asdict(propagation),
        "oracle": asdict(oracle),
        "sampler": asdict(sampler) if sampler is not None else None,
        "sheets": asdict(sheets) if sheets is not None else None,
        "conservative": asdict(conservative) if conservative is not None else None,
        "tensor": {"s": sheets.n_sheets, "h": sheets.image_px, "w": sheets.image_px} if sheets else None,
        "augmentation": list(augmentation or []),
        "denied_excluded_from_regression": True,
    }
    if extra:
        manifest.update(extra)
    return manifest


def write_manifest(dirpath: str, manifest: dict) -> None:
    with open(os.path.join(dirpath, "manifest.json"), "w", encoding="utf-8") as f:
        json.dump(manifest, f, sort_keys=True, indent=1)
        f.write("\n")


def read_manifest(dirpath: str) -> dict:
    path = os.path.join(dirpath, "manifest.json")
    try:
        with open(path, encoding="utf-8") as f:
            manifest = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise DatasetFormatError(f"cannot read manifest {path}: {exc}") from exc
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise DatasetFormatError(f"dataset format version {version} != supported {FORMAT_VERSION}")
    return manifest


def write_scenarios(dirpath: str, scenarios: list[Scenario]) -> None:
    with open(os.path.join(dirpath, "scenarios.jsonl"), "w", encoding="utf-8") as f:
        for s in scenarios:
            f.write(scenario_to_json(s))
            f.write("\n")


def read_scenarios(dirpath: str) -> list[Scenario]:
    path = os.path.join(dirpath, "scenarios.jsonl")
    with open(path, encoding="utf-8") as f:
        return [scenario_from_json(line) for line in f if line.strip()]


_LABEL_HEADER = ["sample_id", "optimal_dbm", "binding_pu_id", "binding_pur_id", "conservative_dbm"]


def write_labels(dirpath: str, labels: list[LabelRow]) -> None:
    with open(os.path.join(dirpath, "labels.csv"), "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(_LABEL_HEADER)
        for row in labels:
            d = row.decision
            w.writerow(
                [
                    row.sample_id,
                    _fmt(d.power_dbm),
                    "" if d.binding_pu_id is None else d.binding_pu_id,
                    "" if d.binding_pur_id is None else d.binding_pur_id,
                    _fmt(row.conservative_dbm),
                ]
            )


def read_labels(dirpath: str) -> list[LabelRow]:
    path = os.path.join(dirpath, "labels.csv")
    rows: list[LabelRow] = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != _LABEL_HEADER:
            raise DatasetFormatError(f"unexpected labels.csv header: {header}")
        for rec in reader:
            sid, power, pu, pur, conservative = rec
            decision = AllocationDecision(
                power_dbm=_parse(power),
                binding_pu_id=None if pu == "" else int(pu),
                binding_pur_id=None if pur == "" else int(pur),
            )
            cons = _parse(conservative)
            rows.append(
                LabelRow(
                    sample_id=int(sid),
                    decision=decision,
                    conservative_dbm=cons,
                    conservative_denied=decision.is_granted and cons is None,
                )
            )
    return rows


def write_multisu_labels(dirpath: str, rows: list[tuple[int, int, float | None, int | None]]) -> None:
    """rows: (sample_id, su_id, granted_dbm or None, channel or None)."""
    with open(os.path.join(dirpath, "multisu_labels.csv"), "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(["sample_id", "su_id", "granted_dbm", "channel"])
        for sid, su_id, q, ch in rows:
            w.writerow([sid, su_id, _fmt(q), "" if ch is None else ch])


def read_multisu_labels(dirpath: str) -> list[tuple[int, int, float | None, int | None]]:
    path = os.path.join(dirpath, "multisu_labels.csv")
    out = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        next(reader, None)
        for sid, su_id, q, ch in reader:
            out.append((int(sid), int(su_id), _parse(q), None if ch == "" else int(ch)))
    return out


def write_predictions(path: str, rows: list[tuple[int, float | None, str]]) -> None:
    """rows: (sample_id, predicted_dbm or None for denial, algo)."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(["sample_id", "predicted_dbm", "algo"])
        for sid, p, algo in rows:
            w.writerow([sid, _fmt(p), algo])


def read_predictions(path: str) -> list[tuple[int, float | None, str]]:
    out = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != ["sample_id", "predicted_dbm", "algo"]:
            raise DatasetFormatError(f"unexpected predictions header: {header}")
        for sid, p, algo in reader:
            out.append((int(sid), _parse(p), algo))
    return out


def image_path(dirpath: str, sample_id: int) -> str:
    return os.path.join(dirpath, "images", f"sample_{sample_id:08d}.bin")


def su_image_path(dirpath: str, sample_id: int, su_id: int) -> str:
    return os.path.join(dirpath, "images", f"sample_{sample_id:08d}_su_{su_id:03d}.bin")


def write_su_image(dirpath: str, sample_id: int, su_id: int, sheets: np.ndarray) -> None:
    os.makedirs(os.path.join(dirpath, "images"), exist_ok=True)
    np.ascontiguousarray(sheets, dtype="<f4").tofile(su_image_path(dirpath, sample_id, su_id))


def write_independent_grants(dirpath: str, rows: list[tuple[int, int, float | None]]) -> None:
    """multisu_independent.csv: each SU's stand-alone grant (no other SUs)."""
    with open(os.path.join(dirpath, "multisu_independent.csv"), "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(["sample_id", "su_id", "independent_dbm"])
        for sid, su_id, q in rows:
            w.writerow([sid, su_id, _fmt(q)])


def read_independent_grants(dirpath: str) -> list[tuple[int, int, float | None]]:
    path = os.path.join(dirpath, "multisu_independent.csv")
    out = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        next(reader, None)
        for sid, su_id, q in reader:
            out.append((int(sid), int(su_id), _parse(q)))
    return out


def write_image(dirpath: str, sample_id: int, sheets: np.ndarray) -> None:
    os.makedirs(os.path.join(dirpath, "images"), exist_ok=True)
    np.ascontiguousarray(sheets, dtype="<f4").tofile(image_path(dirpath, sample_id))


def read_image(dirpath: str, sample_id: int, dims: tuple[int, int, int]) -> np.ndarray:
    s, h, w = dims
    raw = np.fromfile(image_path(dirpath, sample_id), dtype="<f4")
    if raw.size != s * h * w:
        raise DatasetFormatError(
            f"image for sample {sample_id}: expected {s * h * w} float32 values, found {raw.size}"
        )
    return raw.reshape(s, h, w)


@dataclass
class Dataset:
    dirpath: str
    manifest: dict
    scenarios: list[Scenario]
    labels: list[LabelRow]

    @property
    def tensor_dims(self) -> tuple[int, int, int] | None:
        t = self.manifest.get("tensor")
        return (t["s"], t["h"], t["w"]) if t else None

    def load_image(self, sample_id: int) -> np.ndarray:
        dims = self.tensor_dims
        if dims is None:
            raise DatasetFormatError("dataset has no tensor dims in its manifest")
        return read_image(self.dirpath, sample_id, dims)


def read_dataset(dirpath: str) -> Dataset:
    manifest = read_manifest(dirpath)
    scenarios = read_scenarios(dirpath)
    labels = read_labels(dirpath) if os.path.exists(os.path.join(dirpath, "labels.csv")) else []
    return Dataset(dirpath=dirpath, manifest=manifest, scenarios=scenarios, labels=labels)
