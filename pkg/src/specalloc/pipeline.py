"""Dataset pipeline stages: generate, label, encode, pretrain, augment.

Every per-sample computation is a pure function of (seed, index) plus the
run configuration, so stages parallelize over sample indices with
byte-identical output regardless of worker count: workers write only
per-sample image files, and the parent writes all shared text files in
index order.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .augment import FarPuConfig, augment_idw, augment_rotate, far_pu_synthetics
from .datasetio import (
    Dataset,
    build_manifest,
    read_dataset,
    write_image,
    write_labels,
    write_manifest,
    write_scenarios,
)
from .entities import Location, Region, Scenario, scenario_from_json, scenario_to_json
from .imaging import SheetConfig, encode_image
from .labeling import ConservativeConfig, LabelRow, conservative_labels, label_samples
from .oracle import OracleConfig, sensor_readings
from .propagation import LogDistanceParams
from .sampling import SamplerConfig, sample_scenario

__all__ = ["RunProfile", "generate", "label", "encode", "pretrain", "augment"]


@dataclass(frozen=True)
class RunProfile:
    """Everything a pipeline stage needs to reproduce a dataset."""

    region: Region
    sampler: SamplerConfig
    propagation: LogDistanceParams
    oracle: OracleConfig
    sheets: SheetConfig
    conservative: ConservativeConfig | None = None

    def manifest(self, count: int, augmentation: list[str] | None = None) -> dict:
        return build_manifest(
            seed=self.sampler.seed,
            count=count,
            region=self.region,
            propagation=self.propagation,
            oracle=self.oracle,
            sampler=self.sampler,
            sheets=self.sheets,
            conservative=self.conservative,
            augmentation=augmentation,
        )


_STATE: dict = {}


def _init_worker(profile: RunProfile, out_dir: str, stage: str, lines: list[str] | None) -> None:
    _STATE["profile"] = profile
    _STATE["out_dir"] = out_dir
    _STATE["stage"] = stage
    _STATE["lines"] = lines


def _sample_with_readings(profile: RunProfile, index: int) -> Scenario:
    s = sample_scenario(profile.sampler, profile.region, index, profile.propagation, profile.oracle)
    return s.with_sensors(sensor_readings(s, profile.propagation, profile.oracle))


def _label_one(profile: RunProfile, index: int, scenario: Scenario) -> LabelRow:
    (row,) = label_samples([scenario], profile.propagation, profile.oracle)
    row = replace(row, sample_id=index)
    if profile.conservative is not None:
        (row,) = conservative_labels([scenario], [row], profile.propagation, profile.oracle, profile.conservative)
    return row


def _work(index: int):
    profile: RunProfile = _STATE["profile"]
    stage = _STATE["stage"]
    if stage in ("gen", "pretrain"):
        scenario = _sample_with_readings(profile, index)
    else:
        scenario = scenario_from_json(_STATE["lines"][index])
    line = scenario_to_json(scenario) if stage in ("gen", "pretrain") else None
    row = _label_one(profile, index, scenario) if stage in ("label", "pretrain") else None
    if stage in ("encode", "pretrain"):
        write_image(_STATE["out_dir"], index, encode_image(scenario, profile.sheets))
    return index, line, row


def _run_stage(profile: RunProfile, out_dir: str, stage: str, indices: range, jobs: int, lines: list[str] | None = None):
    if jobs <= 1:
        _init_worker(profile, out_dir, stage, lines)
        return [_work(i) for i in indices]
    chunk = max(1, len(indices) // (jobs * 8))
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(profile, out_dir, stage, lines)) as pool:
        return list(pool.map(_work, indices, chunksize=chunk))


def generate(out_dir: str, profile: RunProfile, count: int, jobs: int = 1) -> None:
    """Sample scenarios (sensor readings filled) into a fresh dataset dir."""
    os.makedirs(out_dir, exist_ok=True)
    results = _run_stage(profile, out_dir, "gen", range(count), jobs)
    with open(os.path.join(out_dir, "scenarios.jsonl"), "w", encoding="utf-8") as f:
        for _, line, _ in sorted(results):
            f.write(line)
            f.write("\n")
    write_manifest(out_dir, profile.manifest(count))


def _read_lines(dataset_dir: str) -> list[str]:
    with open(os.path.join(dataset_dir, "scenarios.jsonl"), encoding="utf-8") as f:
        return [ln.rstrip("\n") for ln in f if ln.strip()]


def label(dataset_dir: str, profile: RunProfile, jobs: int = 1) -> None:
    lines = _read_lines(dataset_dir)
    results = _run_stage(profile, dataset_dir, "label", range(len(lines)), jobs, lines)
    write_labels(dataset_dir, [row for _, _, row in sorted(results)])


def encode(dataset_dir: str, profile: RunProfile, jobs: int = 1) -> None:
    lines = _read_lines(dataset_dir)
    _run_stage(profile, dataset_dir, "encode", range(len(lines)), jobs, lines)


def pretrain(out_dir: str, profile: RunProfile, count: int, jobs: int = 1, chunk_size: int = 1024) -> None:
    """Streamed generate+label+encode for large auto-generated sets.

    Works in fixed-size index chunks so memory stays bounded at any count.
    """
    os.makedirs(out_dir, exist_ok=True)
    scen_path = os.path.join(out_dir, "scenarios.jsonl")
    rows: list[LabelRow] = []
    with open(scen_path, "w", encoding="utf-8") as f:
        for start in range(0, count, chunk_size):
            indices = range(start, min(start + chunk_size, count))
            results = sorted(_run_stage(profile, out_dir, "pretrain", indices, jobs))
            for _, line, row in results:
                f.write(line)
                f.write("\n")
                rows.append(row)
    write_labels(out_dir, rows)
    write_manifest(out_dir, profile.manifest(count))


def augment(
    dataset_dir: str,
    out_dir: str,
    profile: RunProfile,
    rotations: list[int] | None = None,
    far_pu: FarPuConfig | None = None,
    idw_locations: int = 0,
    idw_neighbors: int = 4,
) -> Dataset:
    """Copy a labeled dataset and append synthetic samples.

    Synthetics keep the original sample's label; far-transmitter
    synthetics that fail the oracle drift check are dropped. New samples
    get fresh ids continuing after the originals, and images are encoded
    for every sample when the source dataset had images.
    """
    src = read_dataset(dataset_dir)
    if not src.labels:
        raise ValueError("augmentation needs a labeled dataset")
    os.makedirs(out_dir, exist_ok=True)
    had_images = os.path.isdir(os.path.join(dataset_dir, "images"))

    scenarios = list(src.scenarios)
    labels = list(src.labels)
    provenance: list[str] = list(src.manifest.get("augmentation", []))
    next_id = len(scenarios)

    def push(scenario: Scenario, source_row: LabelRow) -> None:
        nonlocal next_id
        scenarios.append(scenario)
        labels.append(replace(source_row, sample_id=next_id))
        next_id += 1

    for deg in rotations or []:
        for s, row in zip(src.scenarios, src.labels):
            push(augment_rotate(s, deg), row)
        provenance.append(f"rotate:{deg}")

    if far_pu is not None:
        kept = dropped = 0
        for s, row in zip(src.scenarios, src.labels):
            rng = np.random.default_rng(np.random.SeedSequence(entropy=s.seed & ((1 << 64) - 1), spawn_key=(0xFA12,)))
            for syn in far_pu_synthetics(s, row, profile.propagation, profile.oracle, far_pu, rng):
                if syn.kept:
                    push(syn.scenario, row)
                    kept += 1
                else:
                    dropped += 1
        provenance.append(f"far_pu:d_far={far_pu.d_far_m},delta={far_pu.delta_db},kept={kept},dropped={dropped}")

    if idw_locations > 0:
        for s, row in zip(src.scenarios, src.labels):
            rng = np.random.default_rng(np.random.SeedSequence(entropy=s.seed & ((1 << 64) - 1), spawn_key=(0x1D3,)))
            locs = [
                Location(float(rng.uniform(0, s.region.width_m)), float(rng.uniform(0, s.region.height_m)))
                for _ in range(idw_locations)
            ]
            push(augment_idw(s, locs, k_nearest=idw_neighbors), row)
        provenance.append(f"idw:locations={idw_locations},k={idw_neighbors}")

    write_scenarios(out_dir, scenarios)
    write_labels(out_dir, labels)
    if had_images:
        for i, s in enumerate(scenarios):
            write_image(out_dir, i, encode_image(s, profile.sheets))
    manifest = dict(src.manifest)
    manifest["count"] = len(scenarios)
    manifest["augmentation"] = provenance
    write_manifest(out_dir, manifest)
    return read_dataset(out_dir)
