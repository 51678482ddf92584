"""Run configuration: a flat, sectioned key-value text file (TOML-style).

Only the subset needed for reproducible experiment definitions is
parsed: ``[section]`` headers, ``key = value`` lines, ``#`` comments,
with integers, floats, booleans, quoted strings, and flat lists.
Parsing fails with the offending ``section.key`` path. Flags given on
the command line override config values.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, fields

from .baselines import IpbConfig, LbtConfig
from .entities import Region
from .imaging import SheetConfig
from .labeling import ConservativeConfig
from .oracle import OracleConfig
from .propagation import LogDistanceParams
from .sampling import SamplerConfig

__all__ = ["RunConfig", "ConfigError", "load_config", "parse_config", "default_config"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class MetricsConfig:
    bandwidth_hz: float = 1e6
    rx_radius_m: float = 100.0


@dataclass(frozen=True)
class RunConfig:
    region: Region
    propagation: LogDistanceParams
    oracle: OracleConfig
    sampler: SamplerConfig
    sheets: SheetConfig
    lbt: LbtConfig
    ipb: IpbConfig
    metrics: MetricsConfig
    conservative: ConservativeConfig | None = None
    jobs: int = 0  # 0 = auto (logical cores)

    def with_seed(self, seed: int) -> "RunConfig":
        """Reseed the whole run: sampling and propagation noise together."""
        return dataclasses.replace(
            self,
            sampler=dataclasses.replace(self.sampler, seed=seed),
            propagation=dataclasses.replace(self.propagation, seed=seed),
        )


_SECTIONS = {
    "region": Region,
    "propagation": LogDistanceParams,
    "oracle": OracleConfig,
    "sampler": SamplerConfig,
    "sheets": SheetConfig,
    "conservative": ConservativeConfig,
    "lbt": LbtConfig,
    "ipb": IpbConfig,
    "metrics": MetricsConfig,
    "run": None,  # run-level scalars: seed, jobs
}

_INT_RE = re.compile(r"^[+-]?\d+$")
_FLOAT_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def _parse_value(raw: str, path: str):
    raw = raw.strip()
    if raw.startswith("[") and raw.endswith("]"):
        inner = raw[1:-1].strip()
        return [] if not inner else [_parse_value(v, path) for v in inner.split(",")]
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        return raw[1:-1]
    if raw in ("true", "false"):
        return raw == "true"
    if raw == "none":
        return None
    if _INT_RE.match(raw):
        return int(raw)
    if _FLOAT_RE.match(raw):
        return float(raw)
    raise ConfigError(f"{path}: cannot parse value {raw!r}")


def _parse_sections(text: str) -> dict[str, dict]:
    sections: dict[str, dict] = {}
    current: str | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip()
            if current not in _SECTIONS:
                raise ConfigError(f"line {lineno}: unknown section [{current}]")
            sections.setdefault(current, {})
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value, got {stripped!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: key outside any [section]")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        sections[current][key] = _parse_value(raw, f"{current}.{key}")
    return sections


def _build(cls, section_name: str, values: dict):
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, val in values.items():
        if key not in known:
            raise ConfigError(f"{section_name}.{key}: unknown key")
        if isinstance(val, list):
            val = tuple(val)
        kwargs[key] = val
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section_name}]: {exc}") from exc


def parse_config(text: str) -> RunConfig:
    sections = _parse_sections(text)
    run = sections.get("run", {})
    for key in run:
        if key not in ("seed", "jobs"):
            raise ConfigError(f"run.{key}: unknown key")
    cfg = RunConfig(
        region=_build(Region, "region", sections.get("region", {})),
        propagation=_build(LogDistanceParams, "propagation", sections.get("propagation", {})),
        oracle=_build(OracleConfig, "oracle", sections.get("oracle", {})),
        sampler=_build(SamplerConfig, "sampler", sections.get("sampler", {})),
        sheets=_build(SheetConfig, "sheets", sections.get("sheets", {})),
        conservative=_build(ConservativeConfig, "conservative", sections["conservative"]) if "conservative" in sections else None,
        lbt=_build(LbtConfig, "lbt", sections.get("lbt", {})),
        ipb=_build(IpbConfig, "ipb", sections.get("ipb", {})),
        metrics=_build(MetricsConfig, "metrics", sections.get("metrics", {})),
        jobs=run.get("jobs", 0),
    )
    if "seed" in run:
        cfg = cfg.with_seed(run["seed"])
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def default_config() -> RunConfig:
    return parse_config("")
