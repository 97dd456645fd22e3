"""Run configuration: defaults, YAML loading, validation with field paths."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Mapping

import yaml

from .glmb import TruncationBudget
from .mdb import MdbConfig
from .metrics import OspaParams
from .models import MotionModel, SensorModel
from .sim import Region, ScenarioScript, TargetScript, default_scenario


class ConfigError(Exception):
    """Raised with every validation problem found, not just the first."""

    def __init__(self, errors: list[str]) -> None:
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass(frozen=True)
class FilterConfig:
    """Tracker-side knobs: particle counts, survival, truncation budgets."""

    particles_per_track: int = 1000
    survival_probability: float = 0.99
    budget: TruncationBudget = field(default_factory=TruncationBudget)

    def __post_init__(self) -> None:
        if self.particles_per_track < 1:
            raise ValueError("particles_per_track must be positive")
        if not (0.0 <= self.survival_probability <= 1.0):
            raise ValueError("survival_probability must lie in [0, 1]")


@dataclass(frozen=True)
class RunConfig:
    """Complete experiment description; every field has a sensible default."""

    seed: int = 1
    runs: int = 1
    workers: int = 1
    output_dir: str = "out"
    scenario: ScenarioScript = field(default_factory=default_scenario)
    motion: MotionModel = field(default_factory=MotionModel)
    sensor: SensorModel = field(default_factory=SensorModel)
    filter: FilterConfig = field(default_factory=FilterConfig)
    birth: MdbConfig = field(default_factory=MdbConfig)
    ospa: OspaParams = field(default_factory=OspaParams)

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.runs < 1:
            raise ValueError("runs must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")


_NUMERIC = (int, float)


def _check_fields(sub: Mapping, known: tuple[str, ...], prefix: str, errors: list[str]) -> None:
    for key in sub:
        if key not in known:
            errors.append(f"{prefix}{key}: unknown field")


def _number(sub: Mapping, key: str, prefix: str, errors: list[str], out: dict) -> None:
    if key not in sub:
        return
    value = sub[key]
    if isinstance(value, bool) or not isinstance(value, _NUMERIC):
        errors.append(f"{prefix}{key}: expected a number, got {value!r}")
        return
    out[key] = float(value)


def _integer(sub: Mapping, key: str, prefix: str, errors: list[str], out: dict) -> None:
    if key not in sub:
        return
    value = sub[key]
    if isinstance(value, bool) or not isinstance(value, int):
        errors.append(f"{prefix}{key}: expected an integer, got {value!r}")
        return
    out[key] = value


def _build(cls, kwargs: dict, prefix: str, errors: list[str]):
    try:
        return cls(**kwargs)
    except ValueError as exc:
        errors.append(f"{prefix.rstrip('.') or 'config'}: {exc}")
        return None


def _mapping_section(raw: Mapping, key: str, errors: list[str]) -> Mapping | None:
    sub = raw.get(key)
    if sub is None:
        return {}
    if not isinstance(sub, Mapping):
        errors.append(f"{key}: expected a mapping")
        return None
    return sub


def _parse_simple(cls, sub: Mapping, prefix: str, errors: list[str], numbers: tuple[str, ...], integers: tuple[str, ...] = ()):
    _check_fields(sub, numbers + integers, prefix, errors)
    kwargs: dict = {}
    for key in numbers:
        _number(sub, key, prefix, errors, kwargs)
    for key in integers:
        _integer(sub, key, prefix, errors, kwargs)
    return _build(cls, kwargs, prefix, errors)


def _parse_vector(sub: Mapping, key: str, length: int, prefix: str, errors: list[str], out: dict) -> None:
    if key not in sub:
        return
    value = sub[key]
    if (
        not isinstance(value, (list, tuple))
        or len(value) != length
        or any(isinstance(v, bool) or not isinstance(v, _NUMERIC) for v in value)
    ):
        errors.append(f"{prefix}{key}: expected {length} numbers")
        return
    out[key] = tuple(float(v) for v in value)


def _parse_scenario(sub: Mapping, errors: list[str]) -> ScenarioScript | None:
    prefix = "scenario."
    _check_fields(sub, ("duration", "region", "targets"), prefix, errors)
    defaults = default_scenario()
    kwargs: dict = {}
    _integer(sub, "duration", prefix, errors, kwargs)
    region = defaults.region
    if "region" in sub:
        if not isinstance(sub["region"], Mapping):
            errors.append("scenario.region: expected a mapping")
        else:
            region = _parse_simple(
                Region, sub["region"], "scenario.region.", errors,
                numbers=("x_min", "x_max", "y_min", "y_max"),
            )
    targets = defaults.targets
    if "targets" in sub:
        raw_targets = sub["targets"]
        if not isinstance(raw_targets, list):
            errors.append("scenario.targets: expected a list")
        else:
            parsed = []
            for i, entry in enumerate(raw_targets):
                tpfx = f"scenario.targets[{i}]."
                if not isinstance(entry, Mapping):
                    errors.append(f"scenario.targets[{i}]: expected a mapping")
                    continue
                _check_fields(entry, ("birth", "death", "state"), tpfx, errors)
                tkw: dict = {}
                _integer(entry, "birth", tpfx, errors, tkw)
                _integer(entry, "death", tpfx, errors, tkw)
                _parse_vector(entry, "state", 5, tpfx, errors, tkw)
                missing = [k for k in ("birth", "death", "state") if k not in tkw]
                if missing:
                    errors.append(f"scenario.targets[{i}]: missing {', '.join(missing)}")
                    continue
                target = _build(
                    TargetScript,
                    {"birth_scan": tkw["birth"], "death_scan": tkw["death"], "initial_state": tkw["state"]},
                    tpfx,
                    errors,
                )
                if target is not None:
                    parsed.append(target)
            targets = tuple(parsed)
    if region is None:
        return None
    kwargs.setdefault("duration", defaults.duration)
    return _build(ScenarioScript, {**kwargs, "region": region, "targets": targets}, "scenario.", errors)


def validate_config(raw: Mapping | None) -> RunConfig:
    """Build a RunConfig from a parsed mapping; raises ConfigError listing
    every offending field by path. An empty mapping yields pure defaults."""
    raw = raw or {}
    errors: list[str] = []
    if not isinstance(raw, Mapping):
        raise ConfigError(["config: expected a mapping at the top level"])
    top_known = (
        "seed", "runs", "workers", "output_dir",
        "scenario", "motion", "sensor", "filter", "birth", "ospa",
    )
    _check_fields(raw, top_known, "", errors)
    top: dict = {}
    _integer(raw, "seed", "", errors, top)
    _integer(raw, "runs", "", errors, top)
    _integer(raw, "workers", "", errors, top)
    if "output_dir" in raw:
        if not isinstance(raw["output_dir"], str) or not raw["output_dir"]:
            errors.append("output_dir: expected a nonempty string")
        else:
            top["output_dir"] = raw["output_dir"]

    sections: dict[str, Any] = {}

    sub = _mapping_section(raw, "scenario", errors)
    if sub is not None:
        sections["scenario"] = _parse_scenario(sub, errors) if sub else default_scenario()

    sub = _mapping_section(raw, "motion", errors)
    if sub is not None:
        sections["motion"] = _parse_simple(
            MotionModel, sub, "motion.", errors,
            numbers=("dt", "sigma_accel", "sigma_turn"),
        )

    sub = _mapping_section(raw, "sensor", errors)
    if sub is not None:
        sections["sensor"] = _parse_simple(
            SensorModel, sub, "sensor.", errors,
            numbers=(
                "sigma_bearing", "sigma_range", "pd_peak", "pd_scale",
                "clutter_rate", "bearing_min", "bearing_max", "range_min", "range_max",
            ),
        )

    sub = _mapping_section(raw, "filter", errors)
    if sub is not None:
        prefix = "filter."
        _check_fields(sub, ("particles_per_track", "survival_probability", "budget"), prefix, errors)
        fkw: dict = {}
        _integer(sub, "particles_per_track", prefix, errors, fkw)
        _number(sub, "survival_probability", prefix, errors, fkw)
        budget = None
        if "budget" in sub:
            if not isinstance(sub["budget"], Mapping):
                errors.append("filter.budget: expected a mapping")
            else:
                bkw: dict = {}
                bpfx = "filter.budget."
                _check_fields(
                    sub["budget"],
                    ("total_assignments", "survival_subsets", "birth_subsets", "min_weight", "max_hypotheses"),
                    bpfx, errors,
                )
                for key in ("total_assignments", "survival_subsets", "birth_subsets", "max_hypotheses"):
                    _integer(sub["budget"], key, bpfx, errors, bkw)
                _number(sub["budget"], "min_weight", bpfx, errors, bkw)
                budget = _build(TruncationBudget, bkw, bpfx, errors)
        if budget is not None:
            fkw["budget"] = budget
        sections["filter"] = _build(FilterConfig, fkw, prefix, errors)

    sub = _mapping_section(raw, "birth", errors)
    if sub is not None:
        prefix = "birth."
        known = (
            "mean_births_per_scan", "max_birth_existence", "particles_per_birth",
            "birth_spread", "min_newborn_likelihood",
        )
        _check_fields(sub, known, prefix, errors)
        bkw = {}
        _number(sub, "mean_births_per_scan", prefix, errors, bkw)
        _number(sub, "max_birth_existence", prefix, errors, bkw)
        _integer(sub, "particles_per_birth", prefix, errors, bkw)
        _parse_vector(sub, "birth_spread", 5, prefix, errors, bkw)
        _number(sub, "min_newborn_likelihood", prefix, errors, bkw)
        sections["birth"] = _build(MdbConfig, bkw, prefix, errors)

    sub = _mapping_section(raw, "ospa", errors)
    if sub is not None:
        sections["ospa"] = _parse_simple(OspaParams, sub, "ospa.", errors, numbers=("cutoff", "order"))

    if errors or any(v is None for v in sections.values()):
        raise ConfigError(errors)
    try:
        return RunConfig(**top, **sections)
    except ValueError as exc:
        raise ConfigError([f"config: {exc}"]) from exc


def load_config(path: str | None) -> RunConfig:
    """Load a YAML config file; None or an empty file yields pure defaults."""
    if path is None:
        return validate_config({})
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if raw is None:
        raw = {}
    if not isinstance(raw, Mapping):
        raise ConfigError(["config: expected a mapping at the top level"])
    return validate_config(raw)


def resolved_config(cfg: RunConfig) -> dict:
    """The fully resolved configuration as plain nested mappings."""
    return {
        "seed": cfg.seed,
        "runs": cfg.runs,
        "workers": cfg.workers,
        "output_dir": cfg.output_dir,
        "scenario": {
            "duration": cfg.scenario.duration,
            "region": dataclasses.asdict(cfg.scenario.region),
            "targets": [
                {"birth": t.birth_scan, "death": t.death_scan, "state": list(t.initial_state)}
                for t in cfg.scenario.targets
            ],
        },
        "motion": dataclasses.asdict(cfg.motion),
        "sensor": dataclasses.asdict(cfg.sensor),
        "filter": {
            "particles_per_track": cfg.filter.particles_per_track,
            "survival_probability": cfg.filter.survival_probability,
            "budget": dataclasses.asdict(cfg.filter.budget),
        },
        "birth": {
            "mean_births_per_scan": cfg.birth.mean_births_per_scan,
            "max_birth_existence": cfg.birth.max_birth_existence,
            "particles_per_birth": cfg.birth.particles_per_birth,
            "birth_spread": list(cfg.birth.birth_spread),
            "min_newborn_likelihood": cfg.birth.min_newborn_likelihood,
        },
        "ospa": dataclasses.asdict(cfg.ospa),
    }


def dump_config(cfg: RunConfig) -> str:
    """Resolved configuration as YAML (the --dump-config output)."""
    return yaml.safe_dump(resolved_config(cfg), sort_keys=False)
