"""Scenario configuration: dataclass assembly plus strict TOML loading.

A scenario file is nested key-value text whose sections mirror the config
dataclasses.  Unknown keys are rejected with the nearest valid key named,
so typos fail loudly instead of silently running defaults.
"""

from __future__ import annotations

import difflib
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .channel import (
    ChainConfigs,
    EncryptionConfig,
    NetworkConfig,
    ObservationConfig,
    ProtocolConfig,
)
from .errors import ValidationError
from .traffic import (
    SemanticLabel,
    SizeDistribution,
    TrafficProfile,
    preset_profiles,
    validate_priors,
)
from .trajectory import MetricConfig, default_statistics

DEFAULT_WINDOW = 10.0
DEFAULT_TRIALS = 1000
DEFAULT_SEED = 20260809


@dataclass(frozen=True)
class DefenseParams:
    """One point of a defense grid."""

    pad_policy: str | None = None  # overrides the scenario's encryption policy
    pad_target: int | None = None
    added_delay: float = 0.0  # seconds added to base latency
    cover_rate: float = 0.0  # dummy packets/second

    def validate(self) -> None:
        if self.added_delay < 0:
            raise ValidationError("defense: added_delay must be non-negative")
        if self.cover_rate < 0:
            raise ValidationError("defense: cover_rate must be non-negative")

    def is_null(self) -> bool:
        return (
            self.pad_policy is None
            and self.pad_target is None
            and self.added_delay == 0.0
            and self.cover_rate == 0.0
        )

    def describe(self) -> str:
        if self.is_null():
            return "none"
        parts = []
        if self.pad_policy is not None:
            parts.append(f"pad={self.pad_policy}")
        if self.pad_target is not None:
            parts.append(f"target={self.pad_target}")
        if self.added_delay:
            parts.append(f"delay={self.added_delay!r}")
        if self.cover_rate:
            parts.append(f"cover={self.cover_rate!r}")
        return ",".join(parts)


@dataclass(frozen=True)
class SweepSpec:
    grid: tuple[DefenseParams, ...]
    beta_max: float = 0.5  # bandwidth overhead budget, fraction
    dt_max: float = 0.05  # added latency budget, seconds

    def validate(self) -> None:
        if not self.grid:
            raise ValidationError("sweep: grid must be non-empty")
        for d in self.grid:
            d.validate()
        if self.beta_max < 0 or self.dt_max < 0:
            raise ValidationError("sweep: constraint budgets must be non-negative")


@dataclass
class ScenarioConfig:
    """Everything one experiment needs, resolvable from a single file."""

    labels: tuple[SemanticLabel, ...]
    profiles: dict[str, TrafficProfile]
    configs: ChainConfigs = field(default_factory=ChainConfigs)
    metric: MetricConfig = field(default_factory=MetricConfig)
    phi_key: str = "clipped_total_bytes"
    psi_key: str = "clipped_total_bytes"
    g_cap: float = 1.0
    window: float = DEFAULT_WINDOW
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    sweep: SweepSpec | None = None

    def validate(self) -> None:
        if len(self.labels) < 2:
            raise ValidationError("scenario: need at least 2 labels")
        validate_priors(self.labels)
        for lab in self.labels:
            if lab.name not in self.profiles:
                raise ValidationError(f"scenario: no profile for label {lab.name!r}")
            self.profiles[lab.name].validate()
        self.configs.validate()
        self.metric.validate()
        if self.window <= 0:
            raise ValidationError("scenario: window must be positive")
        if self.trials < 100:
            raise ValidationError(f"scenario: trials must be >= 100, got {self.trials}")
        registry = default_statistics(self.metric, self.g_cap)
        for key_name, key in (("phi", self.phi_key), ("psi", self.psi_key)):
            if key not in registry:
                raise ValidationError(
                    f"scenario: statistic key {key!r} for {key_name} not in registry "
                    f"{sorted(registry)}"
                )
        if self.sweep is not None:
            self.sweep.validate()

    def pair(self) -> tuple[SemanticLabel, SemanticLabel]:
        return self.labels[0], self.labels[1]


def default_scenario(
    label_names: tuple[str, str] = ("video", "web"),
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    window: float = DEFAULT_WINDOW,
) -> ScenarioConfig:
    """The shipped scenario: two preset classes, equal priors, default chain."""
    presets = preset_profiles()
    labels = tuple(
        SemanticLabel(id=i, name=name, prior=1.0 / len(label_names))
        for i, name in enumerate(label_names)
    )
    profiles = {name: presets[name] for name in label_names}
    return ScenarioConfig(
        labels=labels, profiles=profiles, trials=trials, seed=seed, window=window
    )


# ---------------------------------------------------------------------------
# TOML loading
# ---------------------------------------------------------------------------

_TOP_KEYS = {
    "window",
    "trials",
    "seed",
    "labels",
    "profiles",
    "protocol",
    "encryption",
    "network",
    "observation",
    "metric",
    "statistics",
    "sweep",
}
_LABEL_KEYS = {"name", "prior", "profile"}
_PROFILE_KEYS = {"kind", "burst_rate", "size_family", "size_params", "up_mix", "duty_on", "duty_period"}
_STATISTICS_KEYS = {"phi", "psi", "g_cap"}
_SWEEP_KEYS = {"beta_max", "dt_max", "grid"}
_DEFENSE_KEYS = {"pad_policy", "pad_target", "added_delay", "cover_rate"}


def _reject_unknown(mapping: dict, allowed: set[str], where: str) -> None:
    for key in mapping:
        if key not in allowed:
            close = difflib.get_close_matches(key, sorted(allowed), n=1)
            hint = f"; closest valid key: {close[0]!r}" if close else ""
            raise ValidationError(f"unknown key {key!r} in {where}{hint}")


def _dataclass_from(mapping: dict, cls, where: str):
    allowed = {f.name for f in fields(cls)}
    _reject_unknown(mapping, allowed, where)
    return cls(**mapping)


def _profile_from(mapping: dict, where: str) -> TrafficProfile:
    _reject_unknown(mapping, _PROFILE_KEYS, where)
    try:
        sizes = SizeDistribution(
            family=mapping["size_family"],
            params=tuple(float(p) for p in mapping["size_params"]),
        )
        return TrafficProfile(
            kind=mapping.get("kind", "custom"),
            burst_rate=float(mapping["burst_rate"]),
            sizes=sizes,
            up_mix=float(mapping["up_mix"]),
            duty_on=float(mapping["duty_on"]),
            duty_period=float(mapping["duty_period"]),
        )
    except KeyError as exc:
        raise ValidationError(f"{where}: missing required key {exc.args[0]!r}") from None


def scenario_from_mapping(data: dict) -> ScenarioConfig:
    _reject_unknown(data, _TOP_KEYS, "scenario")

    presets = preset_profiles()
    customs = {
        name: _profile_from(body, f"profiles.{name}")
        for name, body in data.get("profiles", {}).items()
    }

    label_entries = data.get("labels")
    if not label_entries:
        raise ValidationError("scenario: at least two [[labels]] entries required")
    labels = []
    profiles: dict[str, TrafficProfile] = {}
    for i, entry in enumerate(label_entries):
        _reject_unknown(entry, _LABEL_KEYS, f"labels[{i}]")
        name = entry.get("name")
        if name is None:
            raise ValidationError(f"labels[{i}]: missing 'name'")
        prior = float(entry.get("prior", 1.0 / len(label_entries)))
        labels.append(SemanticLabel(id=i, name=name, prior=prior))
        profile_key = entry.get("profile", name)
        if profile_key in customs:
            profiles[name] = customs[profile_key]
        elif profile_key in presets:
            profiles[name] = presets[profile_key]
        else:
            known = sorted(set(presets) | set(customs))
            close = difflib.get_close_matches(profile_key, known, n=1)
            hint = f"; closest valid key: {close[0]!r}" if close else ""
            raise ValidationError(
                f"labels[{i}]: profile {profile_key!r} is neither a preset nor a "
                f"[profiles.*] entry{hint}"
            )

    configs = ChainConfigs(
        protocol=_dataclass_from(data.get("protocol", {}), ProtocolConfig, "protocol"),
        encryption=_dataclass_from(data.get("encryption", {}), EncryptionConfig, "encryption"),
        network=_dataclass_from(data.get("network", {}), NetworkConfig, "network"),
        observation=_observation_from(data.get("observation", {})),
    )
    metric = _dataclass_from(data.get("metric", {}), MetricConfig, "metric")

    stats = dict(data.get("statistics", {}))
    _reject_unknown(stats, _STATISTICS_KEYS, "statistics")

    sweep = None
    if "sweep" in data:
        body = dict(data["sweep"])
        _reject_unknown(body, _SWEEP_KEYS, "sweep")
        grid = tuple(
            _dataclass_from(g, DefenseParams, f"sweep.grid[{j}]")
            for j, g in enumerate(body.get("grid", []))
        )
        sweep = SweepSpec(
            grid=grid,
            beta_max=float(body.get("beta_max", 0.5)),
            dt_max=float(body.get("dt_max", 0.05)),
        )

    cfg = ScenarioConfig(
        labels=tuple(labels),
        profiles=profiles,
        configs=configs,
        metric=metric,
        phi_key=stats.get("phi", "clipped_total_bytes"),
        psi_key=stats.get("psi", "clipped_total_bytes"),
        g_cap=float(stats.get("g_cap", 1.0)),
        window=float(data.get("window", DEFAULT_WINDOW)),
        trials=int(data.get("trials", DEFAULT_TRIALS)),
        seed=int(data.get("seed", DEFAULT_SEED)),
        sweep=sweep,
    )
    cfg.validate()
    return cfg


def _observation_from(mapping: dict) -> ObservationConfig:
    allowed = {f.name for f in fields(ObservationConfig)}
    _reject_unknown(mapping, allowed, "observation")
    if "features" in mapping:
        mapping = dict(mapping)
        mapping["features"] = tuple(mapping["features"])
    return ObservationConfig(**mapping)


def load_scenario(path: str | Path) -> ScenarioConfig:
    raw = Path(path).read_bytes()
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"scenario file {path}: {exc}") from None
    try:
        return scenario_from_mapping(data)
    except TypeError as exc:
        raise ValidationError(f"scenario file {path}: {exc}") from None
