"""Experiment configuration: JSON file, schema-validated."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .distributions import InterArrivalLaw, law_from_spec
from .errors import ConfigError, InvalidLaw

ALL_CHECKS = ("ks", "covariance", "remainder", "increments", "composition")


def load_schema() -> dict[str, Any]:
    return json.loads(resources.files("renewal_kac").joinpath("data/config.schema.json").read_text())


def default_config_text() -> str:
    return resources.files("renewal_kac").joinpath("data/default.json").read_text()


@dataclass
class ExperimentConfig:
    law: dict[str, Any]
    n_values: list[int]
    replicates: int
    seed: int
    grid: int = 1024
    checks: list[str] = field(default_factory=lambda: list(ALL_CHECKS))
    moment_p: float = 3.0
    C: float | None = None
    ks_times: list[float] = field(default_factory=lambda: [0.25, 0.5, 1.0])
    covariance_times: list[float] = field(default_factory=lambda: [0.25, 0.5, 0.75, 1.0])
    increments: list[float] = field(default_factory=lambda: [0.0, 0.3, 0.5, 0.9])
    record_paths: bool = False
    output: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        validate(self.to_dict())
        self.build_law()

    def build_law(self) -> InterArrivalLaw:
        try:
            return law_from_spec(self.law)
        except InvalidLaw as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        if out["C"] is None:
            del out["C"]
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        validate(data)
        return cls(**data)


def validate(data: dict[str, Any]) -> None:
    try:
        jsonschema.validate(data, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from None


def load_config(path: str | Path | None = None) -> ExperimentConfig:
    """Read a config file; ``None`` loads the shipped default."""
    try:
        text = default_config_text() if path is None else Path(path).read_text()
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return ExperimentConfig.from_dict(data)
