"""Application configuration loaded from a JSON file.

Unknown keys are rejected by name so typos fail loudly instead of silently
falling back to defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from strumkit.neural.config import TargetSpec, TrainConfig


@dataclass(frozen=True)
class AppConfig:
    banks_path: str = ""
    assets_path: str = ""
    output_dir: str = "out"
    service_port: int = 8000
    tolerance_s: float = 0.05
    target_spec: TargetSpec = field(default_factory=TargetSpec)
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if not 0 < self.service_port < 65536:
            raise ValueError(f"service_port out of range: {self.service_port}")
        if self.tolerance_s <= 0:
            raise ValueError("tolerance_s must be positive")


def _build(cls, data: dict, context: str):
    allowed = {f.name for f in fields(cls)}
    for key in data:
        if key not in allowed:
            raise ValueError(f"unknown configuration key: {context}{key}")
    return cls(**data)


def app_config_from_dict(data: dict) -> AppConfig:
    """Validate a plain dict; nested target_spec / train sections are
    validated against their own fields the same way."""
    data = dict(data)
    kwargs = {}
    if "target_spec" in data:
        kwargs["target_spec"] = _build(TargetSpec, data.pop("target_spec"),
                                       "target_spec.")
    if "train" in data:
        kwargs["train"] = _build(TrainConfig, data.pop("train"), "train.")
    allowed = {f.name for f in fields(AppConfig)}
    for key in data:
        if key not in allowed:
            raise ValueError(f"unknown configuration key: {key}")
    return AppConfig(**data, **kwargs)


def load_app_config(path: str | Path | None) -> AppConfig:
    """Load the JSON config file, or defaults when no path is given."""
    if path is None:
        return AppConfig()
    return app_config_from_dict(json.loads(Path(path).read_text()))
