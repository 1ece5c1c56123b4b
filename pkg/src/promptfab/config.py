"""Layered runtime configuration.

Precedence, lowest to highest: built-in defaults, JSON config file,
PROMPTFAB_* environment variables, explicit overrides (CLI flags).
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .feasibility import SupportRule
from .kinematics import ArmModel, load_arm_profile
from .providers import RemoteConfig
from .voxel import ComponentSpec, ScalingTarget

ENV_PREFIX = "PROMPTFAB_"


@dataclass
class Config:
    provider: str = "mock"
    cell_size: float = 0.05
    occupancy_threshold: float = 0.5
    samples_per_axis: int = 4
    voxel_seed: int = 0
    generation_seed: int = 0
    max_cantilever: int = 2
    height_cells: int | None = None
    max_cells: int | None = None
    arm_profile: str | None = None
    data_dir: str = "promptfab_data"
    total_components: int = 40
    generation_url: str = ""
    transcription_url: str = ""
    verification_url: str = ""
    api_key_env: str = "PROMPTFAB_API_KEY"
    timeout: float = 60.0

    # -- derived views ---------------------------------------------------

    def component_spec(self) -> ComponentSpec:
        c = self.cell_size
        return ComponentSpec(
            cell_size=(c, c, c),
            occupancy_threshold=self.occupancy_threshold,
            samples_per_axis=self.samples_per_axis,
            seed=self.voxel_seed,
        )

    def support_rule(self) -> SupportRule:
        return SupportRule(max_cantilever=self.max_cantilever)

    def scaling_target(self) -> ScalingTarget:
        return ScalingTarget(height_cells=self.height_cells, max_cells=self.max_cells)

    def arm(self) -> ArmModel:
        return load_arm_profile(self.arm_profile)

    def remote(self) -> RemoteConfig:
        return RemoteConfig(
            generation_url=self.generation_url,
            transcription_url=self.transcription_url,
            verification_url=self.verification_url,
            api_key_env=self.api_key_env,
            timeout=self.timeout,
        )


def _coerce(name: str, raw: str, default):
    field_type = {f.name: f.type for f in dataclasses.fields(Config)}[name]
    if field_type in ("int | None", "str | None"):
        if raw.lower() in ("", "none", "null"):
            return None
        return int(raw) if field_type == "int | None" else raw
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def load_config(
    path: str | Path | None = None,
    env: dict | None = None,
    overrides: dict | None = None,
) -> Config:
    """Merge defaults, config file, environment, and explicit overrides."""
    config = Config()
    names = {f.name for f in dataclasses.fields(Config)}

    if path is not None:
        with open(path) as fh:
            file_values = json.load(fh)
        unknown = set(file_values) - names
        if unknown:
            raise ValueError(f"unknown config keys in {path}: {sorted(unknown)}")
        for key, value in file_values.items():
            setattr(config, key, value)

    env = os.environ if env is None else env
    for name in names:
        raw = env.get(ENV_PREFIX + name.upper())
        if raw is not None:
            setattr(config, name, _coerce(name, raw, getattr(Config, name, None)))

    for key, value in (overrides or {}).items():
        if key not in names:
            raise ValueError(f"unknown config override {key!r}")
        if value is not None:
            setattr(config, key, value)
    return config
