"""
Configuration Module for the Lord's Paradox Laboratory

Settings come from configs/config.yaml, optionally from a .env file, and from
environment variables. Environment values win over the config file; the CLI
applies its own flags between the two (see src.main).
"""

import os
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.utils.errors import ModelValidationError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[2] / "configs" / "config.yaml"

SEED_ENV = "LORDS_LAB_SEED"
CONFIG_ENV = "LORDS_LAB_CONFIG"
WORKERS_ENV = "LORDS_LAB_WORKERS"
LOG_LEVEL_ENV = "LOG_LEVEL"


class SimulationSettings(BaseModel):
    """Monte Carlo defaults."""
    model_config = ConfigDict(frozen=True)

    replications: int = 1000
    paper_replications: int = 10000
    n_per_replication: int = 10000
    master_seed: int = 20230101
    y0_fixed_kg: float = 80.0
    workers: int = 1

    @field_validator("replications", "paper_replications", "workers")
    @classmethod
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError("must be at least 1")
        return v

    @field_validator("n_per_replication")
    @classmethod
    def validate_n(cls, v):
        if v < 10:
            raise ValueError("n_per_replication must be at least 10")
        return v

    @field_validator("master_seed")
    @classmethod
    def validate_seed(cls, v):
        if v < 0 or v >= 1 << 64:
            raise ValueError("master_seed must be a non-negative 64-bit integer")
        return v


class Figure3Settings(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = 10000
    coverage: float = 0.995
    ellipse_vertices: int = 256
    density_grid_points: int = 512

    @field_validator("coverage")
    @classmethod
    def validate_coverage(cls, v):
        if not 0.0 < v < 1.0:
            raise ValueError("coverage must lie strictly between 0 and 1")
        return v

    @field_validator("ellipse_vertices")
    @classmethod
    def validate_vertices(cls, v):
        if v < 128:
            raise ValueError("ellipse boundary needs at least 128 vertices")
        return v


class OutputSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    directory: str = "results"
    table_format: str = "markdown"

    @field_validator("table_format")
    @classmethod
    def validate_format(cls, v):
        allowed = ["markdown", "csv", "json"]
        if v not in allowed:
            raise ValueError(f"Invalid table format: {v}")
        return v


class LabSettings(BaseModel):
    """Complete run configuration."""
    model_config = ConfigDict(frozen=True)

    system: Dict[str, Any] = Field(default_factory=dict)
    simulation: SimulationSettings = Field(default_factory=SimulationSettings)
    figure3: Figure3Settings = Field(default_factory=Figure3Settings)
    output: OutputSettings = Field(default_factory=OutputSettings)
    logging: Dict[str, Any] = Field(default_factory=lambda: {"level": "INFO"})


def _env_int(name: str) -> Optional[int]:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ModelValidationError(f"Environment variable {name} must be an integer, got {raw!r}")


def env_seed() -> Optional[int]:
    """Seed forced through LORDS_LAB_SEED, if any."""
    return _env_int(SEED_ENV)


def load_settings(config_path: Optional[Union[str, Path]] = None) -> LabSettings:
    """
    Load settings from YAML and apply environment overrides.

    Args:
        config_path: Optional path to a YAML file; falls back to LORDS_LAB_CONFIG
            and then to configs/config.yaml

    Returns:
        Validated, frozen LabSettings
    """
    load_dotenv()

    path = Path(config_path or os.environ.get(CONFIG_ENV) or DEFAULT_CONFIG_PATH)
    raw: Dict[str, Any] = {}
    if path.exists():
        with open(path, "r") as f:
            raw = yaml.safe_load(f) or {}
        logger.debug(f"Loaded configuration from {path}")
    elif config_path is not None:
        raise ModelValidationError(f"Config file not found: {path}")
    else:
        logger.warning(f"No config file at {path}; using built-in defaults")

    simulation = dict(raw.get("simulation") or {})
    seed = env_seed()
    if seed is not None:
        simulation["master_seed"] = seed
    workers = _env_int(WORKERS_ENV)
    if workers is not None:
        simulation["workers"] = workers
    raw["simulation"] = simulation

    log_level = os.environ.get(LOG_LEVEL_ENV)
    if log_level:
        raw["logging"] = {**(raw.get("logging") or {}), "level": log_level.upper()}

    try:
        return LabSettings(**raw)
    except ValidationError as e:
        raise ModelValidationError(f"Invalid configuration in {path}: {e}") from e
