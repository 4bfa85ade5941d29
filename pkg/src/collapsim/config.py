from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator

ExperimentName = Literal[
    "grw1d",
    "flash-chain",
    "dilation",
    "covariance",
    "microcausality",
    "bell-noncompare",
    "factorization",
    "amplification",
    "fock-macro",
]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridConfig(StrictModel):
    n_points: int = 1024
    box: float = Field(200.0, gt=0)

    @field_validator("n_points")
    def validate_n_points(cls, v: int) -> int:
        """Grids are FFT lattices: a power of two, at least 8 points."""
        if v < 8 or v & (v - 1):
            raise ValueError(f"n_points must be a power of two >= 8, got {v}")
        return v


class PhysicsConfig(StrictModel):
    tau: float = Field(30.0, gt=0)
    alpha: float = Field(1 / 32, gt=0)
    mass: float = Field(1.0, gt=0)


class FlashConfig(StrictModel):
    n_flashes: int = Field(5, ge=1)
    packet_width: float = Field(4.0, gt=0)
    rapidities: list[float] = [0.0, 0.5, 1.0]
    boost: float = 0.5
    chi_max: float = Field(4.0, gt=0)
    chi_step: float = Field(0.01, gt=0)


class MicrocausalityConfig(StrictModel):
    separations: list[float] = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0]
    alpha: float = Field(1.0, gt=0)

    @field_validator("separations")
    def validate_separations(cls, v: list[float]) -> list[float]:
        if not v or any(s <= 0 for s in v):
            raise ValueError("separations must be a non-empty list of positive values")
        return v


class MultiparticleConfig(StrictModel):
    n_points: int = 128
    spacing: float = Field(0.5, gt=0)
    separation: float = Field(24.0, gt=0)
    packet_width: float = Field(0.5, gt=0)
    alpha: float = Field(1 / 36, gt=0)
    boost: float = 0.5
    couplings: list[float] = [0.0, 0.1, 0.2, 0.4, 0.8]
    interaction_points: int = 16
    interaction_alpha: float = Field(1.0, gt=0)
    dt: float = Field(1.0, gt=0)


class AmplificationConfig(StrictModel):
    particle_counts: list[int] = [1, 2, 4, 8]
    n_points: int = 64
    spacing: float = Field(0.5, gt=0)
    separation: float = Field(16.0, gt=0)
    packet_width: float = Field(0.5, gt=0)
    alpha: float = Field(0.25, gt=0)
    horizon: float = Field(10.0, gt=0)

    @field_validator("particle_counts")
    def validate_counts(cls, v: list[int]) -> list[int]:
        if not v or any(n < 1 for n in v):
            raise ValueError("particle_counts must be a non-empty list of positive integers")
        return v


class FockConfig(StrictModel):
    n_modes: int = Field(32, gt=0, le=64)
    n_fermions: int = Field(4, gt=0)
    d: int = Field(11, gt=0)
    r: int = Field(4, gt=0)
    epsilon: int = Field(1, gt=0)
    alpha: float = Field(1.0, gt=0)


class ExperimentConfig(StrictModel):
    experiment: ExperimentName
    description: str | None = None
    trials: int = Field(200, ge=1)
    seed: int = Field(0, ge=0)
    output_path: str = "output/"

    grid: GridConfig = GridConfig()
    physics: PhysicsConfig = PhysicsConfig()
    flash: FlashConfig = FlashConfig()
    microcausality: MicrocausalityConfig = MicrocausalityConfig()
    multiparticle: MultiparticleConfig = MultiparticleConfig()
    amplification: AmplificationConfig = AmplificationConfig()
    fock: FockConfig = FockConfig()

    @field_validator("output_path")
    def create_output_path(cls, v):
        Path(v).mkdir(parents=True, exist_ok=True)
        return v


def load_config(config_path: str) -> dict:
    """Load a YAML config file as a plain mapping (validated by build_config)"""
    with open(config_path, "r") as f:
        config_dict = yaml.safe_load(f) or {}
    if not isinstance(config_dict, dict):
        raise ValueError(f"Config file {config_path} must hold a mapping")
    return config_dict


def apply_overrides(config_dict: dict, overrides: list[str]) -> dict:
    """Apply dotted `section.key=value` overrides; values are parsed as YAML scalars"""
    for override in overrides:
        key, sep, raw = override.partition("=")
        if not sep or not key:
            raise ValueError(f"Override must look like key=value, got {override!r}")
        target = config_dict
        *parents, leaf = key.strip().split(".")
        for part in parents:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise ValueError(f"Override {key!r} descends into a non-section value")
        target[leaf] = yaml.safe_load(raw)
    return config_dict


def build_config(
    experiment: str,
    config_path: str | None = None,
    overrides: list[str] | None = None,
) -> ExperimentConfig:
    """Merge file values, CLI overrides and the experiment name, then validate"""
    config_dict = load_config(config_path) if config_path else {}
    config_dict["experiment"] = experiment
    apply_overrides(config_dict, overrides or [])
    return ExperimentConfig(**config_dict)
