from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
import os

DEFAULT_GRID_N = 16384
MIN_GRID_N = 1024
DEFAULT_SEED = 20240601
DEFAULT_MAX_CONVOLUTION_POINTS = 2**21
OUTPUT_FORMATS = ("json", "csv")


def _get_bool(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in ("1", "true", "yes", "y", "on")


def _get_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def _get_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return float(raw)
    except ValueError:
        return default


def is_valid_grid_n(value: int) -> bool:
    return isinstance(value, int) and value >= MIN_GRID_N and value & (value - 1) == 0


@dataclass
class Config:
    grid_n: int
    output_dir: Path
    output_format: str
    tolerance_power: float
    tolerance_nats: float
    tolerance_info: float
    workers: int
    seed: int
    max_convolution_points: int
    verbose: bool

    @classmethod
    def from_env(cls) -> "Config":
        return cls(
            grid_n=_get_int("RENYI_EPI_GRID_N", DEFAULT_GRID_N),
            output_dir=Path(os.getenv("RENYI_EPI_OUTPUT_DIR", "output").strip() or "output"),
            output_format=os.getenv("RENYI_EPI_OUTPUT_FORMAT", "json").strip().lower() or "json",
            tolerance_power=_get_float("RENYI_EPI_TOLERANCE_POWER", 1e-6),
            tolerance_nats=_get_float("RENYI_EPI_TOLERANCE_NATS", 1e-4),
            tolerance_info=_get_float("RENYI_EPI_TOLERANCE_INFO", 1e-6),
            workers=_get_int("RENYI_EPI_WORKERS", 1),
            seed=_get_int("RENYI_EPI_SEED", DEFAULT_SEED),
            max_convolution_points=_get_int("RENYI_EPI_MAX_CONVOLUTION_POINTS", DEFAULT_MAX_CONVOLUTION_POINTS),
            verbose=_get_bool("RENYI_EPI_VERBOSE", True),
        )


def validate_config(config: Config) -> list[str]:
    problems = []
    if not is_valid_grid_n(config.grid_n):
        problems.append(f"RENYI_EPI_GRID_N must be a power of two >= {MIN_GRID_N} (got {config.grid_n})")
    if config.output_format not in OUTPUT_FORMATS:
        problems.append(f"RENYI_EPI_OUTPUT_FORMAT must be one of {', '.join(OUTPUT_FORMATS)}")
    for name, value in (
        ("RENYI_EPI_TOLERANCE_POWER", config.tolerance_power),
        ("RENYI_EPI_TOLERANCE_NATS", config.tolerance_nats),
        ("RENYI_EPI_TOLERANCE_INFO", config.tolerance_info),
    ):
        if not value >= 0:
            problems.append(f"{name} must be >= 0")
    if config.workers < 1:
        problems.append("RENYI_EPI_WORKERS must be >= 1")
    if config.max_convolution_points < MIN_GRID_N:
        problems.append(f"RENYI_EPI_MAX_CONVOLUTION_POINTS must be >= {MIN_GRID_N}")
    return problems
