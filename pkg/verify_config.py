import os
from pathlib import Path
from unittest.mock import patch

from config import DEFAULT_GRID_N, DEFAULT_SEED, Config, is_valid_grid_n, validate_config
from errors import ERROR_USAGE, EpiError
from quadrature import resolve_grid_n


def _clean_env() -> dict[str, str]:
    return {key: value for key, value in os.environ.items() if not key.startswith("RENYI_EPI_")}


def test_defaults() -> None:
    with patch.dict(os.environ, _clean_env(), clear=True):
        config = Config.from_env()
    assert config.grid_n == DEFAULT_GRID_N
    assert config.output_dir == Path("output")
    assert config.output_format == "json"
    assert config.tolerance_power == 1e-6 and config.tolerance_nats == 1e-4 and config.tolerance_info == 1e-6
    assert config.workers == 1 and config.seed == DEFAULT_SEED
    assert config.verbose is True
    assert validate_config(config) == []
    print("SUCCESS: configuration defaults are valid.")


def test_environment_overrides() -> None:
    env = _clean_env()
    env.update(
        {
            "RENYI_EPI_GRID_N": "4096",
            "RENYI_EPI_OUTPUT_DIR": "reports",
            "RENYI_EPI_OUTPUT_FORMAT": " CSV ",
            "RENYI_EPI_WORKERS": "4",
            "RENYI_EPI_SEED": "oops",
            "RENYI_EPI_VERBOSE": "off",
        }
    )
    with patch.dict(os.environ, env, clear=True):
        config = Config.from_env()
    assert config.grid_n == 4096
    assert config.output_dir == Path("reports")
    assert config.output_format == "csv"
    assert config.workers == 4
    assert config.seed == DEFAULT_SEED
    assert config.verbose is False
    print("SUCCESS: environment variables override defaults and malformed numbers fall back.")


def test_validation_problems() -> None:
    env = _clean_env()
    env.update(
        {
            "RENYI_EPI_GRID_N": "1000",
            "RENYI_EPI_OUTPUT_FORMAT": "xml",
            "RENYI_EPI_TOLERANCE_NATS": "-1",
            "RENYI_EPI_WORKERS": "0",
        }
    )
    with patch.dict(os.environ, env, clear=True):
        problems = validate_config(Config.from_env())
    assert len(problems) == 4, problems
    assert problems[0].startswith("RENYI_EPI_GRID_N must be a power of two")
    assert any("RENYI_EPI_TOLERANCE_NATS" in problem for problem in problems)
    print("SUCCESS: invalid settings are reported by name.")


def test_grid_sizes() -> None:
    assert is_valid_grid_n(1024) and is_valid_grid_n(2**20)
    assert not is_valid_grid_n(512) and not is_valid_grid_n(3000) and not is_valid_grid_n(True)
    assert resolve_grid_n(2048) == 2048
    try:
        resolve_grid_n(1000)
    except EpiError as exc:
        assert exc.code == ERROR_USAGE
    else:
        raise AssertionError("Expected a usage error for grid_n=1000")
    with patch.dict(os.environ, {**_clean_env(), "RENYI_EPI_GRID_N": "8192"}, clear=True):
        assert resolve_grid_n() == 8192
    print("SUCCESS: grid sizes must be powers of two >= 1024.")


if __name__ == "__main__":
    test_defaults()
    test_environment_overrides()
    test_validation_problems()
    test_grid_sizes()
