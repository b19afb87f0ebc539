# test/unit/test_config.py

import pytest
from fractions import Fraction

from pydantic import ValidationError

from padicla.config import RunConfig, Settings, settings


# --- settings ---

def test_settings_defaults():
    """Test the library defaults and the testing environment."""
    assert settings.ENV == "testing"
    assert settings.DEFAULT_PRIME == 3
    assert settings.MAX_WITT_LENGTH == 4
    assert settings.ORACLE_BUDGET == 200000


def test_settings_from_environment(monkeypatch):
    """Test that environment variables override the defaults."""
    monkeypatch.setenv("DEFAULT_CAP", "40")
    assert Settings().DEFAULT_CAP == 40


# --- run configuration ---

def test_run_config_defaults():
    """Test a RunConfig built from settings alone."""
    config = RunConfig()
    assert config.prime == 3
    assert config.format == "json"
    assert config.lambda_grid[0] == "3"
    assert config.levels == [0, 1, 2, 3]
    assert config.r == Fraction(1, 2)


def test_grid_and_levels_normalized():
    """Test that radii are deduplicated in descending order and levels ascending."""
    config = RunConfig(lambda_grid="0, 1/2, 2, 2/4", levels="2,0,2")
    assert config.lambda_grid == ["2", "1/2", "0"]
    assert config.lambdas == [Fraction(2), Fraction(1, 2), Fraction(0)]
    assert config.levels == [0, 2]


@pytest.mark.parametrize(
    "values",
    [
        {"prime": 4},
        {"cap": 0},
        {"degree": -1},
        {"witt_length": 5},
        {"witt_r": "0"},
        {"levels": "-1,0"},
        {"lambda_grid": ""},
        {"lambda_grid": "one"},
        {"format": "xml"},
    ],
)
def test_invalid_values(values):
    """Test that each validator rejects its bad input."""
    with pytest.raises(ValidationError):
        RunConfig(**values)


# --- sources ---

def test_from_sources_precedence(config_file):
    """Test flags over file over defaults, with None flags ignored."""
    config = RunConfig.from_sources(str(config_file), {"cap": 6, "seed": None})
    assert config.prime == 2
    assert config.cap == 6
    assert config.lambda_grid == ["1", "0", "-1"]
    assert config.seed == 0


def test_from_sources_unknown_key(tmp_path):
    """Test that a misspelt key is refused."""
    path = tmp_path / "bad.cfg"
    path.write_text("primes = 3\n", encoding="utf-8")
    with pytest.raises(ValueError, match="primes"):
        RunConfig.from_sources(str(path))


# --- fingerprint ---

def test_fingerprint():
    """Test that the fingerprint ignores the output path and tracks the seed."""
    base = RunConfig(prime=5)
    assert len(base.fingerprint()) == 16
    assert base.fingerprint() == RunConfig(prime=5, out="runs/a").fingerprint()
    assert base.fingerprint() != RunConfig(prime=5, seed=1).fingerprint()
    assert "out" not in base.describe()
