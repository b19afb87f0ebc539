# padicla/config.py

import hashlib
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings
from sympy import isprime

# Get the project root directory (parent of the padicla package)
PROJECT_ROOT = Path(__file__).parent.parent.absolute()
ENV_FILE = PROJECT_ROOT / '.env'

# Load .env file
load_dotenv(ENV_FILE)

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Manages library defaults loaded from environment variables."""
    # Application environment
    ENV: str = "development"  # development | testing | production
    LOG_LEVEL: Optional[str] = None  # Overrides the ENV-derived level

    # Ring and expansion defaults
    DEFAULT_PRIME: int = 3
    DEFAULT_CAP: int = 24  # X-adic precision of series elements
    DEFAULT_WITT_LENGTH: int = 2
    DEFAULT_DEGREE: int = 32  # Mahler degree bound N
    DEFAULT_LAMBDA_GRID: str = "3,2,1,0,-1,-2,-3,-4,-5,-6"
    DEFAULT_LEVELS: str = "0,1,2,3"
    DEFAULT_SEED: int = 0
    DEFAULT_WITT_R: str = "1/2"  # r in val_r; val_r(p) = 1/r

    # Desk-scale limits
    MAX_WITT_LENGTH: int = 4
    MAX_DIMENSION: int = 3
    ORACLE_BUDGET: int = 200000  # Oracle evaluations per function
    INVERT_CAP_DEFAULT: int = 24  # Cap used when inverting exact elements
    PADIC_PRECISION: int = 60  # Precision of group elements in Z_p

    # Solvers and certificates
    WITNESS_SLACK: int = 1
    SOLVE_MAX_STEPS: int = 2000
    SOLVE_EXTRA_DEPTH: int = 3  # Depth the monomial TS3 solve may add
    COBOUNDARY_TERMS: int = 8

    class Config:
        env_file = str(ENV_FILE)
        env_file_encoding = 'utf-8'


# Create a single instance to be imported elsewhere
settings = Settings()


def _split(value: str) -> List[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


class RunConfig(BaseModel):
    """Everything a run depends on; a run is a pure function of this model."""

    prime: int = Field(default_factory=lambda: settings.DEFAULT_PRIME, description="The prime p")
    cap: int = Field(default_factory=lambda: settings.DEFAULT_CAP, description="X-adic cap of series elements")
    witt_length: int = Field(default_factory=lambda: settings.DEFAULT_WITT_LENGTH, description="Witt length n")
    degree: int = Field(default_factory=lambda: settings.DEFAULT_DEGREE, description="Mahler degree bound N")
    lambda_grid: List[str] = Field(
        default_factory=lambda: _split(settings.DEFAULT_LAMBDA_GRID),
        description="Candidate radii, exact rationals",
    )
    levels: List[int] = Field(
        default_factory=lambda: [int(v) for v in _split(settings.DEFAULT_LEVELS)],
        description="Group levels searched in ascending order",
    )
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, description="Seed of every random draw")
    witt_r: str = Field(default_factory=lambda: settings.DEFAULT_WITT_R, description="r in val_r")
    samples: int = Field(default=6, description="Random samples per experiment cell")
    format: Literal["json", "csv", "text"] = Field(default="json", description="Output format")
    out: Optional[str] = Field(default=None, description="Output path prefix")

    @field_validator("prime")
    @classmethod
    def _check_prime(cls, v: int) -> int:
        if not isprime(v):
            raise ValueError(f"{v} is not prime")
        return v

    @field_validator("cap", "degree", "samples")
    @classmethod
    def _check_positive(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("must be positive")
        return v

    @field_validator("witt_length")
    @classmethod
    def _check_length(cls, v: int) -> int:
        if not 1 <= v <= settings.MAX_WITT_LENGTH:
            raise ValueError(f"Witt length must lie in 1..{settings.MAX_WITT_LENGTH}")
        return v

    @field_validator("lambda_grid", mode="before")
    @classmethod
    def _normalize_grid(cls, v: Any) -> List[str]:
        items = _split(v) if isinstance(v, str) else list(v)
        grid = sorted({Fraction(str(item)) for item in items}, reverse=True)
        if not grid:
            raise ValueError("lambda grid is empty")
        return [str(lam) for lam in grid]

    @field_validator("levels", mode="before")
    @classmethod
    def _normalize_levels(cls, v: Any) -> List[int]:
        items = _split(v) if isinstance(v, str) else list(v)
        levels = sorted({int(item) for item in items})
        if not levels or levels[0] < 0:
            raise ValueError("levels must be non-negative integers")
        return levels

    @field_validator("witt_r")
    @classmethod
    def _check_r(cls, v: str) -> str:
        r = Fraction(str(v))
        if r <= 0:
            raise ValueError("r must be positive")
        return str(r)

    @property
    def lambdas(self) -> List[Fraction]:
        return [Fraction(lam) for lam in self.lambda_grid]

    @property
    def r(self) -> Fraction:
        return Fraction(self.witt_r)

    @classmethod
    def from_sources(
        cls,
        path: Optional[str] = None,
        overrides: Optional[Mapping[str, Any]] = None,
    ) -> "RunConfig":
        """Merge settings defaults, a key-value config file and CLI flags.

        Flags win over the file, the file wins over the settings defaults.
        """
        from padicla.utils import read_config_file

        values: Dict[str, Any] = {}
        if path:
            values.update(read_config_file(path))
        for key, value in (overrides or {}).items():
            if value is not None:
                values[key] = value
        unknown = set(values) - set(cls.model_fields)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**values)

    def describe(self) -> Dict[str, Any]:
        """Canonical dict embedded in every report (output path excluded)."""
        return self.model_dump(mode="json", exclude={"out"})

    def fingerprint(self) -> str:
        payload = json.dumps(self.describe(), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]
