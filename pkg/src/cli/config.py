import re
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

from dotenv import dotenv_values
from pydantic import Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings

_KEY_LINE = re.compile(r'^\s*(?:export\s+)?([A-Za-z_][A-Za-z0-9_]*)\s*=')


class ConfigError(ValueError):
    """A run configuration file is malformed; the message names the line."""


class RunConfig(BaseSettings):
    """Every setting of a run; the config file overrides defaults key by key."""

    # Problem
    problem: Literal["satellite", "nbody"] = Field(
        default="satellite",
        description="Satellite over the ring or the ring n-body problem"
    )
    n: int = Field(default=3, ge=2, le=64, description="Number of ring bodies")
    mu: float = Field(default=1.0, ge=0.0, description="Central mass")
    eps_coll: float = Field(default=1e-9, gt=0.0, description="Collision tolerance")

    # Frequency scan
    nu_min: float = Field(default=1e-3, gt=0.0, description="Lower end of the frequency scan")
    nu_max: Optional[float] = Field(
        default=None,
        gt=0.0,
        description="Upper end of the frequency scan (per-block bound when unset)"
    )
    nu_step: float = Field(default=1e-3, gt=0.0, description="Coarse frequency grid spacing")
    bisection_tol: float = Field(default=1e-10, gt=0.0, description="Crossing bracket width")
    zero_tol: float = Field(default=1e-10, gt=0.0, description="Zero band of the Morse index")
    harmonics: int = Field(default=5, ge=1, le=50, description="Highest harmonic in the resonance check")
    resonance_tol: float = Field(default=1e-6, gt=0.0, description="Singular-eigenvalue threshold")

    # Central-mass sweep
    mu_values: List[float] = Field(default_factory=list, description="Central masses of a sweep")
    mu_k_max: float = Field(default=50.0, gt=0.0, description="Upper end of the mu_k search")

    # Equilibrium search
    grid_angles: int = Field(default=360, ge=8, description="Angular seeds")
    grid_radii: int = Field(default=60, ge=2, description="Radial seeds")
    radius_min: float = Field(default=0.1, gt=0.0, description="Smallest seed radius")
    radius_max: float = Field(default=3.0, gt=0.0, description="Largest seed radius")
    dedup_tol: float = Field(default=1e-6, gt=0.0, description="Distance below which equilibria coincide")
    grad_tol: float = Field(default=1e-10, gt=0.0, description="Newton gradient tolerance")

    # Continuation
    truncation: Optional[int] = Field(
        default=None,
        ge=1,
        le=128,
        description="Fourier truncation L (16 satellite, 12 nbody when unset)"
    )
    epsilon: float = Field(default=1e-3, ge=1e-4, le=1e-2, description="Initial branch amplitude")
    corrector_tol: float = Field(default=1e-10, gt=0.0, description="Newton residual tolerance")
    corrector_max_iter: int = Field(default=25, ge=1, description="Newton iteration cap")
    h_init: float = Field(default=1e-2, gt=0.0, description="Initial arclength step")
    h_min: float = Field(default=1e-5, gt=0.0, description="Smallest arclength step")
    h_max: float = Field(default=0.1, gt=0.0, description="Largest arclength step")
    steps: int = Field(default=20, ge=1, description="Continuation steps")
    event: int = Field(default=0, ge=0, description="Index of the event to continue")

    # Verification
    closure_dt: float = Field(default=1e-4, gt=0.0, description="RK4 step of the closure check")
    closure_every: int = Field(default=5, ge=0, description="Closure check every k-th point (0 disables)")
    oracle_frequencies: int = Field(default=25, ge=1, description="Random frequencies in the block oracle")
    seed: int = Field(default=0, ge=0, description="Seed of every randomized check")

    # Output
    out_dir: str = Field(default="results", description="Directory for tables and branch files")

    @field_validator('mu_values', mode='before')
    @classmethod
    def split_mu_values(cls, v: Union[str, List[float]]) -> List[float]:
        """
        Accept a comma-separated list of central masses.

        Raises:
            ValueError: If a mass is negative
        """
        if isinstance(v, str):
            v = [item for item in (part.strip() for part in v.split(',')) if item]
        values = [float(item) for item in v]
        if any(m < 0 for m in values):
            raise ValueError('central masses must be non-negative')
        return sorted(values)

    @model_validator(mode='after')
    def check_ranges(self) -> 'RunConfig':
        if self.nu_max is not None and self.nu_min >= self.nu_max:
            raise ValueError(f'nu_min ({self.nu_min}) must be below nu_max ({self.nu_max})')
        if self.radius_min >= self.radius_max:
            raise ValueError(f'radius_min ({self.radius_min}) must be below radius_max ({self.radius_max})')
        if not self.h_min <= self.h_init <= self.h_max:
            raise ValueError(f'h_init ({self.h_init}) must lie in [h_min, h_max] = [{self.h_min}, {self.h_max}]')
        if self.mu_values and self.problem != 'nbody':
            raise ValueError('mu_values requires problem=nbody')
        return self

    def to_echo(self) -> Dict:
        """JSON-ready copy of every setting."""
        return self.model_dump(mode='json')

    class Config:
        """Settings come from the config file only, never from the environment."""
        extra = 'forbid'

    @classmethod
    def settings_customise_sources(cls, settings_cls, init_settings, env_settings, dotenv_settings, file_secret_settings):
        return (init_settings,)


def _key_lines(path: Path) -> Dict[str, int]:
    """
    Map each key to the 1-based line that sets it.

    Raises:
        ConfigError: On a line that is neither blank, a comment, nor key=value,
            or on a repeated key
    """
    lines: Dict[str, int] = {}
    for number, line in enumerate(path.read_text(encoding='utf-8').splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        match = _KEY_LINE.match(line)
        if not match:
            raise ConfigError(f"line {number}: expected key=value, got {stripped!r}")
        key = match.group(1).lower()
        if key in lines:
            raise ConfigError(f"line {number}: {key} already set on line {lines[key]}")
        lines[key] = number
    return lines


def _anchor(message: str, lines: Dict[str, int]) -> int:
    """Line of the first key a cross-field message names, 0 when none is in the file."""
    for key, number in sorted(lines.items(), key=lambda item: item[1]):
        if re.search(rf'\b{key}\b', message):
            return number
    return 0


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """
    Read a key=value config file into a validated RunConfig.

    Empty values leave the default in place.

    Raises:
        ConfigError: For a missing file, unknown keys or invalid values,
            naming the offending line
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    lines = _key_lines(path)
    raw = {key.lower(): value for key, value in dotenv_values(path).items()}
    values = {key: value for key, value in raw.items() if value not in (None, '')}
    fields = set(RunConfig.model_fields)
    for key in values:
        if key not in fields:
            raise ConfigError(f"line {lines.get(key, 0)}: unknown key {key!r}")
    try:
        return RunConfig(**values)
    except ValidationError as e:
        first = e.errors()[0]
        loc = [str(part) for part in first.get('loc', ()) if isinstance(part, str)]
        message = first.get('msg', str(e))
        if loc:
            raise ConfigError(f"line {lines.get(loc[0], 0)}: {loc[0]}: {message}") from e
        raise ConfigError(f"line {_anchor(message, lines)}: {message}") from e
