"""formalcurves configuration - schema and management in one module."""

import json
import logging
import os
import re
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field

from formalcurves.artin import ArtinSpec
from formalcurves.errors import RingFlagError


logger = logging.getLogger(__name__)

RING_ENV_VAR = "FORMALCURVES_RING"


# =============================================================================
# Config Sections
# =============================================================================

class RingConfig(BaseModel):
    """Default Artin ring Q[e1..em]/m^(N+1)."""
    num_vars: int = Field(default=1, ge=0)
    trunc_order: int = Field(default=3, ge=1)

    def to_spec(self) -> ArtinSpec:
        return ArtinSpec(self.num_vars, self.trunc_order)


class CorollaBounds(BaseModel):
    """Size limits for exhaustive enumeration of multicorollas."""
    max_vertices: int = Field(default=3, ge=0)
    max_valence: int = Field(default=2, ge=0)
    max_genus: int = Field(default=2, ge=0)
    max_edges: int = Field(default=4, ge=0)


class CheckConfig(BaseModel):
    """Property suite settings."""
    seed: int = Field(default=0)
    trials: int = Field(default=1000, ge=1)
    suite_trials: dict[str, int] = Field(
        default_factory=lambda: {"annuli": 500, "fld": 500, "comm": 500},
        description="Per-suite trial counts overriding trials",
    )
    num_vars: int = Field(default=2, ge=1, description="Ring used by randomized suites")
    trunc_order: int = Field(default=3, ge=1)
    corolla: CorollaBounds = Field(default_factory=CorollaBounds)
    mutation_threshold: float = Field(default=0.95, ge=0.0, le=1.0)

    def spec(self) -> ArtinSpec:
        return ArtinSpec(self.num_vars, self.trunc_order)

    def trials_for(self, suite: str) -> int:
        return self.suite_trials.get(suite, self.trials)


class OutputConfig(BaseModel):
    """JSON output settings."""
    pretty: bool = Field(default=False)
    indent: int = Field(default=2, ge=0)


# =============================================================================
# Main Config
# =============================================================================

class Config(BaseModel):
    """Main formalcurves configuration."""
    ring: RingConfig = Field(default_factory=RingConfig)
    checks: CheckConfig = Field(default_factory=CheckConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    log_level: str = Field(default="WARNING")


# =============================================================================
# Ring flag
# =============================================================================

_RING_RE = re.compile(r"^\s*m\s*=\s*(\d+)\s*,\s*N\s*=\s*(\d+)\s*$")


def parse_ring(text: str) -> ArtinSpec:
    """Parse ``m=<int>,N=<int>``.

    Raises:
        RingFlagError: If the text is malformed or N < 1.
    """
    match = _RING_RE.match(text or "")
    if not match:
        raise RingFlagError(f"expected m=<int>,N=<int>, got {text!r}")
    m, n = int(match.group(1)), int(match.group(2))
    if n < 1:
        raise RingFlagError(f"truncation order must be positive, got N={n}")
    return ArtinSpec(m, n)


def resolve_ring(flag: Optional[str], config: Optional[Config] = None) -> ArtinSpec:
    """The ring from the flag, else the environment, else the config file."""
    if flag:
        return parse_ring(flag)
    env = os.environ.get(RING_ENV_VAR)
    if env:
        logger.debug(f"Using ring from {RING_ENV_VAR}={env}")
        return parse_ring(env)
    return (config or Config()).ring.to_spec()


# =============================================================================
# Config Loading/Saving
# =============================================================================

DEFAULT_CONFIG_PATHS = [
    Path("formalcurves.json"),
    Path("config.json"),
    Path.home() / ".config" / "formalcurves" / "config.json",
]


def find_config_file(explicit_path: Optional[str] = None) -> Optional[Path]:
    """Find the first existing config file."""
    if explicit_path:
        path = Path(explicit_path)
        if path.exists():
            return path

    for path in DEFAULT_CONFIG_PATHS:
        if path.exists():
            return path

    return None


def load_config(path: Optional[str] = None) -> Config:
    """Load configuration from file or return defaults.

    Args:
        path: Optional explicit path to config file.

    Returns:
        Config instance.
    """
    config_file = find_config_file(path)

    if config_file:
        logger.info(f"Loading config from {config_file}")
        try:
            with open(config_file, "r") as f:
                data = json.load(f)
            return Config.model_validate(data)
        except (json.JSONDecodeError, ValueError) as e:
            logger.warning(f"Failed to load config: {e}, using defaults")
            return Config()
    else:
        logger.info("No config file found, using defaults")
        return Config()


def save_config(config: Config, path: str) -> Path:
    """Save configuration to file.

    Returns:
        Path where config was saved.
    """
    save_path = Path(path)
    save_path.parent.mkdir(parents=True, exist_ok=True)

    with open(save_path, "w") as f:
        json.dump(config.model_dump(), f, indent=2)

    logger.info(f"Saved config to {save_path}")
    return save_path


def create_default_config() -> Config:
    return Config()
