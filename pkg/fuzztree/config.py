"""
Runtime settings and logging setup
Environment overrides: FUZZTREE_JOBS, FUZZTREE_CUTS, FUZZTREE_DB, FUZZTREE_LOG_LEVEL
"""
import logging
import os
import sys
from pathlib import Path
from pydantic import BaseModel, Field, ValidationError, field_validator

from .errors import ConfigError

DEFAULT_DB_PATH = Path("data") / "fuzztree.db"
LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"

ENV_VARS = {
    'jobs': 'FUZZTREE_JOBS',
    'n_cuts': 'FUZZTREE_CUTS',
    'db_path': 'FUZZTREE_DB',
    'log_level': 'FUZZTREE_LOG_LEVEL',
}


class Settings(BaseModel):
    """Process-wide defaults; CLI flags override them"""
    # worker threads share the GIL; only numpy-heavy engines gain from more than one
    jobs: int = Field(1, ge=1, description="Worker threads for the endpoint fan-out")
    n_cuts: int = Field(10, ge=1, description="Number of alpha-cuts")
    brute_force_cap: int = Field(20, ge=1, le=26, description="Max basic events for cut-set enumeration")
    discrete_oracle_cap: int = Field(10**6, ge=1, description="Max support combinations for the discrete oracle")
    discrete_oracle_max_events: int = Field(12, ge=1)
    db_path: Path = DEFAULT_DB_PATH
    log_level: str = "WARNING"

    @field_validator('log_level')
    @classmethod
    def validate_log_level(cls, v):
        level = v.upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"unknown log level: {v}")
        return level

    def resolve_jobs(self, tasks: int) -> int:
        """Worker count for a fan-out of `tasks` independent evaluations"""
        return max(1, min(self.jobs, tasks))


def load_settings(environ=None) -> Settings:
    """Build Settings from the environment"""
    environ = os.environ if environ is None else environ
    values = {}
    for field, var in ENV_VARS.items():
        raw = environ.get(var)
        if raw is not None and raw.strip():
            values[field] = raw.strip()
    try:
        return Settings(**values)
    except ValidationError as e:
        names = ', '.join(ENV_VARS[str(err['loc'][0])] for err in e.errors() if err['loc'])
        raise ConfigError(f"invalid environment setting ({names}): {e.errors()[0]['msg']}") from e


def configure_logging(level="WARNING", stream=None):
    """Install one stderr handler on the package logger"""
    logger = logging.getLogger("fuzztree")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False
    return logger
