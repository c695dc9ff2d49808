"""
Polycycle Configuration

Environment-backed settings plus fixed sampling constants.
"""

from dotenv import find_dotenv, load_dotenv
from pydantic_settings import BaseSettings

# Load environment variables before settings are read
load_dotenv(find_dotenv(usecwd=True))


class Settings(BaseSettings):
    """Runtime settings, read from the environment or a local .env file."""

    # Working precision for saddle commands when --precision-bits is not given
    PRECISION_BITS: int = 256

    # joblib workers for sample grids (1 = evaluate in-process)
    PARALLEL_JOBS: int = 1

    LOG_LEVEL: str = "INFO"

    class Config:
        env_file = ".env"
        env_prefix = "POLYCYCLE_"
        extra = "ignore"  # Ignore unrelated entries in .env


settings = Settings()

# Sampling of rational parameter points
DEFAULT_SEED = 20240601
DEFAULT_SAMPLES = 1000
SAMPLE_UPPER = 4  # random rationals are drawn from (0, SAMPLE_UPPER)
SAMPLE_MAX_DENOMINATOR = 64
MAX_REDRAWS = 50  # per sample point, before giving up on a pool
FACTOR_SOLVE_ATTEMPTS = 8

# Sampled parameter points checked against the direct solver for n = 4
FALLBACK_CHECK_POINTS = 12

# Agreement runs for n = 2, 3 use at least this many points
MIN_AGREEMENT_SAMPLES = 500
