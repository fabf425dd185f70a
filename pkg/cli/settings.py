import logging
import os
from dataclasses import dataclass

from dotenv import load_dotenv

from simulation.rng import DEFAULT_SHOT_BLOCK


logger = logging.getLogger(__name__)

LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


@dataclass(frozen=True)
class Settings:
    threads: int
    log_level: str
    shot_block: int


def _positive_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"{name}={raw!r} is not an integer; using {default}")
        return default
    if value < 1:
        logger.warning(f"{name}={value} must be at least 1; using {default}")
        return default
    return value


def load_settings() -> Settings:
    """Environment (and a local .env file) overrides; explicit variables win over .env."""
    load_dotenv(override=False)
    level = os.getenv("MATCHGATE_SIM_LOG_LEVEL", "WARNING").upper()
    if level not in LOG_LEVELS:
        logger.warning(f"MATCHGATE_SIM_LOG_LEVEL={level!r} is not a log level; using WARNING")
        level = "WARNING"
    return Settings(
        threads=_positive_int("MATCHGATE_SIM_THREADS", max(os.cpu_count() or 1, 1)),
        log_level=level,
        shot_block=_positive_int("MATCHGATE_SIM_SHOT_BLOCK", DEFAULT_SHOT_BLOCK),
    )
