"""Configuration management for qlab.

Handles loading run bounds, seeds and cache settings from environment variables.
"""

import logging
import os
from dataclasses import asdict, dataclass
from typing import Optional

logger = logging.getLogger(__name__)

EQUALITY_READINGS = ("verbatim", "symmetric")
DEFAULT_SEED = 20240601


@dataclass(frozen=True)
class Bounds:
    """Size and budget limits echoed into every report."""

    subset_bound: int
    sample_size: int
    enumeration_bound: int
    pstar_bound: int
    budget: int

    def as_dict(self) -> dict:
        """Return the bounds as a plain dict."""
        return asdict(self)


class Config:
    """Configuration manager for qlab runs."""

    def __init__(self):
        """Initialize configuration from environment variables."""
        self.log_level = os.environ.get("LOG_LEVEL", "INFO")
        self.subset_bound = self._parse_int("QLAB_SUBSET_BOUND", 6)
        self.sample_size = self._parse_int("QLAB_SAMPLE_SIZE", 1000)
        self.enumeration_bound = self._parse_int("QLAB_ENUMERATION_BOUND", 6)
        self.pstar_bound = self._parse_int("QLAB_PSTAR_BOUND", 10)
        self.budget = self._parse_int("QLAB_BUDGET", 1_000_000)
        self.seed = self._parse_int("QLAB_SEED", DEFAULT_SEED)
        self.jobs = self._parse_int("QLAB_JOBS", 1)
        self.cache_dir: Optional[str] = os.environ.get("QLAB_CACHE_DIR") or None
        self.equality = os.environ.get("QLAB_EQUALITY", "verbatim").strip().lower()

    def _parse_int(self, name: str, default: int) -> int:
        """Parse an integer environment variable.

        Args:
            name: Environment variable name.
            default: Value used when the variable is unset or invalid.

        Returns:
            int: Parsed value, or the default.
        """
        raw = os.environ.get(name, "").strip()
        if not raw:
            return default
        try:
            return int(raw.replace("_", ""))
        except ValueError:
            logger.error(f"Invalid integer for {name} (using {default}): {raw}")
            return default

    @property
    def bounds(self) -> Bounds:
        """Current size and budget limits."""
        return Bounds(
            subset_bound=self.subset_bound,
            sample_size=self.sample_size,
            enumeration_bound=self.enumeration_bound,
            pstar_bound=self.pstar_bound,
            budget=self.budget,
        )

    def as_dict(self) -> dict:
        """Return the effective configuration in a stable key order."""
        return {
            **self.bounds.as_dict(),
            "seed": self.seed,
            "jobs": self.jobs,
            "equality": self.equality,
            "cache_dir": self.cache_dir,
        }

    def validate(self) -> bool:
        """Validate that bounds and readings are usable.

        Returns:
            bool: True if configuration is valid, False otherwise.
        """
        is_valid = True

        for name, value in self.bounds.as_dict().items():
            if value <= 0:
                logger.error(f"Bound {name} must be positive, got {value}")
                is_valid = False

        if self.jobs <= 0:
            logger.error(f"Worker count must be positive, got {self.jobs}")
            is_valid = False

        if self.equality not in EQUALITY_READINGS:
            logger.error(
                f"Unknown equality reading: {self.equality}. "
                f"Supported: {', '.join(EQUALITY_READINGS)}"
            )
            is_valid = False

        if self.cache_dir and not os.path.isdir(self.cache_dir):
            logger.warning(f"Cache directory does not exist yet: {self.cache_dir}")

        return is_valid


# Global configuration instance
config = Config()
