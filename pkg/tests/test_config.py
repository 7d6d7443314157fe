"""Tests for configuration management."""

import os
import sys

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from config import DEFAULT_SEED, Config  # noqa: E402


def test_config_default_values():
    """Test default configuration values."""
    config = Config()
    assert config.subset_bound == 6
    assert config.sample_size == 1000
    assert config.enumeration_bound == 6
    assert config.pstar_bound == 10
    assert config.budget == 1_000_000
    assert config.seed == DEFAULT_SEED
    assert config.jobs == 1
    assert config.equality == "verbatim"
    assert config.validate() is True


def test_config_from_environment(mock_env_vars):
    """Test parsing bounds and readings from environment."""
    config = Config()
    assert config.log_level == "DEBUG"
    assert config.subset_bound == 4
    assert config.budget == 5000
    assert config.seed == 7
    assert config.equality == "symmetric"


def test_config_with_invalid_integer():
    """Test that an unparsable integer falls back to the default."""
    os.environ["QLAB_SAMPLE_SIZE"] = "many"
    try:
        config = Config()
        assert config.sample_size == 1000
    finally:
        os.environ.pop("QLAB_SAMPLE_SIZE", None)


def test_validate_rejects_non_positive_bound():
    """Test validation of bounds."""
    config = Config()
    config.budget = 0
    assert config.validate() is False


def test_validate_rejects_unknown_reading():
    """Test validation of the equality reading."""
    config = Config()
    config.equality = "loose"
    assert config.validate() is False


def test_validate_rejects_zero_jobs():
    config = Config()
    config.jobs = 0
    assert config.validate() is False


def test_as_dict_is_stable():
    """Test that the effective configuration echoes every bound."""
    data = Config().as_dict()
    assert list(data) == [
        "subset_bound",
        "sample_size",
        "enumeration_bound",
        "pstar_bound",
        "budget",
        "seed",
        "jobs",
        "equality",
        "cache_dir",
    ]
