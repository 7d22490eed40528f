"""
Tests for logging setup.
"""
import logging
import os
from unittest.mock import patch

import pytest

from nematic_colloids.config.models import LoggingConfig
from nematic_colloids.core.logging import setup_logging


@pytest.fixture
def restore_root_logger():
    """Fixture restoring the root logger handlers and level after a test."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield root
    for handler in root.handlers[:]:
        root.removeHandler(handler)
        handler.close()
    for handler in handlers:
        root.addHandler(handler)
    root.setLevel(level)


def test_console_handler_only_warns(clean_env, restore_root_logger):
    """Test the console handler writes to stderr at WARNING or above."""
    logger = setup_logging(LoggingConfig(level="DEBUG"))
    assert logger.name == "nematic-colloids"
    assert restore_root_logger.level == logging.DEBUG
    (console,) = restore_root_logger.handlers
    assert isinstance(console, logging.StreamHandler)
    assert console.level == logging.WARNING


def test_file_handler_uses_configured_level(clean_env, restore_root_logger, tmp_path):
    """Test a log file receives records at the configured level."""
    log_file = tmp_path / "run.log"
    setup_logging(LoggingConfig(level="INFO", file=str(log_file)))
    logging.getLogger("nematic-colloids.test").info("hello from the test")
    for handler in restore_root_logger.handlers:
        handler.flush()
    assert "hello from the test" in log_file.read_text()


def test_env_log_file_and_disable(clean_env, restore_root_logger, tmp_path):
    """Test NEMATIC_COLLOIDS_LOG_FILE and NEMATIC_COLLOIDS_DISABLE_FILE_LOG."""
    env = {"NEMATIC_COLLOIDS_LOG_FILE": str(tmp_path / "env.log")}
    with patch.dict(os.environ, env):
        setup_logging(LoggingConfig())
    assert len(restore_root_logger.handlers) == 2
    env["NEMATIC_COLLOIDS_DISABLE_FILE_LOG"] = "true"
    with patch.dict(os.environ, env):
        setup_logging(LoggingConfig())
    assert len(restore_root_logger.handlers) == 1


def test_invalid_level(clean_env, restore_root_logger):
    """Test unknown level names are rejected."""
    with pytest.raises(ValueError, match="Invalid log level"):
        setup_logging(LoggingConfig(level="LOUD"))
