"""
Logging configuration for nematic-colloids.

This module handles logging setup:
- Console handler on stderr for warnings and errors
- Optional file handler at the configured level
- Handler replacement on the root logger

Environment variables:
- NEMATIC_COLLOIDS_LOG_FILE: log file path, overriding the configured one
- NEMATIC_COLLOIDS_DISABLE_FILE_LOG: "1", "true" or "yes" disables the file
"""
import logging
import os
import sys
import tempfile
from typing import List

from ..config.models import LoggingConfig


def setup_logging(config: LoggingConfig) -> logging.Logger:
    """Configure the root logger and return the "nematic-colloids" logger.

    Relative log file paths resolve against the working directory, falling
    back to the home or temp directory when it is not writable.

    Args:
        config: Logging configuration with level, format and optional file

    Returns:
        The package logger
    """
    disable_file_log = os.getenv("NEMATIC_COLLOIDS_DISABLE_FILE_LOG", "").lower() in {"1", "true", "yes"}
    log_file = os.getenv("NEMATIC_COLLOIDS_LOG_FILE", config.file or "")
    if log_file and not os.path.isabs(log_file):
        base_dir = os.getcwd() or "/"
        if base_dir == "/" or not os.access(base_dir, os.W_OK):
            home_dir = os.path.expanduser("~")
            base_dir = home_dir if home_dir and os.access(home_dir, os.W_OK) else tempfile.gettempdir()
        log_file = os.path.join(base_dir, log_file)

    level = getattr(logging, config.level.upper(), None)
    if not isinstance(level, int):
        raise ValueError(f"Invalid log level: {config.level}")

    handlers: List[logging.Handler] = []
    if log_file and not disable_file_log:
        try:
            file_handler = logging.FileHandler(log_file)
        except OSError as e:
            print(f"Warning: file logging disabled ({e})", file=sys.stderr)
        else:
            file_handler.setLevel(level)
            handlers.append(file_handler)

    # stdout carries reports only
    console_handler = logging.StreamHandler(stream=sys.stderr)
    console_handler.setLevel(max(level, logging.WARNING))
    handlers.append(console_handler)

    formatter = logging.Formatter(config.format)
    for handler in handlers:
        handler.setFormatter(formatter)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
    for handler in handlers:
        root_logger.addHandler(handler)

    return logging.getLogger("nematic-colloids")
