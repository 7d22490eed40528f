"""
Configuration loading utilities for nematic-colloids.

This module handles loading and validation of run configuration:
- JSON (.json) and YAML (.yaml, .yml) configuration files
- Environment variable fallbacks and overrides
- Validation through the Pydantic models

Environment variables:
- NEMATIC_COLLOIDS_CONFIG: configuration path used when none is given
- NEMATIC_COLLOIDS_OUTPUT_DIR: overrides output.directory
- NEMATIC_COLLOIDS_THREADS: overrides the sweep worker cap
- LOG_LEVEL: overrides logging.level
"""
import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .models import RunConfig


def _read(path: Path) -> Dict[str, Any]:
    text = path.read_text()
    if path.suffix.lower() in (".yaml", ".yml"):
        data = yaml.safe_load(text)
    else:
        data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError(f"configuration root in {path} must be a mapping")
    return data


def apply_env_overrides(data: Dict[str, Any]) -> Dict[str, Any]:
    """Apply the output directory, thread and log level overrides in place."""
    output_dir = os.getenv("NEMATIC_COLLOIDS_OUTPUT_DIR")
    if output_dir:
        data.setdefault("output", {})["directory"] = output_dir
    threads = os.getenv("NEMATIC_COLLOIDS_THREADS")
    if threads:
        try:
            data["threads"] = int(threads)
        except ValueError:
            raise ValueError(f"NEMATIC_COLLOIDS_THREADS must be an integer, got {threads!r}")
    log_level = os.getenv("LOG_LEVEL")
    if log_level:
        data.setdefault("logging", {})["level"] = log_level
    return data


def load_config(config_path: Optional[str] = None) -> RunConfig:
    """Load and validate a run configuration.

    Performs the following steps:
    1. Resolves the path (argument, then NEMATIC_COLLOIDS_CONFIG)
    2. Reads JSON or YAML, or starts from defaults when no path is set
    3. Applies environment overrides
    4. Validates the result as a RunConfig

    Args:
        config_path: Path to a .json, .yaml or .yml configuration file

    Returns:
        Validated RunConfig, for example from
        {
            "schema_version": 1,
            "bulk": {"a": 0.5, "b": 0.0, "c": 1.0},
            "species": [{"shape": "ball", "scale": 0.25}],
            "sweep": {"eps": [0.25, 0.1667, 0.125], "alpha": 1.2}
        }

    Raises:
        ValueError: If the file cannot be read or parsed, or any field
                    violates a modelling assumption
    """
    config_path = config_path or os.getenv("NEMATIC_COLLOIDS_CONFIG")
    try:
        if config_path:
            data = _read(Path(config_path))
        else:
            data = {"schema_version": 1}
        return RunConfig(**apply_env_overrides(data))
    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON in config file: {e}")
    except yaml.YAMLError as e:
        raise ValueError(f"Invalid YAML in config file: {e}")
    except Exception as e:
        raise ValueError(f"Failed to load config: {e}")
