"""
Base classes and utilities for nematic-colloids tools.

This module provides the foundation for all subcommand tools, including:
- Base tool class with access to the validated run configuration
- Output directory handling
- Report formatting through the templates
- Error categorisation

All tool implementations inherit from the ColloidTool base class so that
every subcommand logs and fails the same way.
"""
import json
import logging
from pathlib import Path
from typing import Any, NoReturn, Optional

from ..config.models import RunConfig
from ..formatting import ColloidTemplates

INVALID_INPUT = "Invalid input: "
UNKNOWN_RESOURCE = "Unknown resource: "


class ColloidTool:
    """Base class for nematic-colloids tools.

    Provides the configuration, a per-tool logger, the output directory and
    standardised error handling.
    """

    def __init__(self, config: RunConfig):
        """Initialize the tool.

        Args:
            config: Validated run configuration
        """
        self.config = config
        self.logger = logging.getLogger(f"nematic-colloids.{self.__class__.__name__.lower()}")

    def _output_dir(self) -> Path:
        path = Path(self.config.output.directory)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def _format_response(self, data: Any, resource_type: Optional[str] = None, **extra: Any) -> str:
        """Format result data into report text using templates.

        Args:
            data: Result data of the tool
            resource_type: Template selector: 'moments', 'design', 'energy',
                           'fhom', 'sweep' or 'selftest'

        Returns:
            Report text
        """
        if resource_type == "moments":
            return ColloidTemplates.moments(data, extra["order"])
        if resource_type == "design":
            return ColloidTemplates.design(data)
        if resource_type == "energy":
            return ColloidTemplates.energy(data, extra.get("outputs", {}))
        if resource_type == "fhom":
            return ColloidTemplates.fhom(data)
        if resource_type == "sweep":
            return ColloidTemplates.sweep(data.rows, data.flat_norm_constant, extra["path"])
        if resource_type == "selftest":
            return ColloidTemplates.selftest(data, extra["seed"])
        return json.dumps(data, indent=2, default=str)

    def _handle_error(self, operation: str, error: Exception) -> NoReturn:
        """Log a failed operation and re-raise it categorised.

        Args:
            operation: Description of the operation that failed (e.g. "run sweep")
            error: The exception that occurred

        Raises:
            ValueError: "Unknown resource: ..." for unknown names and missing
                        files, "Invalid input: ..." for other invalid input
            RuntimeError: For numerical or unexpected failures
        """
        error_msg = str(error)
        self.logger.error(f"Failed to {operation}: {error_msg}")

        for prefix in (UNKNOWN_RESOURCE, INVALID_INPUT):
            if error_msg.startswith(prefix):
                raise ValueError(error_msg) from error
        if isinstance(error, FileNotFoundError) or (
            isinstance(error, ValueError) and "unknown" in error_msg.lower()
        ):
            raise ValueError(f"{UNKNOWN_RESOURCE}{error_msg}") from error
        if isinstance(error, (ValueError, KeyError)):
            raise ValueError(f"{INVALID_INPUT}{error_msg}") from error

        raise RuntimeError(f"Failed to {operation}: {error_msg}") from error
