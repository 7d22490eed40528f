"""
Toolkit wiring for nematic-colloids.

This module assembles everything a subcommand needs:
- Configuration loading and validation
- Command-line overrides (threads, output directory, seed, log level)
- Logging setup
- Tool construction

The command line builds one ColloidToolkit per invocation and dispatches
to the tool methods; library users can do the same.
"""
import os
from pathlib import Path
from typing import Any, Dict, Optional

from .config.loader import load_config
from .config.models import RunConfig
from .core.logging import setup_logging
from .tools.base import UNKNOWN_RESOURCE
from .tools.design import DesignTools
from .tools.minimize import MinimizeTools
from .tools.moments import MomentTools
from .tools.potential import PotentialTools
from .tools.selftest import SelftestTools
from .tools.sweep import SweepTools


def apply_overrides(config: RunConfig, **overrides: Any) -> RunConfig:
    """Return `config` with the given top-level overrides, validated again.

    Keys with value None are ignored; `output_dir` and `log_level` map to
    output.directory and logging.level.
    """
    data: Dict[str, Any] = config.model_dump()
    if overrides.get("threads") is not None:
        data["threads"] = overrides["threads"]
    if overrides.get("seed") is not None:
        data["seed"] = overrides["seed"]
    if overrides.get("output_dir") is not None:
        data["output"]["directory"] = str(overrides["output_dir"])
    if overrides.get("log_level") is not None:
        data["logging"]["level"] = overrides["log_level"]
    return RunConfig.model_validate(data)


class ColloidToolkit:
    """Configuration, logging and tools for one nematic-colloids run."""

    def __init__(
        self,
        config_path: Optional[str] = None,
        threads: Optional[int] = None,
        output_dir: Optional[str] = None,
        seed: Optional[int] = None,
        log_level: Optional[str] = None,
    ):
        """Initialize the toolkit.

        Args:
            config_path: Path to a JSON or YAML configuration file; falls
                         back to NEMATIC_COLLOIDS_CONFIG, then defaults
            threads: Sweep worker cap override
            output_dir: Output directory override
            seed: Seed override
            log_level: Log level override

        Raises:
            ValueError: "Unknown resource: ..." if the configuration file
                        does not exist; other ValueErrors for invalid input
        """
        path = config_path or os.getenv("NEMATIC_COLLOIDS_CONFIG")
        if path and not Path(path).is_file():
            raise ValueError(f"{UNKNOWN_RESOURCE}configuration file {path} not found")
        self.config = apply_overrides(
            load_config(path),
            threads=threads,
            output_dir=output_dir,
            seed=seed,
            log_level=log_level,
        )
        self.logger = setup_logging(self.config.logging)

        self.moment_tools = MomentTools(self.config)
        self.design_tools = DesignTools(self.config)
        self.potential_tools = PotentialTools(self.config)
        self.minimize_tools = MinimizeTools(self.config)
        self.sweep_tools = SweepTools(self.config)
        self.selftest_tools = SelftestTools(self.config)
        self.logger.debug("toolkit ready (seed %d, %d threads)", self.config.seed, self.config.threads)

