"""
Homogenisation sweep over the configured ε list.
"""
from ..config.factory import (
    build_boundary,
    build_container,
    build_design,
    build_params,
    build_species_list,
    build_sweep_options,
)
from ..core.sweep import SweepResult, run_sweep, write_sweep_csv
from .base import ColloidTool


class SweepTools(ColloidTool):
    """Compares F_ε minimisers with the F₀ minimiser along a decreasing ε list."""

    def run(self) -> SweepResult:
        config = self.config
        return run_sweep(
            build_container(config),
            build_boundary(config.boundary),
            build_params(config),
            build_species_list(config, build_design(config)),
            build_sweep_options(config),
        )

    def sweep(self) -> str:
        """Run the sweep and write sweep.csv.

        Failed entries are recorded in the status column rather than raised.
        """
        try:
            result = self.run()
            path = write_sweep_csv(result, self._output_dir() / "sweep.csv")
            failed = sum(1 for row in result.rows if not row.ok)
            if failed:
                self.logger.warning("%d of %d sweep entries failed", failed, len(result.rows))
            return self._format_response(result, "sweep", path=str(path))
        except Exception as e:
            self._handle_error("run sweep", e)
