"""
Minimisation of the homogenised energy on the configured grid.
"""
from typing import Dict, Tuple

from ..config.factory import (
    build_boundary,
    build_design,
    build_grid,
    build_minimize_options,
    build_params,
    build_species_list,
)
from ..core.fieldio import write_energy_trace, write_field, write_slice_csv
from ..core.solver import EnergyReport, TensorField, minimize
from .base import ColloidTool


class MinimizeTools(ColloidTool):
    """Runs F₀ minimisation and writes the field dump, a slice and the energy trace."""

    def solve(self) -> Tuple[TensorField, EnergyReport]:
        config = self.config
        grid = build_grid(config)
        start = TensorField.from_boundary(grid, build_boundary(config.boundary), init=config.solver.init)
        species = build_species_list(config, build_design(config))
        return minimize(
            start, build_params(config), species, build_minimize_options(config), order=config.solver.order
        )

    def minimize(self) -> str:
        """Minimise F₀ and write field.qtf, slice.csv and trace.csv.

        Returns:
            Energy report listing the files written
        """
        try:
            field, report = self.solve()
            output = self._output_dir()
            outputs: Dict[str, str] = {
                "field": str(write_field(field, output / "field.qtf")),
                "slice": str(write_slice_csv(field, output / "slice.csv")),
                "trace": str(write_energy_trace(report.trace, output / "trace.csv")),
            }
            self.logger.info("F0 = %.12e after %d iterations", report.total, report.iterations)
            return self._format_response(report.as_dict(), "energy", outputs=outputs)
        except Exception as e:
            self._handle_error("minimise F0", e)
