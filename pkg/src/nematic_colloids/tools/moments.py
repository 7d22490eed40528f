"""
Surface moment tabulation for catalogue shapes.
"""
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..core.shapes import DEFAULT_ORDER, catalogue_names, lookup, reference_area, reference_moment
from .base import ColloidTool


class MomentTools(ColloidTool):
    """Quadrature area and ∫ ν⊗ν dσ against the analytic values."""

    def tabulate(
        self, names: Optional[Sequence[str]] = None, order: int = DEFAULT_ORDER
    ) -> List[Dict[str, Any]]:
        entries = []
        for name in names or catalogue_names():
            nodes = lookup(name).nodes(order)
            moment = nodes.moment
            analytic = reference_moment(name).matrix
            area = nodes.area
            analytic_area = reference_area(name)
            entries.append({
                "name": name,
                "area": area,
                "reference_area": analytic_area,
                "moment": moment.tolist(),
                "reference_moment": analytic.tolist(),
                "delta": float(max(np.max(np.abs(moment - analytic)), abs(area - analytic_area))),
            })
        return entries

    def moments(self, names: Optional[Sequence[str]] = None, order: int = DEFAULT_ORDER) -> str:
        """Report areas and moments of the named shapes (all catalogue shapes by default).

        Raises:
            ValueError: "Unknown resource: ..." for names outside the catalogue
        """
        try:
            entries = self.tabulate(names, order)
            self.logger.info("tabulated %d shapes at order %d", len(entries), order)
            return self._format_response(entries, "moments", order=order)
        except Exception as e:
            self._handle_error("tabulate moments", e)
