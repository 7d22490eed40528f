"""
Inverse design of colloid species for a prescribed linear-plus-quadratic potential.
"""
import json
from typing import Any, Dict, Optional, Sequence

import numpy as np

from ..core.homogenize import DesignSpec, design_linear_term
from ..core.qtensor import sample_coefficients
from ..core.shapes import ASSEMBLY_LAYOUT, DEFAULT_ORDER
from .base import ColloidTool

CONTRACT_SAMPLES = 8


def parse_target(entries: Sequence[float]) -> np.ndarray:
    """P from 6 entries (xx, yy, zz, xy, xz, yz) or 9 row-major entries.

    Raises:
        ValueError: For any other entry count
    """
    values = [float(v) for v in entries]
    if len(values) == 9:
        return np.asarray(values).reshape(3, 3)
    if len(values) == 6:
        xx, yy, zz, xy, xz, yz = values
        return np.array([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]])
    raise ValueError(f"target needs 6 or 9 entries, got {len(values)}")


class DesignTools(ColloidTool):
    """Builds a DesignSpec and writes the run configuration that reproduces it."""

    def contract_variance(self, spec: DesignSpec, samples: int = CONTRACT_SAMPLES) -> float:
        """Spread of f_total - f_target over seeded random Q; zero when the contract holds."""
        rng = np.random.default_rng(self.config.seed)
        gaps = [spec.total_fhom(q) - spec.target_fhom(q) for q in sample_coefficients(rng, samples)]
        return float(np.var(gaps))

    def summary(self, spec: DesignSpec, path: Optional[str] = None) -> Dict[str, Any]:
        counts = [len(layout) for layout in ASSEMBLY_LAYOUT.values()]
        return {
            "target": spec.target.matrix.tolist(),
            "strength": spec.strength,
            "a": spec.a,
            "a_prime": spec.a_prime,
            "coefficients": [float(c) for c in spec.coefficients],
            "intensities": [-0.5 * float(c) for c in spec.coefficients],
            "component_counts": counts,
            "alpha_p": spec.alpha_p,
            "spherical_coefficient": spec.spherical_coefficient,
            "constant_offset": spec.constant_offset,
            "reconstruction_residual": spec.reconstruction_residual,
            "contract_variance": self.contract_variance(spec),
            "species_count": len(spec.components) + 1,
            "path": path,
        }

    def design(
        self,
        target: Sequence[float],
        strength: float,
        a_prime: float,
        a: Optional[float] = None,
        order: int = DEFAULT_ORDER,
    ) -> str:
        """Design species for (a′ - a) tr Q² + W tr(QP) + const and write design.json.

        Args:
            target: Symmetric P, 6 or 9 entries
            strength: Coupling W
            a_prime: Target quadratic coefficient a′
            a: Bulk coefficient a; defaults to bulk.a of the configuration
            order: Quadrature order for calibration

        Returns:
            Design report
        """
        try:
            bulk_a = self.config.bulk.a if a is None else float(a)
            spec = design_linear_term(parse_target(target), strength, bulk_a, a_prime, order)
            sections = spec.to_config()
            bulk = {**self.config.bulk.model_dump(), **sections["bulk"]}
            output = self._output_dir()
            path = output / "design.json"
            path.write_text(
                json.dumps({"schema_version": 1, "bulk": bulk, "design": sections["design"]}, indent=2) + "\n"
            )
            explicit = {"schema_version": 1, "bulk": bulk, "species": spec.species_config()}
            (output / "design_species.json").write_text(json.dumps(explicit, indent=2) + "\n")
            self.logger.info(
                "designed %d species for W=%s, a'=%s (offset %.6e)",
                len(spec.components) + 1, strength, a_prime, spec.constant_offset,
            )
            return self._format_response(self.summary(spec, str(path)), "design")
        except Exception as e:
            self._handle_error("design colloids", e)
