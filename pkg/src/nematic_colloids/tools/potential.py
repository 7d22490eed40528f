"""
Tabulation of the homogenised potential over Q samples read from CSV.
"""
import csv
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..config.factory import build_container, build_design, build_species_list
from ..core.fieldio import FLOAT_FORMAT
from ..core.homogenize import HomogenisedPotential
from ..core.shapes import DEFAULT_ORDER
from .base import ColloidTool

Q_COLUMNS = ("q1", "q2", "q3", "q4", "q5")
POINT_COLUMNS = ("x", "y", "z")
OUTPUT_COLUMNS = Q_COLUMNS + POINT_COLUMNS + ("fhom", "grad1", "grad2", "grad3", "grad4", "grad5")


def read_samples(path: Path, default_point: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Q coefficients (N, 5) and points (N, 3) from a CSV with header q1..q5[,x,y,z].

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: On missing columns or non-numeric entries
    """
    with Path(path).open(newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        missing = [c for c in Q_COLUMNS if c not in header]
        if missing:
            raise ValueError(f"input CSV lacks columns {missing}")
        has_points = all(c in header for c in POINT_COLUMNS)
        q_rows: List[List[float]] = []
        x_rows: List[List[float]] = []
        for line, record in enumerate(reader, start=2):
            try:
                q_rows.append([float(record[c]) for c in Q_COLUMNS])
                x_rows.append(
                    [float(record[c]) for c in POINT_COLUMNS] if has_points else list(default_point)
                )
            except (TypeError, ValueError) as e:
                raise ValueError(f"line {line}: non-numeric entry ({e})")
    return np.array(q_rows).reshape(-1, 5), np.array(x_rows).reshape(-1, 3)


class PotentialTools(ColloidTool):
    """f_hom and its Q-gradient for the configured species (and design, if any)."""

    def evaluate(
        self, q: np.ndarray, points: np.ndarray, order: int = DEFAULT_ORDER
    ) -> Tuple[np.ndarray, np.ndarray, int]:
        species = build_species_list(self.config, build_design(self.config))
        potential = HomogenisedPotential(species, order)
        return potential.value(q, points), potential.grad(q, points), len(species)

    def fhom(self, input_csv: str, output_csv: Optional[str] = None, order: int = DEFAULT_ORDER) -> str:
        """Write f_hom and grad1..grad5 for every row of `input_csv`.

        Raises:
            ValueError: "Unknown resource: ..." for a missing input file,
                        "Invalid input: ..." for a malformed one
        """
        try:
            centre = np.asarray(build_container(self.config).centre, dtype=float)
            q, points = read_samples(Path(input_csv), centre)
            values, grads, species_count = self.evaluate(q, points, order)
            path = Path(output_csv) if output_csv else self._output_dir() / "fhom.csv"
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", newline="") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(OUTPUT_COLUMNS)
                for qi, xi, fi, gi in zip(q, points, values, grads):
                    writer.writerow([FLOAT_FORMAT % v for v in (*qi, *xi, fi, *gi)])
            self.logger.info("tabulated f_hom on %d samples into %s", len(q), path)
            summary: Dict[str, Any] = {
                "rows": len(q),
                "species": species_count,
                "min": float(np.min(values)) if len(values) else float("nan"),
                "max": float(np.max(values)) if len(values) else float("nan"),
                "path": str(path),
            }
            return self._format_response(summary, "fhom")
        except Exception as e:
            self._handle_error("tabulate f_hom", e)
