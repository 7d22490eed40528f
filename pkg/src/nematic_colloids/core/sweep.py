"""
The homogenisation sweep: F_ε minimisers compared against the F₀ minimiser.

For every ε of a decreasing list the sweep builds the lattice, warm-starts
F_ε (or F_{ε,γ}) from the F₀ minimiser on the same grid, extends the result
into the inclusions and records energy gaps, field errors, the constraint
residual ∫ f_hom(Q_ε), the surface energy and a flat-norm estimate.
Entries are independent and may run on a thread pool; rows always come
back in ε order.
"""
from __future__ import annotations

import csv
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .colloid import (
    SURFACE_ORDER,
    ColloidConfig,
    build_lattice,
    j_zero,
    minimize_f_eps,
    occupancy_mask,
)
from .fieldio import FLOAT_FORMAT, write_field
from .homogenize import SpeciesSpec
from .recovery import extend, flat_norm_estimate, h1_seminorm, l2_norm
from .solver import (
    BoundaryData,
    Box,
    EnergyReport,
    GridSpec,
    MaterialParams,
    MinimizeOptions,
    TensorField,
    minimize,
)

logger = logging.getLogger("nematic-colloids.sweep")

SWEEP_COLUMNS = (
    "eps",
    "gamma",
    "n_eps",
    "f_eps",
    "f_zero",
    "delta_f",
    "l2_error",
    "h1_error",
    "constraint_residual",
    "surface",
    "scaled_surface",
    "flat_norm",
    "iterations",
    "wall_time",
    "status",
)


@dataclass(frozen=True)
class SweepOptions:
    """Sweep settings; grids follow h <= ε^α / resolution_factor."""

    eps_list: Tuple[float, ...]
    alpha: float
    gamma: float = 0.0
    resolution_factor: float = 4.0
    max_resolution: Optional[int] = None
    solver: MinimizeOptions = field(default_factory=MinimizeOptions)
    init: str = "harmonic"
    order: int = SURFACE_ORDER
    flat_norm_tests: int = 16
    seed: int = 0
    threads: int = 1
    report_timing: bool = False
    dump_dir: Optional[Path] = None

    def __post_init__(self) -> None:
        eps = tuple(float(e) for e in self.eps_list)
        if not eps:
            raise ValueError("sweep needs at least one eps value")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError(f"eps list must be strictly decreasing, got {list(eps)}")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")
        object.__setattr__(self, "eps_list", eps)


@dataclass
class SweepRow:
    eps: float
    gamma: float
    n_eps: int = 0
    f_eps: float = float("nan")
    f_zero: float = float("nan")
    delta_f: float = float("nan")
    l2_error: float = float("nan")
    h1_error: float = float("nan")
    constraint_residual: float = float("nan")
    surface: float = float("nan")
    flat_norm: float = float("nan")
    iterations: int = 0
    wall_time: Optional[float] = None
    status: str = "ok"

    @property
    def scaled_surface(self) -> float:
        """ε^γ times the surface part of F_{ε,γ}, i.e. J_ε at the minimiser."""
        return float(self.eps**self.gamma * self.surface)

    @property
    def ok(self) -> bool:
        return not self.status.startswith("failed")

    def csv_values(self) -> List[str]:
        out = []
        for name in SWEEP_COLUMNS:
            value = getattr(self, name)
            if name == "wall_time":
                out.append("" if value is None else "%.3f" % value)
            elif isinstance(value, str):
                out.append(value)
            elif isinstance(value, int):
                out.append(str(value))
            else:
                out.append(FLOAT_FORMAT % value)
        return out


@dataclass
class SweepResult:
    rows: List[SweepRow]
    reference: Dict[Tuple[int, int, int], EnergyReport]

    @property
    def flat_norm_constant(self) -> float:
        """Smallest λ with estimate <= λ ε on every successful row."""
        ratios = [r.flat_norm / r.eps for r in self.rows if r.ok and math.isfinite(r.flat_norm)]
        return max(ratios) if ratios else float("nan")

    def column(self, name: str) -> List[float]:
        return [getattr(r, name) for r in self.rows]


def grid_for_eps(
    container: Box,
    eps: float,
    alpha: float,
    resolution_factor: float = 4.0,
    max_resolution: Optional[int] = None,
) -> GridSpec:
    """Grid with spacing h <= ε^α / resolution_factor, optionally capped."""
    return GridSpec.for_spacing(container, eps**alpha / resolution_factor, max_resolution)


def run_sweep(
    container: Box,
    boundary: BoundaryData,
    params: MaterialParams,
    species_list: Sequence[SpeciesSpec],
    options: SweepOptions,
) -> SweepResult:
    """Minimise F_ε along the ε list and compare with the F₀ minimiser."""
    grids = [
        grid_for_eps(container, eps, options.alpha, options.resolution_factor, options.max_resolution)
        for eps in options.eps_list
    ]
    references: Dict[Tuple[int, int, int], Tuple[TensorField, EnergyReport]] = {}
    for grid in grids:
        if grid.shape not in references:
            start = TensorField.from_boundary(grid, boundary, init=options.init)
            references[grid.shape] = minimize(
                start, params, species_list, options.solver, order=options.order
            )
            logger.info("F0 reference on %s: %.12e", grid.shape, references[grid.shape][1].total)

    def entry(index: int) -> SweepRow:
        eps = options.eps_list[index]
        q0, f0 = references[grids[index].shape]
        return _sweep_entry(index, eps, container, params, species_list, options, q0, f0)

    indices = range(len(options.eps_list))
    if options.threads == 1:
        rows = [entry(i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=options.threads) as pool:
            rows = list(pool.map(entry, indices))
    return SweepResult(rows=rows, reference={k: v[1] for k, v in references.items()})


def _sweep_entry(
    index: int,
    eps: float,
    container: Box,
    params: MaterialParams,
    species_list: Sequence[SpeciesSpec],
    options: SweepOptions,
    q0: TensorField,
    f0: EnergyReport,
) -> SweepRow:
    started = time.perf_counter()
    row = SweepRow(eps=eps, gamma=options.gamma, f_zero=f0.total)
    try:
        lattice = build_lattice(ColloidConfig(options.alpha, eps, options.gamma), species_list, container)
        masked = occupancy_mask(q0.grid, lattice)
        q_eps, report = minimize_f_eps(q0.copy(), lattice, params, options.solver, options.order, masked)
        extended = extend(q_eps, masked)
        diff = extended.values - q0.values
        l2 = l2_norm(extended, diff)
        row.n_eps = lattice.total_count
        row.f_eps = report.total
        row.surface = report.surface
        row.delta_f = abs(report.total - f0.total)
        row.l2_error = l2
        row.h1_error = float(np.sqrt(l2 * l2 + h1_seminorm(extended, diff) ** 2))
        row.constraint_residual = j_zero(extended, species_list, order=options.order)
        row.flat_norm = flat_norm_estimate(lattice, options.flat_norm_tests, options.seed)
        row.iterations = report.iterations
        if not report.converged:
            row.status = f"unconverged: {report.message}"
        if options.dump_dir is not None:
            write_field(extended, Path(options.dump_dir) / f"field_eps{index}.qtf")
    except (ValueError, RuntimeError) as e:
        logger.error("sweep entry eps=%s failed: %s", eps, e)
        row.status = f"failed: {e}"
    if options.report_timing:
        row.wall_time = time.perf_counter() - started
    return row


def write_sweep_csv(result: SweepResult, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in result.rows:
            writer.writerow(row.csv_values())
    return path
