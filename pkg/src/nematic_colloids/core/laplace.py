"""
Discrete harmonic fill on structured grids.

Unknown nodes are filled by solving the 7-point Laplace equation with the
known nodes as Dirichlet data. Neighbours outside the grid are dropped from
the stencil. The sparse system is assembled once and solved for all value
components together.
"""
from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

logger = logging.getLogger("nematic-colloids.laplace")

RESIDUAL_TOLERANCE = 1e-10


def harmonic_fill(
    values: np.ndarray,
    unknown: np.ndarray,
    spacing: Sequence[float],
    tol: float = RESIDUAL_TOLERANCE,
) -> np.ndarray:
    """Return a copy of `values` with the `unknown` nodes harmonically filled.

    Args:
        values: Node values of shape (nx, ny, nz, C)
        unknown: Boolean mask of shape (nx, ny, nz)
        spacing: Grid spacing per axis
        tol: Bound on the max-norm residual, relative to the data scale

    Returns:
        Filled array; known nodes are returned unchanged

    Raises:
        RuntimeError: If the system is singular or the residual exceeds `tol`
    """
    values = np.asarray(values, dtype=float)
    unknown = np.asarray(unknown, dtype=bool)
    out = values.copy()
    count = int(np.count_nonzero(unknown))
    if count == 0:
        return out

    shape = unknown.shape
    index = -np.ones(shape, dtype=np.int64)
    index[unknown] = np.arange(count)
    coords = np.nonzero(unknown)
    rows = index[coords]

    row_parts, col_parts, data_parts = [], [], []
    diagonal = np.zeros(count)
    rhs = np.zeros((count, values.shape[-1]))
    for axis in range(3):
        coef = 1.0 / float(spacing[axis]) ** 2
        for step in (-1, 1):
            neighbour = list(coords)
            neighbour[axis] = coords[axis] + step
            valid = (neighbour[axis] >= 0) & (neighbour[axis] < shape[axis])
            diagonal[valid] += coef
            nb = tuple(c[valid] for c in neighbour)
            nb_unknown = unknown[nb]
            r = rows[valid]
            row_parts.append(r[nb_unknown])
            col_parts.append(index[nb][nb_unknown])
            data_parts.append(np.full(int(np.count_nonzero(nb_unknown)), -coef))
            known = ~nb_unknown
            np.add.at(rhs, r[known], coef * values[nb][known])

    row_parts.append(np.arange(count))
    col_parts.append(np.arange(count))
    data_parts.append(diagonal)
    matrix = sparse.coo_matrix(
        (np.concatenate(data_parts), (np.concatenate(row_parts), np.concatenate(col_parts))),
        shape=(count, count),
    ).tocsc()

    solution = spsolve(matrix, rhs)
    solution = np.asarray(solution).reshape(count, -1)
    if not np.all(np.isfinite(solution)):
        raise RuntimeError("harmonic fill is singular: a region has no Dirichlet data")
    residual = np.max(np.abs(matrix @ solution - rhs))
    scale = max(1.0, float(np.max(np.abs(rhs))))
    if residual > tol * scale:
        raise RuntimeError(f"harmonic fill residual {residual:.3e} exceeds tolerance")
    logger.debug("harmonic fill of %d nodes, residual %.3e", count, residual)
    out[unknown] = solution
    return out
