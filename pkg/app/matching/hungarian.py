import itertools
import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from app.errors import NonFiniteCostError, OracleSizeError
from app.matching.models import Assignment

BRUTE_FORCE_LIMIT = 8


def _as_cost_matrix(cost: np.ndarray | list[list[float]]) -> np.ndarray:
    matrix = np.asarray(cost, dtype=np.float64)
    if matrix.ndim == 1 and matrix.size == 0:
        matrix = matrix.reshape(0, 0)
    if matrix.ndim != 2:
        raise ValueError(f"cost matrix must be 2-D, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteCostError("cost matrix contains non-finite entries")
    return matrix


def hungarian(cost: np.ndarray | list[list[float]]) -> Assignment:
    """Minimum-cost injective assignment of rows to columns; min(G, N) pairs."""
    matrix = _as_cost_matrix(cost)
    rows, cols = matrix.shape
    if rows == 0 or cols == 0:
        return Assignment(pairs=(), total=0.0)

    # Pad to square with a constant above every real cost; padded pairs are dropped.
    size = max(rows, cols)
    pad_value = float(matrix.max()) + 1.0
    square = np.full((size, size), pad_value, dtype=np.float64)
    square[:rows, :cols] = matrix
    row_ind, col_ind = linear_sum_assignment(square)

    pairs = tuple(
        (int(r), int(c)) for r, c in zip(row_ind, col_ind) if r < rows and c < cols
    )
    total = math.fsum(matrix[r, c] for r, c in pairs)
    return Assignment(pairs=pairs, total=total)


def brute_force_assignment(cost: np.ndarray | list[list[float]]) -> Assignment:
    """Exhaustive search over injective assignments; ties go to the lexicographically first pair list."""
    matrix = _as_cost_matrix(cost)
    rows, cols = matrix.shape
    if min(rows, cols) > BRUTE_FORCE_LIMIT:
        raise OracleSizeError(f"brute force assignment supports min(G, N) <= {BRUTE_FORCE_LIMIT}")
    if rows == 0 or cols == 0:
        return Assignment(pairs=(), total=0.0)

    best_pairs: tuple[tuple[int, int], ...] | None = None
    best_total = math.inf
    if rows <= cols:
        candidates = (tuple(enumerate(perm)) for perm in itertools.permutations(range(cols), rows))
    else:
        candidates = (
            tuple(sorted((r, c) for c, r in enumerate(perm)))
            for perm in itertools.permutations(range(rows), cols)
        )
    for pairs in candidates:
        total = math.fsum(matrix[r, c] for r, c in pairs)
        if total < best_total or (total == best_total and best_pairs is not None and pairs < best_pairs):
            best_total = total
            best_pairs = pairs
    return Assignment(pairs=best_pairs or (), total=best_total)
