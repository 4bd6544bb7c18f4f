"""
GF(2) linear algebra on numpy uint8 arrays.

Shared by the marking-equivalence decision procedure and the fatgraph
orientation / cycle-space computations.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np


def to_gf2(matrix) -> np.ndarray:
    return np.array(matrix, dtype=np.uint8) % 2


@dataclass(frozen=True)
class RowReduceResult:
    matrix: np.ndarray
    rank: int
    pivots: Tuple[int, ...]


def gf2_row_reduce(matrix) -> RowReduceResult:
    """Reduced row echelon form over GF(2)."""
    mat = to_gf2(matrix).copy()
    m, n = mat.shape
    pivots: List[int] = []
    row = 0
    for col in range(n):
        pivot = None
        for r in range(row, m):
            if mat[r, col] == 1:
                pivot = r
                break
        if pivot is None:
            continue
        if pivot != row:
            mat[[row, pivot]] = mat[[pivot, row]]
        for r in range(m):
            if r != row and mat[r, col] == 1:
                mat[r, :] ^= mat[row, :]
        pivots.append(col)
        row += 1
        if row == m:
            break
    return RowReduceResult(mat, row, tuple(pivots))


def gf2_rank(matrix) -> int:
    """Rank over GF(2)."""
    return gf2_row_reduce(matrix).rank


def gf2_in_span(rows, vector) -> bool:
    """True iff vector is a GF(2) combination of the given rows."""
    vec = to_gf2(vector).reshape(1, -1)
    if not np.any(vec):
        return True
    mat = to_gf2(rows)
    if mat.size == 0:
        return False
    mat = mat.reshape(-1, vec.shape[1])
    return gf2_rank(mat) == gf2_rank(np.vstack([mat, vec]))


def gf2_reduce(rows, vector) -> np.ndarray:
    """
    Canonical representative of vector modulo the row space of rows.

    Pivot coordinates of the reduced echelon form are cleared, so two vectors
    in the same coset reduce to the same array.
    """
    vec = to_gf2(vector).copy()
    mat = to_gf2(rows)
    if mat.size == 0:
        return vec
    reduced = gf2_row_reduce(mat.reshape(-1, vec.shape[0]))
    for i, col in enumerate(reduced.pivots):
        if vec[col]:
            vec ^= reduced.matrix[i]
    return vec


def gf2_nullspace(matrix) -> np.ndarray:
    """Basis (as rows) of the right nullspace {x : matrix @ x = 0}."""
    mat = to_gf2(matrix)
    n = mat.shape[1]
    reduced = gf2_row_reduce(mat)
    free = [c for c in range(n) if c not in reduced.pivots]
    basis = []
    for f in free:
        x = np.zeros(n, dtype=np.uint8)
        x[f] = 1
        for i, col in enumerate(reduced.pivots):
            if reduced.matrix[i, f]:
                x[col] = 1
        basis.append(x)
    if not basis:
        return np.zeros((0, n), dtype=np.uint8)
    return np.array(basis, dtype=np.uint8)
