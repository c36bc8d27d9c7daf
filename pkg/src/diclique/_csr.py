"""Shared validation/construction helpers for CSR adjacency arrays."""

from __future__ import annotations

import numpy as np


def check_csr(label: str, rows: int, cols: int, indptr: np.ndarray, indices: np.ndarray):
    """Validate an (indptr, indices) pair: shape, range, strictly sorted rows."""
    if indptr.shape != (rows + 1,):
        raise ValueError(f"{label} indptr must have length {rows + 1}")
    if indptr[0] != 0 or indptr[-1] != indices.size:
        raise ValueError(f"{label} indptr endpoints inconsistent with indices")
    if np.any(np.diff(indptr) < 0):
        raise ValueError(f"{label} indptr must be nondecreasing")
    if indices.size:
        if indices.min() < 0 or indices.max() >= cols:
            raise ValueError(f"{label} indices out of range [0, {cols})")
        # Strictly increasing within each row: the only nonpositive jumps in
        # the concatenated index array may occur at row boundaries.
        jumps = np.diff(indices) <= 0
        starts = np.zeros(indices.size, dtype=bool)
        interior = indptr[1:-1]
        starts[interior[interior < indices.size]] = True
        if np.any(jumps & ~starts[1:]):
            raise ValueError(f"{label} rows must be strictly sorted without duplicates")


def csr_from_pairs(label: str, rows: int, cols: int, pairs) -> tuple[np.ndarray, np.ndarray]:
    """Sorted CSR arrays from an (E, 2) array of (row, col) pairs; duplicates error."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if pairs.size:
        if pairs[:, 0].min() < 0 or pairs[:, 0].max() >= rows:
            raise ValueError(f"{label} row index out of range [0, {rows})")
        if pairs[:, 1].min() < 0 or pairs[:, 1].max() >= cols:
            raise ValueError(f"{label} column index out of range [0, {cols})")
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    pairs = pairs[order]
    if pairs.shape[0] > 1 and np.any(np.all(np.diff(pairs, axis=0) == 0, axis=1)):
        raise ValueError(f"duplicate {label} edge")
    indptr = np.zeros(rows + 1, dtype=np.int64)
    np.add.at(indptr, pairs[:, 0] + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, np.ascontiguousarray(pairs[:, 1])
