"""Projection of the bipartite demand/supply graph to the actor digraph.

Actor i points to actor j exactly when some attribute is demanded by i and
supplied by j.  Self-loops are dropped (every statistic downstream sums
over distinct nodes, so i -> i could never contribute) and multiplicity is
collapsed: however many attributes witness the pair, D carries one edge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ._csr import check_csr, csr_from_pairs
from .generator import BipartiteDigraph


@dataclass(frozen=True)
class Digraph:
    """Immutable digraph as mirrored CSR adjacency.

    ``out_indices[out_indptr[i]:out_indptr[i+1]]`` are the out-neighbors of
    node i in strictly increasing order; the ``in_`` arrays are the exact
    transpose and are kept so both degree directions are O(1).
    """

    n: int
    out_indptr: np.ndarray
    out_indices: np.ndarray
    in_indptr: np.ndarray
    in_indices: np.ndarray

    def __post_init__(self):
        check_csr("out_adj", self.n, self.n, self.out_indptr, self.out_indices)
        check_csr("in_adj", self.n, self.n, self.in_indptr, self.in_indices)
        if self.out_indices.size != self.in_indices.size:
            raise ValueError("out_adj and in_adj disagree on edge count")
        if self.out_indices.size:
            rows = np.repeat(np.arange(self.n), np.diff(self.out_indptr))
            if np.any(rows == self.out_indices):
                raise ValueError("self-loops are not allowed")

    @classmethod
    def from_out_adjacency(cls, n: int, out_indptr, out_indices) -> "Digraph":
        """Build from the out-direction only; the in-direction is derived."""
        out_indptr = np.ascontiguousarray(out_indptr, dtype=np.int64)
        out_indices = np.ascontiguousarray(out_indices, dtype=np.int64)
        sources = np.repeat(np.arange(n, dtype=np.int64), np.diff(out_indptr))
        in_indptr, in_indices = csr_from_pairs("in_adj", n, n, np.column_stack((out_indices, sources)))
        return cls(n, out_indptr, out_indices, in_indptr, in_indices)

    @classmethod
    def from_edges(cls, n: int, pairs) -> "Digraph":
        """Build from an (E, 2) array of (source, target) pairs."""
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if pairs.size and np.any(pairs[:, 0] == pairs[:, 1]):
            raise ValueError("self-loops are not allowed")
        out_indptr, out_indices = csr_from_pairs("out_adj", n, n, pairs)
        return cls.from_out_adjacency(n, out_indptr, out_indices)

    @property
    def edge_count(self) -> int:
        return int(self.out_indices.size)

    def out_neighbors(self, i: int) -> np.ndarray:
        if not 0 <= i < self.n:
            raise IndexError(f"node index {i} out of range for n={self.n}")
        return self.out_indices[self.out_indptr[i] : self.out_indptr[i + 1]]

    def in_neighbors(self, i: int) -> np.ndarray:
        if not 0 <= i < self.n:
            raise IndexError(f"node index {i} out of range for n={self.n}")
        return self.in_indices[self.in_indptr[i] : self.in_indptr[i + 1]]

    def out_degree(self, i: int) -> int:
        return int(self.out_neighbors(i).size)

    def in_degree(self, i: int) -> int:
        return int(self.in_neighbors(i).size)

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.out_indptr)

    def in_degrees(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    def out_csr(self) -> sparse.csr_matrix:
        """Adjacency as a 0/1 sparse matrix (rows = sources)."""
        data = np.ones(self.out_indices.size, dtype=np.int64)
        return sparse.csr_matrix(
            (data, self.out_indices, self.out_indptr), shape=(self.n, self.n)
        )

    def edge_array(self) -> np.ndarray:
        """All edges as an (E, 2) array sorted by (source, target)."""
        sources = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.out_indptr))
        return np.column_stack((sources, self.out_indices))


def project(H: BipartiteDigraph) -> Digraph:
    """Intersection digraph of a bipartite demand/supply graph.

    Sparse matrix product of the two incidence matrices accumulates, for
    every attribute, the demand-list x supply-list rectangle; the count
    matrix is then thresholded to 0/1, and the diagonal dropped.
    """
    counts = (H.demand_csr() @ H.supply_csr()).tocsr()
    counts.sort_indices()
    coo = counts.tocoo()
    keep = coo.row != coo.col
    sources = coo.row[keep].astype(np.int64, copy=False)
    targets = coo.col[keep].astype(np.int64, copy=False)
    out_indptr = np.zeros(H.n + 1, dtype=np.int64)
    np.add.at(out_indptr, sources + 1, 1)
    np.cumsum(out_indptr, out=out_indptr)
    return Digraph.from_out_adjacency(H.n, out_indptr, targets)
