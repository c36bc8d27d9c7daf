"""Random bipartite demand/supply digraph between actors and attributes.

Each actor i and attribute k are joined independently of all other pairs:
the pair's bivariate indicator (demand i->k, supply k->i) has marginals

    p_ik = min(1, gamma * x_i * z_k)      demand
    q_ik = min(1, gamma * y_i * z_k)      supply

and a joint success probability r_ik supplied by a reciprocity kernel.
Any admissible joint law must satisfy

    max(p + q - 1, 0) <= r <= min(p, q)

and generation aborts on the first violating pair rather than clamping,
because silently projecting r into the valid interval would change the
model being simulated.

Sampling consumes exactly one uniform per pair, taken at word ``i*m + k``
of the pair stream, so the realized graph depends only on the seed and the
inputs, never on block sizes or iteration schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import sparse

from ._csr import check_csr, csr_from_pairs
from .rng import TAG_BIPARTITE, TAG_BIPARTITE_SKIP, StreamRoot, positional_uniforms
from .weights import WeightSample

# Slack for the admissibility check: both kernels satisfy the bounds exactly
# in real arithmetic, so only rounding noise should ever land outside them.
_KERNEL_TOL = 1e-12

# Target number of pair variates processed per block.
_BLOCK_PAIRS = 1 << 21


@dataclass(frozen=True)
class ModelParams:
    """Model size and link intensity.

    ``alpha = gamma * m`` and ``beta = m / n`` are the derived quantities
    the limit formulas are phrased in; they are exposed read-only.
    """

    n: int
    m: int
    gamma: float

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"n must be an integer >= 1, got {self.n!r}")
        if not isinstance(self.m, int) or self.m < 1:
            raise ValueError(f"m must be an integer >= 1, got {self.m!r}")
        g = float(self.gamma)
        if not math.isfinite(g) or g <= 0.0:
            raise ValueError(f"gamma must be a finite positive real, got {self.gamma!r}")
        object.__setattr__(self, "gamma", g)

    @property
    def alpha(self) -> float:
        return self.gamma * self.m

    @property
    def beta(self) -> float:
        return self.m / self.n


@dataclass(frozen=True)
class IndependentProduct:
    """Demand and supply indicators independent given the weights: r = p*q."""

    def joint(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        return p * q


@dataclass(frozen=True)
class EpsilonMin:
    """Maximal-reciprocity kernel scaled by epsilon: r = eps * min(p, q)."""

    epsilon: float

    def __post_init__(self):
        e = float(self.epsilon)
        if not 0.0 < e <= 1.0:
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon!r}")
        object.__setattr__(self, "epsilon", e)

    def joint(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        # min(p, q) equals min(gamma*x*z, gamma*y*z, 1) since both marginals
        # share the same clamp.
        return self.epsilon * np.minimum(p, q)


ReciprocityKernel = Union[IndependentProduct, EpsilonMin]


class KernelViolationError(ValueError):
    """A pair's joint probability left the admissible interval."""

    def __init__(self, p: float, q: float, r: float, actor: int | None = None,
                 attribute: int | None = None):
        self.triple = (p, q, r)
        self.actor = actor
        self.attribute = attribute
        where = "" if actor is None else f" at pair (actor={actor}, attribute={attribute})"
        super().__init__(
            f"joint probability r={r!r} outside [max(p+q-1,0), min(p,q)] "
            f"for p={p!r}, q={q!r}{where}"
        )


def link_probabilities(x, y, z, gamma: float):
    """Marginal demand/supply probabilities ``(min(1, g*x*z), min(1, g*y*z))``."""
    p = np.minimum(1.0, gamma * np.multiply(x, z))
    q = np.minimum(1.0, gamma * np.multiply(y, z))
    return p, q


def validate_kernel(p, q, r) -> None:
    """Raise :class:`KernelViolationError` unless max(p+q-1,0) <= r <= min(p,q)."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    lower = np.maximum(p + q - 1.0, 0.0)
    bad = (r < lower - _KERNEL_TOL) | (r > np.minimum(p, q) + _KERNEL_TOL)
    if bad.any():
        idx = np.unravel_index(int(np.argmax(bad)), bad.shape) if bad.shape else ()
        raise KernelViolationError(float(p[idx]), float(q[idx]), float(r[idx]))


@dataclass(frozen=True)
class BipartiteDigraph:
    """Demand/supply relation stored as CSR adjacency in both directions.

    ``demand`` rows are actors (entries: attribute ids the actor demands);
    ``supply`` rows are attributes (entries: actor ids the attribute links
    to, i.e. the actors that supply it).  Entries are strictly increasing
    within each row.
    """

    n: int
    m: int
    demand_indptr: np.ndarray
    demand_indices: np.ndarray
    supply_indptr: np.ndarray
    supply_indices: np.ndarray

    def __post_init__(self):
        check_csr("demand", self.n, self.m, self.demand_indptr, self.demand_indices)
        check_csr("supply", self.m, self.n, self.supply_indptr, self.supply_indices)

    @classmethod
    def from_edges(cls, n: int, m: int, demand_pairs, supply_pairs) -> "BipartiteDigraph":
        """Build from edge lists: ``demand_pairs`` rows are ``(actor, attribute)``,
        ``supply_pairs`` rows are ``(attribute, actor)``.  Duplicates are an error."""
        d_ptr, d_idx = csr_from_pairs("demand", n, m, demand_pairs)
        s_ptr, s_idx = csr_from_pairs("supply", m, n, supply_pairs)
        return cls(n, m, d_ptr, d_idx, s_ptr, s_idx)

    def demanded_by(self, i: int) -> np.ndarray:
        """Attribute ids demanded by actor ``i`` (sorted, read-only view)."""
        if not 0 <= i < self.n:
            raise IndexError(f"actor index {i} out of range for n={self.n}")
        return self.demand_indices[self.demand_indptr[i] : self.demand_indptr[i + 1]]

    def suppliers_of(self, k: int) -> np.ndarray:
        """Actor ids supplying attribute ``k`` (sorted, read-only view)."""
        if not 0 <= k < self.m:
            raise IndexError(f"attribute index {k} out of range for m={self.m}")
        return self.supply_indices[self.supply_indptr[k] : self.supply_indptr[k + 1]]

    @property
    def demand_edge_count(self) -> int:
        return int(self.demand_indices.size)

    @property
    def supply_edge_count(self) -> int:
        return int(self.supply_indices.size)

    def demand_csr(self) -> sparse.csr_matrix:
        """Actor-by-attribute 0/1 matrix of demand links."""
        data = np.ones(self.demand_indices.size, dtype=np.int64)
        return sparse.csr_matrix(
            (data, self.demand_indices, self.demand_indptr), shape=(self.n, self.m)
        )

    def supply_csr(self) -> sparse.csr_matrix:
        """Attribute-by-actor 0/1 matrix of supply links."""
        data = np.ones(self.supply_indices.size, dtype=np.int64)
        return sparse.csr_matrix(
            (data, self.supply_indices, self.supply_indptr), shape=(self.m, self.n)
        )


def sample_bipartite(
    params: ModelParams,
    weights: WeightSample,
    kernel: ReciprocityKernel,
    root: StreamRoot,
    *,
    method: str = "pairwise",
) -> BipartiteDigraph:
    """Draw the bipartite demand/supply digraph.

    Parameters
    ----------
    params : ModelParams
        Sizes and link intensity; must match the weight sample's shape.
    weights : WeightSample
        Realized actor pairs (x, y) and attribute weights z.
    kernel : ReciprocityKernel
        Joint law of each pair's (demand, supply) indicator.
    root : StreamRoot
        Stream handle for this replicate.
    method : str
        ``"pairwise"`` (default) walks every actor/attribute pair and is
        valid for any weights.  ``"skip"`` requires constant weights and
        jumps between non-empty pairs geometrically; it draws from a
        different tagged stream, so it agrees with the pairwise method in
        distribution, not sample by sample.

    Notes
    -----
    The pairwise method reads the uniform for pair ``(i, k)`` at word
    ``i*m + k`` of the pair stream; results are invariant to the internal
    block size.
    """
    n, m = params.n, params.m
    if weights.n != n or weights.m != m:
        raise ValueError(
            f"weight sample shaped (n={weights.n}, m={weights.m}) does not match "
            f"params (n={n}, m={m})"
        )
    if method == "pairwise":
        return _sample_pairwise(params, weights, kernel, root)
    if method == "skip":
        return _sample_skip(params, weights, kernel, root)
    raise ValueError(f"unknown sampling method {method!r}")


def _sample_pairwise(params, weights, kernel, root) -> BipartiteDigraph:
    n, m = params.n, params.m
    gamma = params.gamma
    z = weights.z
    bg = root.child(TAG_BIPARTITE).bit_generator()

    block = max(1, _BLOCK_PAIRS // m)
    demand_counts = np.zeros(n, dtype=np.int64)
    demand_cols: list[np.ndarray] = []
    supply_pairs_k: list[np.ndarray] = []
    supply_pairs_i: list[np.ndarray] = []

    for i0 in range(0, n, block):
        i1 = min(n, i0 + block)
        x_blk = weights.x[i0:i1, None]
        y_blk = weights.y[i0:i1, None]
        p = np.minimum(1.0, gamma * (x_blk * z[None, :]))
        q = np.minimum(1.0, gamma * (y_blk * z[None, :]))
        r = kernel.joint(p, q)
        _validate_block(p, q, r, i0)

        u = positional_uniforms(bg, i0 * m, (i1 - i0) * m).reshape(i1 - i0, m)
        demand = u < p
        supply = (u < r) | ((u >= p) & (u < p + q - r))

        demand_counts[i0:i1] = demand.sum(axis=1)
        di, dk = np.nonzero(demand)
        demand_cols.append(dk.astype(np.int64, copy=False))
        si, sk = np.nonzero(supply)
        supply_pairs_k.append(sk.astype(np.int64, copy=False))
        supply_pairs_i.append(si.astype(np.int64, copy=False) + i0)

    demand_indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(demand_counts, out=demand_indptr[1:])
    demand_indices = (
        np.concatenate(demand_cols) if demand_cols else np.empty(0, dtype=np.int64)
    )

    sk = np.concatenate(supply_pairs_k) if supply_pairs_k else np.empty(0, dtype=np.int64)
    si = np.concatenate(supply_pairs_i) if supply_pairs_i else np.empty(0, dtype=np.int64)
    supply_indptr, supply_indices = _supply_csr_from_hits(m, sk, si)

    return BipartiteDigraph(n, m, demand_indptr, demand_indices, supply_indptr, supply_indices)


def _validate_block(p, q, r, row_offset: int) -> None:
    lower = np.maximum(p + q - 1.0, 0.0)
    bad = (r < lower - _KERNEL_TOL) | (r > np.minimum(p, q) + _KERNEL_TOL)
    if bad.any():
        bi, bk = np.unravel_index(int(np.argmax(bad)), bad.shape)
        raise KernelViolationError(
            float(p[bi, bk]), float(q[bi, bk]), float(r[bi, bk]),
            actor=row_offset + int(bi), attribute=int(bk),
        )


def _supply_csr_from_hits(m, ks, actors) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((actors, ks))
    ks = ks[order]
    actors = actors[order]
    indptr = np.zeros(m + 1, dtype=np.int64)
    np.add.at(indptr, ks + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, np.ascontiguousarray(actors)


def _sample_skip(params, weights, kernel, root) -> BipartiteDigraph:
    n, m = params.n, params.m
    for name, arr in (("x", weights.x), ("y", weights.y), ("z", weights.z)):
        if arr.size and np.ptp(arr) != 0.0:
            raise ValueError(
                f"skip sampling needs constant weights; {name} varies across entries"
            )
    p = float(min(1.0, params.gamma * weights.x[0] * weights.z[0]))
    q = float(min(1.0, params.gamma * weights.y[0] * weights.z[0]))
    r = float(np.asarray(kernel.joint(np.float64(p), np.float64(q))))
    validate_kernel(p, q, r)

    total = n * m
    hit_prob = p + q - r  # P(pair carries at least one link)
    rng = root.child(TAG_BIPARTITE_SKIP).generator()

    positions: list[np.ndarray] = []
    if hit_prob >= 1.0:
        positions.append(np.arange(total, dtype=np.int64))
    elif hit_prob > 0.0:
        pos = -1
        # Geometric jumps between hits; expected draws = total * hit_prob.
        chunk = max(1024, int(total * hit_prob * 1.1) + 16)
        while pos < total:
            gaps = rng.geometric(hit_prob, size=chunk)
            cum = pos + np.cumsum(gaps)
            take = cum[cum < total]
            if take.size:
                positions.append(take)
            if cum[-1] >= total:
                break
            pos = int(cum[-1])
            chunk = 1024
    hits = np.concatenate(positions) if positions else np.empty(0, dtype=np.int64)

    # Classify each hit among the three link-bearing outcomes.
    v = rng.random(hits.size)
    both = v < (r / hit_prob) if hit_prob else v < 0
    demand_only = (~both) & (v < (p / hit_prob)) if hit_prob else both
    demand_mask = both | demand_only
    supply_mask = ~demand_only

    actor = hits // m
    attr = hits % m

    d_actor, d_attr = actor[demand_mask], attr[demand_mask]
    demand_indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(demand_indptr, d_actor + 1, 1)
    np.cumsum(demand_indptr, out=demand_indptr)
    # Hits arrive in increasing linear position, so within each actor the
    # attribute ids are already sorted.
    supply_indptr, supply_indices = _supply_csr_from_hits(m, attr[supply_mask], actor[supply_mask])
    return BipartiteDigraph(n, m, demand_indptr, d_attr, supply_indptr, supply_indices)
