"""Monte Carlo experiment engine.

Runs replicated generate -> project -> measure pipelines over a grid of
model parameter cells, pooling exact integer motif counts across
replicates.  Coefficients are aggregated ratio-of-sums (pooled numerator
over pooled denominator), which mirrors the population conditional
probability the limits describe; per-replicate ratios are kept for
diagnostics and feed a jackknife standard error.

Replicate (cell ci, rep ri) draws all of its randomness from the stream
root (master_seed, experiment tag, ci, ri), so results are a pure function
of the ExperimentSpec and identical under any thread count or schedule.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from .generator import (
    EpsilonMin,
    IndependentProduct,
    KernelViolationError,
    ModelParams,
    ReciprocityKernel,
    sample_bipartite,
)
from .motifs import LocalMotifCounts, MotifReport, dicc_local, motif_report
from .projection import Digraph, project
from .rng import MAX_SEED, TAG_EXPERIMENT, StreamRoot
from .theory import (
    LimitDegreeParams,
    LimitPmf,
    MomentSet,
    dicc_limit,
    dicc_local_limit_ego,
    limit_degree_pmf,
    trcc_limit_eps_min,
)
from .weights import Constant, NodeWeightConfig, WeightDist, draw_weight_sample

MEASUREMENTS = ("dicc", "trcc", "local_dicc", "out_pmf", "in_pmf")
EGO_POLICIES = ("max_in_degree", "node0")


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of one experiment sweep."""

    cells: tuple[ModelParams, ...]
    node_config: NodeWeightConfig
    z_dist: WeightDist
    kernel: ReciprocityKernel
    replicates: int
    master_seed: int
    measurements: tuple[str, ...] = ("dicc", "trcc")
    sampling_method: str = "pairwise"

    def __post_init__(self):
        if not self.cells:
            raise ValueError("experiment needs at least one parameter cell")
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates!r}")
        if not 0 <= self.master_seed <= MAX_SEED:
            raise ValueError("master_seed must fit in 64 bits")
        if not self.measurements:
            raise ValueError("at least one measurement must be requested")
        unknown = set(self.measurements) - set(MEASUREMENTS)
        if unknown:
            raise ValueError(f"unknown measurements: {sorted(unknown)}")
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "measurements", tuple(self.measurements))


@dataclass(frozen=True)
class RatioEstimate:
    """Pooled ratio of integer counts with per-replicate diagnostics."""

    numerator: int
    denominator: int
    per_replicate: tuple[float | None, ...]
    std_error: float | None

    @property
    def value(self) -> float | None:
        if self.denominator == 0:
            return None
        return self.numerator / self.denominator

    @classmethod
    def from_counts(cls, counts: list[tuple[int, int]]) -> "RatioEstimate":
        num = sum(c[0] for c in counts)
        den = sum(c[1] for c in counts)
        per_rep = tuple((c[0] / c[1]) if c[1] else None for c in counts)
        return cls(num, den, per_rep, _jackknife_se(counts, num, den))


def _jackknife_se(counts: list[tuple[int, int]], num: int, den: int) -> float | None:
    """Leave-one-replicate-out spread of the pooled ratio."""
    r = len(counts)
    if r < 2 or den == 0:
        return None
    loo = []
    for n_j, d_j in counts:
        rest = den - d_j
        if rest == 0:
            return None
        loo.append((num - n_j) / rest)
    mean = sum(loo) / r
    var = (r - 1) / r * sum((v - mean) ** 2 for v in loo)
    return math.sqrt(var)


@dataclass(frozen=True)
class EmpiricalPmf:
    """Degree histogram kept as exact integer counts.

    The float view ``probs`` is derived on demand; the counts themselves
    are the ground truth, so the pmf sums to one exactly as a rational.
    """

    counts: np.ndarray
    total: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or (counts.size and counts.min() < 0):
            raise ValueError("counts must be a one-dimensional nonnegative array")
        if int(counts.sum()) != self.total:
            raise ValueError("total does not match the histogram")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_degrees(cls, degrees: np.ndarray) -> "EmpiricalPmf":
        degrees = np.asarray(degrees, dtype=np.int64)
        counts = np.bincount(degrees) if degrees.size else np.zeros(1, dtype=np.int64)
        return cls(counts=counts.astype(np.int64), total=int(degrees.size))

    @property
    def probs(self) -> np.ndarray:
        if self.total == 0:
            return np.zeros(self.counts.size)
        return self.counts / self.total

    def merge(self, other: "EmpiricalPmf") -> "EmpiricalPmf":
        size = max(self.counts.size, other.counts.size)
        counts = np.zeros(size, dtype=np.int64)
        counts[: self.counts.size] += self.counts
        counts[: other.counts.size] += other.counts
        return EmpiricalPmf(counts=counts, total=self.total + other.total)


def empirical_degree_pmf(D: Digraph, direction: str) -> EmpiricalPmf:
    """Normalized degree histogram of one graph; direction is 'out' or 'in'."""
    if direction == "out":
        return EmpiricalPmf.from_degrees(D.out_degrees())
    if direction == "in":
        return EmpiricalPmf.from_degrees(D.in_degrees())
    raise ValueError(f"direction must be 'out' or 'in', got {direction!r}")


def _as_probs_and_tail(p) -> tuple[np.ndarray, float]:
    if isinstance(p, EmpiricalPmf):
        return p.probs, 0.0
    if isinstance(p, LimitPmf):
        return p.probs, p.tail_mass
    arr = np.asarray(p, dtype=np.float64)
    return arr, max(0.0, 1.0 - float(arr.sum()))


def total_variation(p, q) -> float:
    """Total variation distance between two truncated pmfs.

    Accepts :class:`EmpiricalPmf`, :class:`LimitPmf`, or plain arrays; for
    arrays any missing mass counts as tail.  Distance is half the L1 gap
    over the shared support plus half the gap of the tail masses.
    """
    p_arr, p_tail = _as_probs_and_tail(p)
    q_arr, q_tail = _as_probs_and_tail(q)
    if (p_arr.size and p_arr.min() < 0.0) or (q_arr.size and q_arr.min() < 0.0):
        raise ValueError("pmf entries must be nonnegative")
    size = max(p_arr.size, q_arr.size)
    pp = np.zeros(size)
    qq = np.zeros(size)
    pp[: p_arr.size] = p_arr
    qq[: q_arr.size] = q_arr
    return 0.5 * float(np.abs(pp - qq).sum()) + 0.5 * abs(p_tail - q_tail)


@dataclass(frozen=True)
class LocalEstimate:
    """Pooled local-coefficient estimate under one ego policy."""

    policy: str
    estimate: RatioEstimate
    egos: tuple[int, ...]


@dataclass(frozen=True)
class CellResult:
    """Everything measured for one parameter cell, or its failure note."""

    params: ModelParams
    replicates: int
    failure: str | None = None
    dicc: RatioEstimate | None = None
    trcc: RatioEstimate | None = None
    local_dicc: tuple[LocalEstimate, ...] = ()
    out_pmf: EmpiricalPmf | None = None
    in_pmf: EmpiricalPmf | None = None
    dicc_reference: float | None = None
    trcc_reference: float | None = None
    local_reference: float | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None


@dataclass(frozen=True)
class ExperimentResult:
    spec: ExperimentSpec
    moments: MomentSet
    cells: tuple[CellResult, ...]

    @property
    def all_ok(self) -> bool:
        return all(cell.ok for cell in self.cells)


@dataclass
class _ReplicateStats:
    report: MotifReport | None = None
    local: dict[str, LocalMotifCounts] = field(default_factory=dict)
    out_hist: EmpiricalPmf | None = None
    in_hist: EmpiricalPmf | None = None


def _pick_ego(D: Digraph, policy: str) -> int:
    if policy == "node0":
        return 0
    if policy == "max_in_degree":
        # Deterministic tie-break: smallest index among maxima.
        return int(np.argmax(D.in_degrees()))
    raise ValueError(f"unknown ego policy {policy!r}")


def _measure(D: Digraph, measurements: tuple[str, ...]) -> _ReplicateStats:
    stats = _ReplicateStats()
    if "dicc" in measurements or "trcc" in measurements:
        stats.report = motif_report(D)
    if "local_dicc" in measurements:
        for policy in EGO_POLICIES:
            stats.local[policy] = dicc_local(D, _pick_ego(D, policy))
    if "out_pmf" in measurements:
        stats.out_hist = empirical_degree_pmf(D, "out")
    if "in_pmf" in measurements:
        stats.in_hist = empirical_degree_pmf(D, "in")
    return stats


def _run_replicate(spec: ExperimentSpec, cell_index: int, rep_index: int) -> _ReplicateStats:
    params = spec.cells[cell_index]
    root = StreamRoot(spec.master_seed, TAG_EXPERIMENT, cell_index, rep_index)
    weights = draw_weight_sample(spec.node_config, spec.z_dist, params.n, params.m, root)
    H = sample_bipartite(params, weights, spec.kernel, root, method=spec.sampling_method)
    D = project(H)
    return _measure(D, spec.measurements)


def run_experiment(spec: ExperimentSpec, threads: int = 1) -> ExperimentResult:
    """Execute the full sweep and aggregate per cell.

    ``threads`` only controls concurrency; the result is identical for any
    value because every replicate owns a stream derived from its (cell,
    replicate) index and aggregation happens in index order.
    """
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads!r}")
    moments = MomentSet.from_distributions(spec.node_config, spec.z_dist)

    jobs = [(ci, ri) for ci in range(len(spec.cells)) for ri in range(spec.replicates)]
    outcomes: dict[tuple[int, int], _ReplicateStats | str] = {}

    def run_one(job: tuple[int, int]):
        ci, ri = job
        try:
            return job, _run_replicate(spec, ci, ri)
        except KernelViolationError as exc:
            return job, f"replicate {ri}: {exc}"

    if threads == 1:
        for job in jobs:
            key, outcome = run_one(job)
            outcomes[key] = outcome
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for key, outcome in pool.map(run_one, jobs):
                outcomes[key] = outcome

    cells = tuple(
        _aggregate_cell(spec, moments, ci,
                        [outcomes[(ci, ri)] for ri in range(spec.replicates)])
        for ci in range(len(spec.cells))
    )
    return ExperimentResult(spec=spec, moments=moments, cells=cells)


def _aggregate_cell(spec, moments, cell_index, outcomes) -> CellResult:
    params = spec.cells[cell_index]
    failures = [o for o in outcomes if isinstance(o, str)]
    refs = _references(spec, moments, params)
    if failures:
        return CellResult(params=params, replicates=spec.replicates,
                          failure="; ".join(failures), **refs)

    stats: list[_ReplicateStats] = outcomes
    kwargs: dict = {}
    if "dicc" in spec.measurements:
        kwargs["dicc"] = RatioEstimate.from_counts(
            [(s.report.diclique_ordered, s.report.open_ordered) for s in stats]
        )
    if "trcc" in spec.measurements:
        kwargs["trcc"] = RatioEstimate.from_counts(
            [(s.report.transitive_ordered, s.report.path2_ordered) for s in stats]
        )
    if "local_dicc" in spec.measurements:
        locals_ = []
        for policy in EGO_POLICIES:
            per = [s.local[policy] for s in stats]
            estimate = RatioEstimate.from_counts(
                [(l.closed_ordered, l.open_ordered) for l in per]
            )
            locals_.append(LocalEstimate(policy=policy, estimate=estimate,
                                         egos=tuple(l.ego for l in per)))
        kwargs["local_dicc"] = tuple(locals_)
    if "out_pmf" in spec.measurements:
        kwargs["out_pmf"] = _merge_hists([s.out_hist for s in stats])
    if "in_pmf" in spec.measurements:
        kwargs["in_pmf"] = _merge_hists([s.in_hist for s in stats])

    return CellResult(params=params, replicates=spec.replicates, **refs, **kwargs)


def _merge_hists(hists: list[EmpiricalPmf]) -> EmpiricalPmf:
    merged = hists[0]
    for h in hists[1:]:
        merged = merged.merge(h)
    return merged


def _references(spec: ExperimentSpec, moments: MomentSet, params: ModelParams) -> dict:
    """Limit values this cell should be compared against, where they exist."""
    refs: dict = {"dicc_reference": None, "trcc_reference": None, "local_reference": None}
    try:
        refs["dicc_reference"] = dicc_limit(params.alpha, moments)
    except ValueError:
        pass
    if isinstance(spec.kernel, IndependentProduct):
        # The product kernel kills reciprocity, and with it transitive
        # closure, in the sparse limit.
        refs["trcc_reference"] = 0.0
    elif isinstance(spec.kernel, EpsilonMin):
        try:
            refs["trcc_reference"] = trcc_limit_eps_min(
                params.beta, spec.kernel.epsilon, moments
            )
        except ValueError:
            pass
    if isinstance(spec.node_config.y_dist, Constant):
        try:
            refs["local_reference"] = dicc_local_limit_ego(
                params.alpha, spec.node_config.y_dist.value, moments
            )
        except ValueError:
            pass
    return refs


@dataclass(frozen=True)
class DegreeComparison:
    """Pooled empirical degree law next to its theoretical limit."""

    direction: str
    empirical: EmpiricalPmf
    limit: LimitPmf
    tv: float
    zero_fraction: float


def compare_degree_law(
    spec: ExperimentSpec,
    limit_params: LimitDegreeParams,
    threads: int = 1,
    r_max: int | None = None,
) -> tuple[ExperimentResult, DegreeComparison]:
    """Run the sweep's single cell and compare pooled degrees to a limit law.

    ``r_max`` defaults to the largest observed degree, so no empirical
    mass is pushed into the tail term of the distance.
    """
    if len(spec.cells) != 1:
        raise ValueError("degree comparison expects exactly one parameter cell")
    direction = "out" if limit_params.role == "outdegree" else "in"
    needed = f"{direction}_pmf"
    if needed not in spec.measurements:
        spec = ExperimentSpec(
            cells=spec.cells, node_config=spec.node_config, z_dist=spec.z_dist,
            kernel=spec.kernel, replicates=spec.replicates,
            master_seed=spec.master_seed,
            measurements=spec.measurements + (needed,),
            sampling_method=spec.sampling_method,
        )
    result = run_experiment(spec, threads=threads)
    cell = result.cells[0]
    if not cell.ok:
        raise RuntimeError(f"degree comparison cell failed: {cell.failure}")
    empirical = cell.out_pmf if direction == "out" else cell.in_pmf
    if r_max is None:
        r_max = max(int(empirical.counts.size - 1), 1)
    limit = limit_degree_pmf(limit_params, r_max)
    comparison = DegreeComparison(
        direction=direction,
        empirical=empirical,
        limit=limit,
        tv=total_variation(empirical, limit),
        zero_fraction=float(empirical.counts[0] / empirical.total) if empirical.total else 0.0,
    )
    return result, comparison
