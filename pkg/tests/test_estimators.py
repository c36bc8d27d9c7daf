"""Experiment engine: pooling, distances, scheduling, and failure isolation."""

import numpy as np
import pytest

from diclique import (
    Balanced,
    CellResult,
    Constant,
    DegreeComparison,
    EmpiricalPmf,
    EpsilonMin,
    ExperimentSpec,
    Exponential,
    IndependentProduct,
    LimitDegreeParams,
    LimitPmf,
    ModelParams,
    NodeWeightConfig,
    RatioEstimate,
    TwoPoint,
    Vanishing,
    compare_degree_law,
    empirical_degree_pmf,
    run_experiment,
    total_variation,
    trcc_limit_eps_min,
)
from diclique.estimators import _pick_ego


def _small_spec(**overrides):
    base = dict(
        cells=(ModelParams(60, 40, 0.01), ModelParams(50, 30, 0.02)),
        node_config=NodeWeightConfig(TwoPoint(0.5, 2.0, 0.5), Constant(1.0)),
        z_dist=TwoPoint(0.5, 2.0, 0.25),
        kernel=EpsilonMin(0.8),
        replicates=3,
        master_seed=1234,
        measurements=("dicc", "trcc", "local_dicc", "out_pmf", "in_pmf"),
    )
    base.update(overrides)
    return ExperimentSpec(**base)


def _assert_cells_equal(a: CellResult, b: CellResult):
    assert a.params == b.params
    assert a.failure == b.failure
    assert a.dicc == b.dicc
    assert a.trcc == b.trcc
    assert a.local_dicc == b.local_dicc
    for pa, pb in ((a.out_pmf, b.out_pmf), (a.in_pmf, b.in_pmf)):
        assert (pa is None) == (pb is None)
        if pa is not None:
            np.testing.assert_array_equal(pa.counts, pb.counts)
            assert pa.total == pb.total


# ---------------------------------------------------------------------------
# Total variation distance.
# ---------------------------------------------------------------------------


def test_tv_of_identical_pmfs_is_zero():
    assert total_variation([0.5, 0.3, 0.2], [0.5, 0.3, 0.2]) == 0.0


def test_tv_of_disjoint_pmfs_is_one():
    assert total_variation([1.0, 0.0], [0.0, 1.0]) == 1.0


def test_tv_counts_explicit_tail_mass():
    limit = LimitPmf(probs=np.array([0.25, 0.25]), tail_mass=0.5,
                     mixture_truncation=0.0)
    assert total_variation([0.5, 0.5], limit) == pytest.approx(0.5)


def test_tv_treats_missing_array_mass_as_tail():
    # [0.5, 0.25] is short 0.25 of probability, so it carries that much
    # tail; the L1 half contributes another eighth on the third entry.
    assert total_variation([0.5, 0.25], [0.5, 0.25, 0.25]) == pytest.approx(0.25)


def test_tv_pads_mismatched_lengths():
    assert total_variation([1.0], [0.5, 0.5]) == pytest.approx(0.5)


def test_tv_rejects_negative_entries():
    with pytest.raises(ValueError, match="nonnegative"):
        total_variation([-0.1, 1.1], [0.5, 0.5])


def test_tv_accepts_empirical_pmfs():
    p = EmpiricalPmf.from_degrees(np.array([0, 0, 1, 1]))
    q = EmpiricalPmf.from_degrees(np.array([0, 1, 1, 1]))
    assert total_variation(p, q) == pytest.approx(0.25)
    assert total_variation(p, p) == 0.0


# ---------------------------------------------------------------------------
# Degree histograms.
# ---------------------------------------------------------------------------


def test_empirical_pmf_from_degrees():
    pmf = EmpiricalPmf.from_degrees(np.array([0, 1, 1, 3]))
    np.testing.assert_array_equal(pmf.counts, [1, 2, 0, 1])
    assert pmf.total == 4
    np.testing.assert_allclose(pmf.probs, [0.25, 0.5, 0.0, 0.25])


def test_empirical_pmf_of_nothing():
    pmf = EmpiricalPmf.from_degrees(np.array([], dtype=np.int64))
    assert pmf.total == 0
    np.testing.assert_array_equal(pmf.probs, [0.0])


def test_empirical_pmf_merge_pads_to_the_longer_support():
    a = EmpiricalPmf.from_degrees(np.array([0, 1]))
    b = EmpiricalPmf.from_degrees(np.array([3]))
    merged = a.merge(b)
    np.testing.assert_array_equal(merged.counts, [1, 1, 0, 1])
    assert merged.total == 3


def test_empirical_pmf_validation():
    with pytest.raises(ValueError, match="total"):
        EmpiricalPmf(counts=np.array([1, 2]), total=4)
    with pytest.raises(ValueError, match="nonnegative"):
        EmpiricalPmf(counts=np.array([-1, 2]), total=1)
    with pytest.raises(ValueError, match="one-dimensional"):
        EmpiricalPmf(counts=np.array([[1], [2]]), total=3)


def test_empirical_degree_pmf_direction(make_digraph):
    g = make_digraph(3, [(0, 1), (0, 2), (1, 2)])
    out_pmf = empirical_degree_pmf(g, "out")
    in_pmf = empirical_degree_pmf(g, "in")
    np.testing.assert_array_equal(out_pmf.counts, [1, 1, 1])  # degrees 2, 1, 0
    np.testing.assert_array_equal(in_pmf.counts, [1, 1, 1])   # degrees 0, 1, 2
    with pytest.raises(ValueError, match="direction"):
        empirical_degree_pmf(g, "total")


# ---------------------------------------------------------------------------
# Pooled ratios.
# ---------------------------------------------------------------------------


def test_ratio_estimate_pools_counts_before_dividing():
    est = RatioEstimate.from_counts([(1, 2), (2, 4), (3, 4)])
    assert (est.numerator, est.denominator) == (6, 10)
    assert est.value == 0.6
    assert est.per_replicate == (0.5, 0.5, 0.75)
    # Leave-one-out ratios are 5/8, 4/6, 3/6; the jackknife variance of
    # the pooled ratio follows from those three numbers.
    assert est.std_error == pytest.approx(0.1001542020962219, rel=1e-12)


def test_ratio_estimate_undefined_on_zero_denominator():
    est = RatioEstimate.from_counts([(0, 0), (0, 0)])
    assert est.value is None
    assert est.per_replicate == (None, None)
    assert est.std_error is None


def test_ratio_estimate_single_replicate_has_no_spread():
    est = RatioEstimate.from_counts([(3, 7)])
    assert est.value == pytest.approx(3 / 7)
    assert est.std_error is None


def test_ratio_estimate_degenerate_leave_one_out():
    # Dropping the only informative replicate empties the denominator, so
    # no spread can be quoted.
    est = RatioEstimate.from_counts([(1, 2), (0, 0)])
    assert est.value == 0.5
    assert est.per_replicate == (0.5, None)
    assert est.std_error is None


# ---------------------------------------------------------------------------
# Ego selection.
# ---------------------------------------------------------------------------


def test_pick_ego_policies(make_digraph):
    g = make_digraph(4, [(0, 1), (2, 1), (0, 2), (3, 2)])
    assert _pick_ego(g, "node0") == 0
    # in-degrees are [0, 2, 2, 0]; ties break to the smallest index.
    assert _pick_ego(g, "max_in_degree") == 1
    with pytest.raises(ValueError, match="ego policy"):
        _pick_ego(g, "random")


# ---------------------------------------------------------------------------
# Experiment runs.
# ---------------------------------------------------------------------------


def test_spec_validation():
    with pytest.raises(ValueError, match="at least one parameter cell"):
        _small_spec(cells=())
    with pytest.raises(ValueError, match="replicates"):
        _small_spec(replicates=0)
    with pytest.raises(ValueError, match="unknown measurements"):
        _small_spec(measurements=("dicc", "mean_degree"))
    with pytest.raises(ValueError, match="at least one measurement"):
        _small_spec(measurements=())
    with pytest.raises(ValueError, match="64 bits"):
        _small_spec(master_seed=-1)


def test_run_experiment_is_deterministic():
    spec = _small_spec()
    first = run_experiment(spec)
    second = run_experiment(spec)
    for a, b in zip(first.cells, second.cells):
        _assert_cells_equal(a, b)


def test_run_experiment_is_thread_count_invariant():
    spec = _small_spec()
    serial = run_experiment(spec, threads=1)
    threaded = run_experiment(spec, threads=3)
    assert serial.moments == threaded.moments
    for a, b in zip(serial.cells, threaded.cells):
        _assert_cells_equal(a, b)


def test_run_experiment_rejects_bad_thread_count():
    with pytest.raises(ValueError, match="threads"):
        run_experiment(_small_spec(), threads=0)


def test_cell_shapes_and_bookkeeping():
    spec = _small_spec()
    result = run_experiment(spec)
    assert result.all_ok
    assert len(result.cells) == 2
    for cell, params in zip(result.cells, spec.cells):
        assert cell.params == params
        assert cell.replicates == 3
        assert len(cell.dicc.per_replicate) == 3
        assert cell.out_pmf.total == params.n * 3
        assert cell.in_pmf.total == params.n * 3
        assert len(cell.local_dicc) == 2
        for local in cell.local_dicc:
            assert len(local.egos) == 3


def test_references_for_the_min_kernel():
    spec = _small_spec()
    result = run_experiment(spec)
    for cell in result.cells:
        assert cell.dicc_reference is not None
        assert cell.trcc_reference == pytest.approx(
            trcc_limit_eps_min(cell.params.beta, 0.8, result.moments)
        )
        # y is Constant(1.0), so the ego-conditional limit applies.
        assert cell.local_reference is not None


def test_references_for_the_product_kernel():
    spec = _small_spec(kernel=IndependentProduct(),
                       node_config=NodeWeightConfig(TwoPoint(0.5, 2.0, 0.5),
                                                    Exponential(1.0)))
    result = run_experiment(spec)
    for cell in result.cells:
        assert cell.trcc_reference == 0.0
        # A random supply weight leaves no single ego value to condition on.
        assert cell.local_reference is None


def test_kernel_violation_fails_only_its_cell():
    # Second cell saturates both marginals, where r = 0.5 sits below the
    # p + q - 1 floor; the first cell must still be measured.
    spec = _small_spec(
        cells=(ModelParams(40, 20, 0.001), ModelParams(10, 5, 1.0)),
        node_config=NodeWeightConfig(Constant(1.0), Constant(1.0)),
        z_dist=Constant(1.0),
        kernel=EpsilonMin(0.5),
        measurements=("dicc", "trcc"),
    )
    result = run_experiment(spec)
    assert not result.all_ok
    good, bad = result.cells
    assert good.ok
    assert good.dicc is not None
    assert not bad.ok
    assert "replicate" in bad.failure
    assert bad.dicc is None
    # The reference values do not depend on the draw, so they survive.
    assert bad.dicc_reference is not None


# ---------------------------------------------------------------------------
# Degree law comparison.
# ---------------------------------------------------------------------------


def _degree_spec(n=200, m=100, replicates=4):
    return ExperimentSpec(
        cells=(ModelParams(n, m, 1.0 / np.sqrt(n * m)),),
        node_config=NodeWeightConfig(Constant(1.0), Constant(1.0)),
        z_dist=Constant(1.0),
        kernel=IndependentProduct(),
        replicates=replicates,
        master_seed=77,
        measurements=("dicc",),
    )


def test_compare_degree_law_adds_the_missing_measurement():
    spec = _degree_spec()
    limit_params = LimitDegreeParams(
        regime=Balanced(0.5), node_config=spec.node_config, z_dist=spec.z_dist
    )
    result, comparison = compare_degree_law(spec, limit_params)
    assert "out_pmf" in result.spec.measurements
    assert comparison.direction == "out"
    assert comparison.empirical.total == 200 * 4
    assert comparison.tv == pytest.approx(
        total_variation(comparison.empirical, comparison.limit)
    )
    assert comparison.zero_fraction == pytest.approx(
        comparison.empirical.counts[0] / comparison.empirical.total
    )


def test_compare_degree_law_r_max_override():
    spec = _degree_spec(n=80, m=40, replicates=2)
    limit_params = LimitDegreeParams(
        regime=Balanced(0.5), node_config=spec.node_config, z_dist=spec.z_dist
    )
    _, comparison = compare_degree_law(spec, limit_params, r_max=25)
    assert comparison.limit.probs.size == 26


def test_compare_degree_law_indegree_direction():
    spec = _degree_spec(n=80, m=40, replicates=2)
    limit_params = LimitDegreeParams(
        regime=Vanishing(), node_config=spec.node_config,
        z_dist=spec.z_dist, role="indegree",
    )
    result, comparison = compare_degree_law(spec, limit_params)
    assert comparison.direction == "in"
    assert "in_pmf" in result.spec.measurements
    assert isinstance(comparison, DegreeComparison)


def test_compare_degree_law_requires_a_single_cell():
    spec = _small_spec()
    limit_params = LimitDegreeParams(
        regime=Vanishing(), node_config=spec.node_config, z_dist=spec.z_dist
    )
    with pytest.raises(ValueError, match="one parameter cell"):
        compare_degree_law(spec, limit_params)
