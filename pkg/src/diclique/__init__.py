"""Random intersection digraphs with tunable reciprocity.

Actors demand and supply attributes at random, with rates driven by
per-node fitness weights; linking actor i to actor j whenever some
attribute is demanded by i and supplied by j yields a sparse digraph
whose diclique and transitive-closure clustering coefficients have
closed-form limits.  This package samples the model, counts the motifs
exactly, evaluates the limit formulas, and runs the Monte Carlo
experiments that tie the two together.
"""

from .config import ConfigError, DegreeBlock, GammaSpec, RunConfig, load_config, parse_config
from .estimators import (
    CellResult,
    DegreeComparison,
    EmpiricalPmf,
    ExperimentResult,
    ExperimentSpec,
    LocalEstimate,
    RatioEstimate,
    compare_degree_law,
    empirical_degree_pmf,
    run_experiment,
    total_variation,
)
from .generator import (
    BipartiteDigraph,
    EpsilonMin,
    IndependentProduct,
    KernelViolationError,
    ModelParams,
    ReciprocityKernel,
    link_probabilities,
    sample_bipartite,
    validate_kernel,
)
from .graphio import (
    GraphFormatError,
    read_bipartite,
    read_digraph,
    read_graph_file,
    write_bipartite,
    write_digraph,
)
from .motifs import (
    LocalMotifCounts,
    MotifReport,
    brute_force_local,
    brute_force_report,
    dicc_global,
    dicc_local,
    motif_report,
    trcc_global,
)
from .projection import Digraph, project
from .rng import StreamRoot, positional_uniforms
from .theory import (
    AttributeRich,
    Balanced,
    LimitDegreeParams,
    LimitPmf,
    MomentSet,
    Vanishing,
    ZMoments,
    dicc_limit,
    dicc_local_limit_ego,
    dicc_pair_limit,
    downshifted_size_biased_pmf,
    limit_degree_pmf,
    sample_limit_degree,
    trcc_limit_eps_min,
)
from .weights import (
    Constant,
    Coupling,
    Exponential,
    NodeWeightConfig,
    Pareto,
    TwoPoint,
    WeightSample,
    cross_moment_min,
    cross_moment_xy,
    draw_weight_sample,
    sample_attribute_weights,
    sample_node_weights,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeRich",
    "Balanced",
    "BipartiteDigraph",
    "CellResult",
    "ConfigError",
    "Constant",
    "Coupling",
    "DegreeBlock",
    "DegreeComparison",
    "Digraph",
    "EmpiricalPmf",
    "EpsilonMin",
    "Exponential",
    "ExperimentResult",
    "ExperimentSpec",
    "GammaSpec",
    "GraphFormatError",
    "IndependentProduct",
    "KernelViolationError",
    "LimitDegreeParams",
    "LimitPmf",
    "LocalEstimate",
    "LocalMotifCounts",
    "ModelParams",
    "MomentSet",
    "MotifReport",
    "NodeWeightConfig",
    "Pareto",
    "RatioEstimate",
    "ReciprocityKernel",
    "RunConfig",
    "StreamRoot",
    "TwoPoint",
    "Vanishing",
    "WeightSample",
    "ZMoments",
    "brute_force_local",
    "brute_force_report",
    "compare_degree_law",
    "cross_moment_min",
    "cross_moment_xy",
    "dicc_global",
    "dicc_limit",
    "dicc_local",
    "dicc_local_limit_ego",
    "dicc_pair_limit",
    "downshifted_size_biased_pmf",
    "draw_weight_sample",
    "empirical_degree_pmf",
    "limit_degree_pmf",
    "link_probabilities",
    "load_config",
    "motif_report",
    "parse_config",
    "positional_uniforms",
    "project",
    "read_bipartite",
    "read_digraph",
    "read_graph_file",
    "run_experiment",
    "sample_attribute_weights",
    "sample_bipartite",
    "sample_limit_degree",
    "sample_node_weights",
    "total_variation",
    "trcc_global",
    "trcc_limit_eps_min",
    "validate_kernel",
    "write_bipartite",
    "write_digraph",
]
