"""Report builders: experiment results to CSV rows and JSON documents.

All emission is deterministic: fixed column orders, sorted JSON keys,
floats via ``repr`` (shortest round-trip, locale-independent).  Undefined
coefficients stay None end to end and serialize as empty CSV cells or
JSON nulls, never as 0.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np

from .estimators import (
    CellResult,
    DegreeComparison,
    ExperimentResult,
    RatioEstimate,
)
from .generator import EpsilonMin, IndependentProduct, ModelParams, ReciprocityKernel
from .motifs import MotifReport
from .theory import AttributeRich, Balanced, LimitDegreeParams, MomentSet, Vanishing
from .weights import Constant, Coupling, Exponential, NodeWeightConfig, Pareto, TwoPoint

# The empirical transitive-closure coefficient has no canonical estimator;
# reports carry this tag so readers know which convention the numbers use.
TRCC_ESTIMATOR = "ordered-distinct-triple ratio: closed 2-paths over all 2-paths"


def fmt_cell(value) -> str:
    """CSV cell text: empty for None, repr for floats, str for ints."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def json_number(value):
    """JSON-safe number: infinities become strings, numpy scalars plain."""
    if value is None:
        return None
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def dist_to_dict(dist) -> dict:
    if isinstance(dist, Constant):
        return {"kind": "constant", "value": dist.value}
    if isinstance(dist, Exponential):
        return {"kind": "exponential", "rate": dist.rate}
    if isinstance(dist, Pareto):
        return {"kind": "pareto", "scale": dist.scale, "tail_index": dist.tail_index}
    if isinstance(dist, TwoPoint):
        return {"kind": "two_point", "value_a": dist.value_a,
                "value_b": dist.value_b, "prob_a": dist.prob_a}
    raise TypeError(f"unsupported weight distribution {dist!r}")


def kernel_to_dict(kernel: ReciprocityKernel) -> dict:
    if isinstance(kernel, IndependentProduct):
        return {"kind": "independent_product"}
    if isinstance(kernel, EpsilonMin):
        return {"kind": "epsilon_min", "epsilon": kernel.epsilon}
    raise TypeError(f"unsupported kernel {kernel!r}")


def weights_to_dict(node_config: NodeWeightConfig, z_dist) -> dict:
    return {
        "x": dist_to_dict(node_config.x_dist),
        "y": dist_to_dict(node_config.y_dist),
        "z": dist_to_dict(z_dist),
        "coupling": "comonotone" if node_config.coupling is Coupling.COMONOTONE else "independent",
    }


def moments_to_dict(mom: MomentSet) -> dict:
    return {name: json_number(getattr(mom, name))
            for name in ("a1", "a2", "a3", "b1", "b2", "b3",
                         "h1", "h2", "h3", "h4", "cross_xy", "cross_min")}


def params_to_dict(params: ModelParams) -> dict:
    return {"n": params.n, "m": params.m, "gamma": params.gamma,
            "alpha": params.alpha, "beta": params.beta}


def _estimate_to_dict(est: RatioEstimate | None) -> dict | None:
    if est is None:
        return None
    return {
        "value": est.value,
        "numerator": int(est.numerator),
        "denominator": int(est.denominator),
        "std_error": est.std_error,
        "per_replicate": list(est.per_replicate),
    }


def _pmf_to_dict(pmf) -> dict | None:
    if pmf is None:
        return None
    return {"counts": [int(c) for c in pmf.counts], "total": int(pmf.total)}


def cell_to_dict(cell: CellResult) -> dict:
    out: dict[str, Any] = {
        "params": params_to_dict(cell.params),
        "replicates": cell.replicates,
        "status": "ok" if cell.ok else "failed",
        "failure": cell.failure,
        "dicc": _estimate_to_dict(cell.dicc),
        "trcc": _estimate_to_dict(cell.trcc),
        "out_pmf": _pmf_to_dict(cell.out_pmf),
        "in_pmf": _pmf_to_dict(cell.in_pmf),
        "references": {
            "dicc": cell.dicc_reference,
            "trcc": cell.trcc_reference,
            "local_dicc": cell.local_reference,
        },
    }
    out["local_dicc"] = {
        le.policy: {
            "estimate": _estimate_to_dict(le.estimate),
            "egos": list(le.egos),
        }
        for le in cell.local_dicc
    } or None
    return out


def result_to_dict(result: ExperimentResult) -> dict:
    spec = result.spec
    return {
        "seed": spec.master_seed,
        "replicates": spec.replicates,
        "measurements": list(spec.measurements),
        "sampling_method": spec.sampling_method,
        "kernel": kernel_to_dict(spec.kernel),
        "weights": weights_to_dict(spec.node_config, spec.z_dist),
        "moments": moments_to_dict(result.moments),
        "trcc_estimator": TRCC_ESTIMATOR,
        "cells": [cell_to_dict(cell) for cell in result.cells],
    }


EXPERIMENT_COLUMNS = [
    "cell", "n", "m", "gamma", "alpha", "beta", "replicates", "status",
    "dicc", "dicc_se", "dicc_numerator", "dicc_denominator", "dicc_reference",
    "trcc", "trcc_se", "trcc_numerator", "trcc_denominator", "trcc_reference",
    "local_dicc_max_in_degree", "local_dicc_max_in_degree_se",
    "local_dicc_node0", "local_dicc_node0_se", "local_dicc_reference",
]


def result_to_rows(result: ExperimentResult) -> tuple[list[str], list[list[str]]]:
    rows = []
    for index, cell in enumerate(result.cells):
        locals_by_policy = {le.policy: le.estimate for le in cell.local_dicc}

        def ratio_fields(est: RatioEstimate | None):
            if est is None:
                return [None, None, None, None]
            return [est.value, est.std_error, est.numerator, est.denominator]

        dicc_fields = ratio_fields(cell.dicc)
        trcc_fields = ratio_fields(cell.trcc)
        local_hub = locals_by_policy.get("max_in_degree")
        local_zero = locals_by_policy.get("node0")
        row = [
            index, cell.params.n, cell.params.m, cell.params.gamma,
            cell.params.alpha, cell.params.beta, cell.replicates,
            "ok" if cell.ok else "failed",
            *dicc_fields[:2], dicc_fields[2], dicc_fields[3], cell.dicc_reference,
            *trcc_fields[:2], trcc_fields[2], trcc_fields[3], cell.trcc_reference,
            local_hub.value if local_hub else None,
            local_hub.std_error if local_hub else None,
            local_zero.value if local_zero else None,
            local_zero.std_error if local_zero else None,
            cell.local_reference,
        ]
        rows.append([fmt_cell(v) for v in row])
    return list(EXPERIMENT_COLUMNS), rows


COEFFS_COLUMNS = [
    "n", "edges", "diclique_ordered", "open_ordered", "dicc",
    "transitive_ordered", "path2_ordered", "trcc",
]


def coeffs_to_rows(n: int, edges: int, report: MotifReport) -> tuple[list[str], list[list[str]]]:
    row = [
        n, edges,
        report.diclique_ordered, report.open_ordered, report.dicc,
        report.transitive_ordered, report.path2_ordered, report.trcc,
    ]
    return list(COEFFS_COLUMNS), [[fmt_cell(v) for v in row]]


def coeffs_to_dict(n: int, edges: int, report: MotifReport, source: str) -> dict:
    return {
        "source": source,
        "n": n,
        "edges": edges,
        "diclique_ordered": int(report.diclique_ordered),
        "open_ordered": int(report.open_ordered),
        "dicc": report.dicc,
        "transitive_ordered": int(report.transitive_ordered),
        "path2_ordered": int(report.path2_ordered),
        "trcc": report.trcc,
        "trcc_estimator": TRCC_ESTIMATOR,
    }


DEGREE_COLUMNS = ["degree", "empirical", "limit"]


def degree_to_rows(comparison: DegreeComparison) -> tuple[list[str], list[list[str]]]:
    emp = comparison.empirical.probs
    lim = comparison.limit.probs
    size = max(emp.size, lim.size)
    rows = []
    for r in range(size):
        e = float(emp[r]) if r < emp.size else 0.0
        l = float(lim[r]) if r < lim.size else 0.0
        rows.append([fmt_cell(r), fmt_cell(e), fmt_cell(l)])
    return list(DEGREE_COLUMNS), rows


def _regime_to_dict(params: LimitDegreeParams) -> dict:
    regime = params.regime
    if isinstance(regime, Vanishing):
        return {"kind": "vanishing"}
    if isinstance(regime, Balanced):
        return {"kind": "balanced", "beta": regime.beta}
    if isinstance(regime, AttributeRich):
        return {"kind": "attribute_rich"}
    raise TypeError(f"unsupported regime {regime!r}")


def degree_to_dict(comparison: DegreeComparison, limit_params: LimitDegreeParams,
                   cell: ModelParams, seed: int, replicates: int) -> dict:
    return {
        "seed": seed,
        "replicates": replicates,
        "params": params_to_dict(cell),
        "direction": comparison.direction,
        "regime": _regime_to_dict(limit_params),
        "tv_distance": comparison.tv,
        "zero_fraction": comparison.zero_fraction,
        "empirical": _pmf_to_dict(comparison.empirical),
        "limit": {
            "probs": [float(p) for p in comparison.limit.probs],
            "tail_mass": comparison.limit.tail_mass,
            "mixture_truncation": comparison.limit.mixture_truncation,
        },
    }
