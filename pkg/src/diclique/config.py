"""Declarative JSON run configuration.

A config is one JSON document with a ``schema_version`` field.  Parsing is
strict: every key is checked against the schema and unknown keys are
errors, so a typo in a sweep definition fails loudly instead of silently
running the wrong experiment.

Shape (optional parts bracketed)::

    {
      "schema_version": 1,
      ["seed": <uint64>,]
      "model": {
        "n": <int or list>,
        "m": <int or list>,
        "gamma": <number or list>
                 | {"alpha": <number or list>}
                 | {"rule": "inverse_sqrt_nm"}
      },
      "weights": {
        "x": <dist>, "y": <dist>, "z": <dist>,
        ["coupling": "independent" | "comonotone"]
      },
      ["kernel": {"kind": "independent_product"}
               | {"kind": "epsilon_min", "epsilon": <number>},]
      "replicates": <int >= 1>,
      ["measurements": [<name>, ...],]
      ["sampling_method": "pairwise" | "skip",]
      ["degree": {
        "regime": "vanishing" | "balanced" | "attribute_rich",
        "direction": "out" | "in",
        ["beta": <number>,] ["r_max": <int>]
      }]
    }

where ``<dist>`` is one of::

    {"kind": "constant", "value": v}
    {"kind": "exponential", "rate": r}
    {"kind": "pareto", "scale": s, "tail_index": a}
    {"kind": "two_point", "value_a": va, "value_b": vb, "prob_a": p}

``gamma`` forms: a plain number is the absolute link intensity; the
``alpha`` form sets gamma = alpha / m per cell; the ``inverse_sqrt_nm``
rule sets gamma = (n*m)^(-1/2) per cell (the sparse regime).  Lists sweep,
and cells enumerate as the cartesian product in (n, m, gamma) order.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .estimators import MEASUREMENTS, ExperimentSpec
from .generator import EpsilonMin, IndependentProduct, ModelParams, ReciprocityKernel
from .rng import MAX_SEED
from .theory import AttributeRich, Balanced, LimitDegreeParams, Vanishing
from .weights import (
    Constant,
    Coupling,
    Exponential,
    NodeWeightConfig,
    Pareto,
    TwoPoint,
    WeightDist,
)

SCHEMA_VERSION = 1

_REGIMES = ("vanishing", "balanced", "attribute_rich")


class ConfigError(ValueError):
    """Schema violation; the message names the offending key path."""


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}" if path else message)


def _require_mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        _fail(path, f"expected an object, got {type(value).__name__}")
    return value


def _reject_unknown(mapping: dict, known: tuple[str, ...], path: str):
    unknown = sorted(set(mapping) - set(known))
    if unknown:
        _fail(path, f"unknown key {unknown[0]!r} (allowed: {sorted(known)})")


def _get(mapping: dict, key: str, path: str, required: bool = True, default=None):
    if key in mapping:
        return mapping[key]
    if required:
        _fail(path, f"missing required key {key!r}")
    return default


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    if not math.isfinite(float(value)):
        _fail(path, f"expected a finite number, got {value!r}")
    return float(value)


def _as_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {value!r}")
    return value


def _as_str(value, path: str, choices: tuple[str, ...]) -> str:
    if not isinstance(value, str) or value not in choices:
        _fail(path, f"expected one of {list(choices)}, got {value!r}")
    return value


def _int_list(value, path: str, minimum: int) -> tuple[int, ...]:
    items = value if isinstance(value, list) else [value]
    if not items:
        _fail(path, "list must not be empty")
    out = []
    for idx, item in enumerate(items):
        v = _as_int(item, f"{path}[{idx}]" if isinstance(value, list) else path)
        if v < minimum:
            _fail(f"{path}[{idx}]" if isinstance(value, list) else path,
                  f"must be >= {minimum}, got {v}")
        out.append(v)
    return tuple(out)


def _number_list(value, path: str) -> tuple[float, ...]:
    items = value if isinstance(value, list) else [value]
    if not items:
        _fail(path, "list must not be empty")
    return tuple(
        _as_number(item, f"{path}[{idx}]" if isinstance(value, list) else path)
        for idx, item in enumerate(items)
    )


_DIST_FIELDS = {
    "constant": ("value",),
    "exponential": ("rate",),
    "pareto": ("scale", "tail_index"),
    "two_point": ("value_a", "value_b", "prob_a"),
}


def _parse_dist(value, path: str) -> WeightDist:
    mapping = _require_mapping(value, path)
    kind = _as_str(_get(mapping, "kind", path), f"{path}.kind", tuple(_DIST_FIELDS))
    fields = _DIST_FIELDS[kind]
    _reject_unknown(mapping, ("kind",) + fields, path)
    args = {name: _as_number(_get(mapping, name, path), f"{path}.{name}") for name in fields}
    ctor = {"constant": Constant, "exponential": Exponential,
            "pareto": Pareto, "two_point": TwoPoint}[kind]
    try:
        return ctor(**args)
    except ValueError as exc:
        _fail(path, str(exc))


@dataclass(frozen=True)
class GammaSpec:
    """One of: absolute values, alpha values (gamma = alpha/m), or the
    inverse-sqrt rule (gamma = (n*m)^-1/2)."""

    mode: str  # "absolute" | "alpha" | "inverse_sqrt_nm"
    values: tuple[float, ...] = ()

    def resolve(self, n: int, m: int) -> tuple[float, ...]:
        if self.mode == "absolute":
            return self.values
        if self.mode == "alpha":
            return tuple(a / m for a in self.values)
        return (1.0 / math.sqrt(n * m),)


def _parse_gamma(value, path: str) -> GammaSpec:
    if isinstance(value, dict):
        if "alpha" in value:
            _reject_unknown(value, ("alpha",), path)
            values = _number_list(value["alpha"], f"{path}.alpha")
            if min(values) <= 0:
                _fail(f"{path}.alpha", "alpha values must be positive")
            return GammaSpec(mode="alpha", values=values)
        if "rule" in value:
            _reject_unknown(value, ("rule",), path)
            _as_str(value["rule"], f"{path}.rule", ("inverse_sqrt_nm",))
            return GammaSpec(mode="inverse_sqrt_nm")
        _fail(path, "gamma object must contain 'alpha' or 'rule'")
    values = _number_list(value, path)
    if min(values) <= 0:
        _fail(path, "gamma values must be positive")
    return GammaSpec(mode="absolute", values=values)


@dataclass(frozen=True)
class DegreeBlock:
    regime: str
    direction: str
    beta: float | None
    r_max: int | None


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration, ready to build an experiment spec."""

    seed: int | None
    cells: tuple[ModelParams, ...]
    node_config: NodeWeightConfig
    z_dist: WeightDist
    kernel: ReciprocityKernel
    replicates: int
    measurements: tuple[str, ...]
    sampling_method: str
    degree: DegreeBlock | None

    def experiment_spec(self, seed_override: int | None = None) -> ExperimentSpec:
        """Build the ExperimentSpec; an explicit override beats the
        config's seed, and the documented default seed is 0."""
        seed = seed_override if seed_override is not None else self.seed
        measurements = self.measurements
        if self.degree is not None:
            needed = f"{self.degree.direction}_pmf"
            if needed not in measurements:
                measurements = measurements + (needed,)
        return ExperimentSpec(
            cells=self.cells,
            node_config=self.node_config,
            z_dist=self.z_dist,
            kernel=self.kernel,
            replicates=self.replicates,
            master_seed=seed if seed is not None else 0,
            measurements=measurements,
            sampling_method=self.sampling_method,
        )

    def limit_degree_params(self) -> LimitDegreeParams:
        """Limit-law inputs for the degree comparison (single cell only)."""
        if self.degree is None:
            raise ConfigError("degree: block is required for degree comparison")
        if len(self.cells) != 1:
            raise ConfigError("degree comparison requires a single parameter cell")
        cell = self.cells[0]
        if self.degree.regime == "vanishing":
            regime = Vanishing()
        elif self.degree.regime == "balanced":
            beta = self.degree.beta if self.degree.beta is not None else cell.beta
            regime = Balanced(beta=beta)
        else:
            regime = AttributeRich()
        role = "outdegree" if self.degree.direction == "out" else "indegree"
        return LimitDegreeParams(
            regime=regime, node_config=self.node_config, z_dist=self.z_dist, role=role
        )


def parse_config(document: dict) -> RunConfig:
    """Validate a decoded JSON document against the schema."""
    root = _require_mapping(document, "")
    _reject_unknown(root, ("schema_version", "seed", "model", "weights", "kernel",
                           "replicates", "measurements", "sampling_method", "degree"), "")

    version = _as_int(_get(root, "schema_version", ""), "schema_version")
    if version != SCHEMA_VERSION:
        _fail("schema_version", f"unsupported version {version} (expected {SCHEMA_VERSION})")

    seed = None
    if "seed" in root:
        seed = _as_int(root["seed"], "seed")
        if not 0 <= seed <= MAX_SEED:
            _fail("seed", "must fit in 64 bits")

    model = _require_mapping(_get(root, "model", ""), "model")
    _reject_unknown(model, ("n", "m", "gamma"), "model")
    ns = _int_list(_get(model, "n", "model"), "model.n", minimum=1)
    ms = _int_list(_get(model, "m", "model"), "model.m", minimum=1)
    gamma_spec = _parse_gamma(_get(model, "gamma", "model"), "model.gamma")

    cells = tuple(
        ModelParams(n=n, m=m, gamma=g)
        for n, m in itertools.product(ns, ms)
        for g in gamma_spec.resolve(n, m)
    )

    weights = _require_mapping(_get(root, "weights", ""), "weights")
    _reject_unknown(weights, ("x", "y", "z", "coupling"), "weights")
    x_dist = _parse_dist(_get(weights, "x", "weights"), "weights.x")
    y_dist = _parse_dist(_get(weights, "y", "weights"), "weights.y")
    z_dist = _parse_dist(_get(weights, "z", "weights"), "weights.z")
    coupling_name = _as_str(
        _get(weights, "coupling", "weights", required=False, default="independent"),
        "weights.coupling", ("independent", "comonotone"),
    )
    coupling = Coupling.COMONOTONE if coupling_name == "comonotone" else Coupling.INDEPENDENT
    node_config = NodeWeightConfig(x_dist=x_dist, y_dist=y_dist, coupling=coupling)

    kernel: ReciprocityKernel = IndependentProduct()
    if "kernel" in root:
        kmap = _require_mapping(root["kernel"], "kernel")
        kind = _as_str(_get(kmap, "kind", "kernel"), "kernel.kind",
                       ("independent_product", "epsilon_min"))
        if kind == "independent_product":
            _reject_unknown(kmap, ("kind",), "kernel")
        else:
            _reject_unknown(kmap, ("kind", "epsilon"), "kernel")
            epsilon = _as_number(_get(kmap, "epsilon", "kernel"), "kernel.epsilon")
            try:
                kernel = EpsilonMin(epsilon=epsilon)
            except ValueError as exc:
                _fail("kernel.epsilon", str(exc))

    replicates = _as_int(_get(root, "replicates", ""), "replicates")
    if replicates < 1:
        _fail("replicates", f"must be >= 1, got {replicates}")

    measurements: tuple[str, ...] = ("dicc", "trcc")
    if "measurements" in root:
        raw = root["measurements"]
        if not isinstance(raw, list) or not raw:
            _fail("measurements", "expected a non-empty list of measurement names")
        measurements = tuple(
            _as_str(item, f"measurements[{idx}]", MEASUREMENTS)
            for idx, item in enumerate(raw)
        )
        if len(set(measurements)) != len(measurements):
            _fail("measurements", "duplicate measurement names")

    sampling_method = _as_str(
        _get(root, "sampling_method", "", required=False, default="pairwise"),
        "sampling_method", ("pairwise", "skip"),
    )

    degree = None
    if "degree" in root:
        dmap = _require_mapping(root["degree"], "degree")
        _reject_unknown(dmap, ("regime", "direction", "beta", "r_max"), "degree")
        regime = _as_str(_get(dmap, "regime", "degree"), "degree.regime", _REGIMES)
        direction = _as_str(_get(dmap, "direction", "degree"), "degree.direction", ("out", "in"))
        beta = None
        if "beta" in dmap:
            beta = _as_number(dmap["beta"], "degree.beta")
            if beta <= 0:
                _fail("degree.beta", "must be positive")
        r_max = None
        if "r_max" in dmap:
            r_max = _as_int(dmap["r_max"], "degree.r_max")
            if r_max < 0:
                _fail("degree.r_max", "must be nonnegative")
        degree = DegreeBlock(regime=regime, direction=direction, beta=beta, r_max=r_max)

    return RunConfig(
        seed=seed,
        cells=cells,
        node_config=node_config,
        z_dist=z_dist,
        kernel=kernel,
        replicates=replicates,
        measurements=measurements,
        sampling_method=sampling_method,
        degree=degree,
    )


def load_config(path) -> RunConfig:
    """Read and validate a JSON config file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return parse_config(document)
