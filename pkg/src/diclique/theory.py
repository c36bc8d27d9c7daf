"""Closed-form limit values and limiting degree laws.

Every function here is deterministic and consumes exact moments, so the
Monte Carlo side of the package can be validated against oracle-grade
references.  Mixtures over continuous weight laws use fixed Gauss-Legendre
quadrature on the quantile scale, truncated at the 1 - 1e-10 quantile; the
truncated mass is surfaced, never hidden.

Three asymptotic regimes for the degree of a typical actor are covered:

* ``Vanishing``: far fewer attributes than actors; degrees collapse to 0.
* ``Balanced(beta)``: attributes proportional to actors; the degree tends
  to a compound law (a mixed-Poisson number of demanded attributes, each
  contributing a downshifted size-biased mixed-Poisson supplier count).
* ``AttributeRich``: attributes dominate; the compound structure washes
  out into a plain mixed Poisson.

Indegrees follow by swapping the roles of demand and supply weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import stats

from .weights import (
    Constant,
    NodeWeightConfig,
    TwoPoint,
    WeightDist,
    cross_moment_min,
    cross_moment_xy,
)

_QUANTILE_CUTOFF = 1e-10
_GL_NODES = 64
_LAMBDA1_TAIL = 1e-12
_LAMBDA1_CAP = 4096


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValueError(message)


def _finite_positive(name: str, value: float) -> None:
    _require(math.isfinite(value) and value > 0.0, f"{name} must be finite and positive, got {value!r}")


def _finite(name: str, value: float) -> None:
    _require(math.isfinite(value), f"required moment {name} is not finite ({value!r})")


@dataclass(frozen=True)
class ZMoments:
    """Second through fourth moments of the attribute weight."""

    h2: float
    h3: float
    h4: float

    @classmethod
    def from_dist(cls, z_dist: WeightDist) -> "ZMoments":
        return cls(h2=z_dist.moment(2), h3=z_dist.moment(3), h4=z_dist.moment(4))


@dataclass(frozen=True)
class MomentSet:
    """Exact moment inputs for the limit formulas.

    a_r, b_r, h_r are the r-th moments of the demand, supply, and
    attribute weights; the cross moments describe the joint law of one
    actor's pair.  Entries may be +inf; each formula checks what it needs.
    """

    a1: float
    a2: float
    a3: float
    b1: float
    b2: float
    b3: float
    h1: float
    h2: float
    h3: float
    h4: float
    cross_xy: float
    cross_min: float

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "b1", "b2", "b3", "h1", "h2", "h3", "h4"):
            value = getattr(self, name)
            _require(value >= 0.0, f"moment {name} must be nonnegative, got {value!r}")
        _require(self.cross_xy >= 0.0 and self.cross_min >= 0.0,
                 "cross moments must be nonnegative")
        # Cauchy-Schwarz sanity on finite entries; quadrature outputs get a
        # little slack.
        for lo, hi, label in (
            (self.a1, self.a2, "a1^2 <= a2"),
            (self.b1, self.b2, "b1^2 <= b2"),
            (self.h1, self.h2, "h1^2 <= h2"),
            (self.h2, self.h4, "h2^2 <= h4"),
        ):
            if math.isfinite(lo) and math.isfinite(hi):
                _require(lo * lo <= hi * (1.0 + 1e-9), f"moment sanity violated: {label}")

    @classmethod
    def from_distributions(cls, node_config: NodeWeightConfig, z_dist: WeightDist) -> "MomentSet":
        x, y = node_config.x_dist, node_config.y_dist
        return cls(
            a1=x.moment(1), a2=x.moment(2), a3=x.moment(3),
            b1=y.moment(1), b2=y.moment(2), b3=y.moment(3),
            h1=z_dist.moment(1), h2=z_dist.moment(2),
            h3=z_dist.moment(3), h4=z_dist.moment(4),
            cross_xy=cross_moment_xy(node_config),
            cross_min=cross_moment_min(node_config),
        )

    @property
    def z(self) -> ZMoments:
        return ZMoments(h2=self.h2, h3=self.h3, h4=self.h4)


def dicc_limit(alpha: float, mom: MomentSet) -> float:
    """Limit of the global diclique clustering coefficient.

    ``alpha`` is the limiting product of link intensity and attribute
    count.  The value decreases from 1 (at alpha = 0) toward 0 as alpha
    grows; with unit weights it equals (1 + alpha)^-2.
    """
    _require(alpha >= 0.0, f"alpha must be nonnegative, got {alpha!r}")
    _finite_positive("a1", mom.a1)
    _finite_positive("b1", mom.b1)
    _finite_positive("h4", mom.h4)
    for name in ("a2", "b2", "h2", "h3"):
        _finite(name, getattr(mom, name))
    xa = mom.a2 / mom.a1
    yb = mom.b2 / mom.b1
    zz = mom.h2 * mom.h3 / mom.h4
    z3 = mom.h2**3 / mom.h4
    return 1.0 / (1.0 + alpha * (xa + yb) * zz + alpha * alpha * xa * yb * z3)


def dicc_local_limit_ego(alpha: float, y3: float, mom: MomentSet) -> float:
    """Limit of the local coefficient conditioned on the ego's supply weight.

    ``y3`` is the ego's realized supply weight; large values drag the
    coefficient to zero at rate 1/y3 because a popular ego's followers
    overlap for reasons the ego itself explains.
    """
    _require(alpha >= 0.0, f"alpha must be nonnegative, got {alpha!r}")
    _require(y3 >= 0.0, f"y3 must be nonnegative, got {y3!r}")
    _finite_positive("a1", mom.a1)
    _finite_positive("h4", mom.h4)
    for name in ("a2", "h2", "h3"):
        _finite(name, getattr(mom, name))
    xa = mom.a2 / mom.a1
    zz = mom.h3 * mom.h2 / mom.h4
    z3 = mom.h2**3 / mom.h4
    return 1.0 / (1.0 + alpha * (xa + y3) * zz + alpha * alpha * y3 * xa * z3)


def dicc_pair_limit(alpha: float, x1: float, y3: float, h) -> float:
    """Limit of the pair-conditional coefficient given follower demand
    weight ``x1`` and ego supply weight ``y3``.

    ``h`` supplies the attribute-weight moments (a :class:`ZMoments` or
    any object with ``h2``, ``h3``, ``h4``).  For a constant attribute
    weight z the value factorizes exactly into
    ``1/(1 + alpha*z*x1) * 1/(1 + alpha*z*y3)``.
    """
    _require(alpha >= 0.0, f"alpha must be nonnegative, got {alpha!r}")
    _require(x1 >= 0.0 and y3 >= 0.0, "conditioning weights must be nonnegative")
    h2, h3, h4 = float(h.h2), float(h.h3), float(h.h4)
    _finite_positive("h4", h4)
    _finite("h2", h2)
    _finite("h3", h3)
    zz = h3 * h2 / h4
    z3 = h2**3 / h4
    return 1.0 / (1.0 + alpha * (x1 + y3) * zz + alpha * alpha * x1 * y3 * z3)


def trcc_limit_eps_min(beta: float, epsilon: float, mom: MomentSet) -> float:
    """Limit of the transitive-closure coefficient under the min kernel.

    Under the product kernel the same coefficient vanishes; this value is
    positive because the kernel couples each pair's demand and supply
    indicators with strength ``epsilon``.
    """
    _finite_positive("beta", beta)
    _require(0.0 < epsilon <= 1.0, f"epsilon must lie in (0, 1], got {epsilon!r}")
    _require(mom.cross_min > 0.0, "E[min(X, Y)] must be positive for the min-kernel limit")
    _finite("cross_xy", mom.cross_xy)
    _finite("cross_min", mom.cross_min)
    _finite_positive("h3", mom.h3)
    _finite("h2", mom.h2)
    ratio = (math.sqrt(beta) / epsilon) * (mom.cross_xy / mom.cross_min) * (mom.h2**2 / mom.h3)
    return 1.0 / (1.0 + ratio)


# ---------------------------------------------------------------------------
# Limiting degree laws.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Vanishing:
    """Attribute count negligible next to actor count: degrees vanish."""


@dataclass(frozen=True)
class Balanced:
    """Attribute count proportional to actor count with ratio ``beta``."""

    beta: float

    def __post_init__(self):
        _finite_positive("beta", self.beta)


@dataclass(frozen=True)
class AttributeRich:
    """Attribute count grows faster than actor count."""


Regime = Union[Vanishing, Balanced, AttributeRich]


@dataclass(frozen=True)
class LimitDegreeParams:
    """Inputs for the limiting degree law of a typical actor.

    ``role`` selects the degree direction.  Outdegrees are driven by the
    actor's own demand weight and everyone else's supply; indegrees swap
    the two, and that swap happens here so the pmf and sampler code can
    stay direction-blind.
    """

    regime: Regime
    node_config: NodeWeightConfig
    z_dist: WeightDist
    role: str = "outdegree"

    def __post_init__(self):
        _require(self.role in ("outdegree", "indegree"),
                 f"role must be 'outdegree' or 'indegree', got {self.role!r}")

    @property
    def own_dist(self) -> WeightDist:
        return self.node_config.x_dist if self.role == "outdegree" else self.node_config.y_dist

    @property
    def other_mean(self) -> float:
        other = self.node_config.y_dist if self.role == "outdegree" else self.node_config.x_dist
        return other.moment(1)


@dataclass(frozen=True)
class LimitPmf:
    """Truncated pmf with explicit bookkeeping of what truncation cost.

    ``probs[r]`` approximates P(degree = r) for r <= r_max; ``tail_mass``
    is the probability the law assigns beyond r_max (computed as the
    complement of the sum); ``mixture_truncation`` bounds the additional
    error from cutting continuous mixing laws at their far quantile.
    """

    probs: np.ndarray
    tail_mass: float
    mixture_truncation: float

    @property
    def r_max(self) -> int:
        return int(self.probs.size - 1)


def _poisson_rows(r_max: int, rates: np.ndarray) -> np.ndarray:
    """Matrix of Poisson pmfs: entry [k, j] = P(Poisson(rates[j]) = k)."""
    ks = np.arange(r_max + 1)[:, None]
    return stats.poisson.pmf(ks, rates[None, :])


def _mixing_nodes(dist, scale: float) -> tuple[np.ndarray, np.ndarray, float]:
    """Quadrature representation of the Poisson rate ``scale * W``.

    Returns (rates, weights, truncation): finitely many rate values with
    probability weights summing to 1 - truncation.  Exact (truncation 0)
    for finite-support laws, Gauss-Legendre on the quantile scale for the
    rest.
    """
    if isinstance(dist, Constant):
        return np.array([scale * dist.value]), np.array([1.0]), 0.0
    if isinstance(dist, TwoPoint):
        rates = np.array([scale * dist.value_a, scale * dist.value_b])
        return rates, np.array([dist.prob_a, 1.0 - dist.prob_a]), 0.0
    hi = 1.0 - _QUANTILE_CUTOFF
    nodes, weights = np.polynomial.legendre.leggauss(_GL_NODES)
    u = 0.5 * hi * (nodes + 1.0)
    w = weights * (0.5 * hi)
    rates = scale * np.asarray(dist.ppf(u), dtype=np.float64)
    return rates, w, _QUANTILE_CUTOFF


def _mixed_poisson_pmf(dist, scale: float, r_max: int) -> tuple[np.ndarray, float]:
    """Pmf of a Poisson with random rate ``scale * W``; returns (probs, truncation)."""
    rates, weights, truncation = _mixing_nodes(dist, scale)
    probs = _poisson_rows(r_max, rates) @ weights
    return probs, truncation


def limit_degree_pmf(params: LimitDegreeParams, r_max: int) -> LimitPmf:
    """Pmf of the limiting degree law, truncated to 0..r_max.

    In the Balanced regime the compound law is assembled by iterated
    convolution, which is exact below r_max for exact inputs: the entry
    at r only ever reads supplier-count probabilities at indices <= r.
    """
    _require(r_max >= 0, f"r_max must be nonnegative, got {r_max!r}")
    regime = params.regime

    if isinstance(regime, Vanishing):
        probs = np.zeros(r_max + 1)
        probs[0] = 1.0
        return LimitPmf(probs=probs, tail_mass=0.0, mixture_truncation=0.0)

    other_mean = params.other_mean
    _finite("mean of the opposite weight", other_mean)

    if isinstance(regime, AttributeRich):
        h2 = params.z_dist.moment(2)
        _finite("h2", h2)
        probs, trunc = _mixed_poisson_pmf(params.own_dist, other_mean * h2, r_max)
        return LimitPmf(
            probs=probs,
            tail_mass=max(0.0, 1.0 - float(probs.sum())),
            mixture_truncation=trunc,
        )

    # Balanced: a mixed-Poisson count of demanded attributes, each with an
    # independent downshifted size-biased mixed-Poisson supplier count.
    beta = regime.beta
    h1 = params.z_dist.moment(1)
    _finite("h1", h1)
    scale1 = math.sqrt(beta) * h1
    scale2 = other_mean / math.sqrt(beta)

    # Downshifting a mixed Poisson size-biases its mixing law.
    supplier_dist = params.z_dist.size_biased()
    w_probs, w_trunc = _mixed_poisson_pmf(supplier_dist, scale2, r_max)

    count_probs, c_trunc = _attribute_count_pmf(params.own_dist, scale1)

    probs = np.zeros(r_max + 1)
    probs[0] = count_probs[0]
    conv = np.zeros(r_max + 1)
    conv[0] = 1.0
    for k in range(1, count_probs.size):
        conv = np.convolve(conv, w_probs)[: r_max + 1]
        probs += count_probs[k] * conv
        if not conv.any():
            break

    return LimitPmf(
        probs=probs,
        tail_mass=max(0.0, 1.0 - float(probs.sum())),
        mixture_truncation=w_trunc + c_trunc,
    )


def _attribute_count_pmf(dist, scale: float) -> tuple[np.ndarray, float]:
    """Pmf of the demanded-attribute count, extended until its tail is dust."""
    size = 64
    while True:
        probs, trunc = _mixed_poisson_pmf(dist, scale, size)
        remaining = 1.0 - float(probs.sum())
        if remaining <= _LAMBDA1_TAIL or size >= _LAMBDA1_CAP:
            return probs, trunc + max(0.0, remaining)
        size *= 2


def sample_limit_degree(params: LimitDegreeParams, rng: np.random.Generator, size=None):
    """Draw from the limiting degree law by direct construction.

    The Balanced draw follows the law's definition: a mixed-Poisson count
    of demanded attributes, then one downshifted size-biased supplier
    count per attribute, summed.  Returns a scalar int when ``size`` is
    None, else an int64 array.
    """
    scalar = size is None
    count = 1 if scalar else int(size)
    regime = params.regime

    if isinstance(regime, Vanishing):
        out = np.zeros(count, dtype=np.int64)
        return int(out[0]) if scalar else out

    other_mean = params.other_mean
    _finite("mean of the opposite weight", other_mean)

    if isinstance(regime, AttributeRich):
        h2 = params.z_dist.moment(2)
        _finite("h2", h2)
        own = params.own_dist.ppf(rng.random(count))
        out = rng.poisson(other_mean * h2 * np.asarray(own)).astype(np.int64)
        return int(out[0]) if scalar else out

    beta = regime.beta
    h1 = params.z_dist.moment(1)
    _finite("h1", h1)
    own = np.asarray(params.own_dist.ppf(rng.random(count)), dtype=np.float64)
    k = rng.poisson(math.sqrt(beta) * h1 * own)
    total_terms = int(k.sum())
    supplier_dist = params.z_dist.size_biased()
    z_sb = np.asarray(supplier_dist.ppf(rng.random(total_terms)), dtype=np.float64)
    contributions = rng.poisson((other_mean / math.sqrt(beta)) * z_sb)
    out = np.zeros(count, dtype=np.int64)
    np.add.at(out, np.repeat(np.arange(count), k), contributions)
    return int(out[0]) if scalar else out


def downshifted_size_biased_pmf(base_probs: np.ndarray) -> np.ndarray:
    """P(r) = (r+1) P_base(r+1) / E[base]: the follower's-eye view of a count.

    Independent of the mixed-Poisson shortcut used elsewhere; exists so
    the two constructions can be cross-checked.
    """
    base = np.asarray(base_probs, dtype=np.float64)
    _require(base.size >= 2, "need at least two pmf entries to downshift")
    _require(float(base.min()) >= 0.0, "pmf entries must be nonnegative")
    mean = float(np.arange(base.size) @ base)
    _require(mean > 0.0, "cannot downshift a law with zero mean")
    rs = np.arange(1, base.size)
    return rs * base[1:] / mean
