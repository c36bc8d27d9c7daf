"""Fitness-weight distributions for actors and attributes.

Actors carry a demand weight ``x`` and a supply weight ``y``; attributes
carry a single weight ``z``.  The menu below is small on purpose: every
member has strictly positive support, a monotone quantile function, and
moments that can be written down exactly, which keeps the limit formulas
elsewhere in the package free of estimation error.

Cross moments of the pair ``(X, Y)`` are likewise computed analytically
where a closed form is tidy, and by deterministic adaptive quadrature
otherwise; they are never estimated by simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np
from scipy import integrate, special

from .rng import (
    TAG_ATTRIBUTE_WEIGHTS,
    TAG_NODE_WEIGHTS_SHARED,
    TAG_NODE_WEIGHTS_X,
    TAG_NODE_WEIGHTS_Y,
    StreamRoot,
)

_QUAD_OPTS = {"epsabs": 1e-11, "epsrel": 1e-11, "limit": 200}


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a finite positive number, got {value!r}")
    return value


def _check_order(order: int) -> int:
    if order not in (1, 2, 3, 4):
        raise ValueError(f"moment order must be in 1..4, got {order!r}")
    return order


@dataclass(frozen=True)
class Constant:
    """Point mass at ``value``."""

    value: float

    def __post_init__(self):
        _positive("value", self.value)

    def ppf(self, u):
        return np.full_like(np.asarray(u, dtype=np.float64), self.value)

    def sf(self, t: float) -> float:
        return 1.0 if t < self.value else 0.0

    def moment(self, order: int) -> float:
        return self.value ** _check_order(order)

    def size_biased(self) -> "Constant":
        return self


@dataclass(frozen=True)
class Exponential:
    """Exponential distribution with the given ``rate`` (mean ``1/rate``)."""

    rate: float

    def __post_init__(self):
        _positive("rate", self.rate)

    def ppf(self, u):
        # Clamp away the single representable u == 0.0 so the quantile stays
        # strictly positive; attribute weights must never be exactly zero.
        u = np.maximum(np.asarray(u, dtype=np.float64), 2.0**-53)
        return -np.log1p(-u) / self.rate

    def sf(self, t: float) -> float:
        return math.exp(-self.rate * t) if t > 0 else 1.0

    def moment(self, order: int) -> float:
        return math.factorial(_check_order(order)) / self.rate**order

    def size_biased(self) -> "_GammaShapeTwo":
        return _GammaShapeTwo(self.rate)


@dataclass(frozen=True)
class _GammaShapeTwo:
    """Gamma with shape 2: the size-biased companion of ``Exponential``."""

    rate: float

    def ppf(self, u):
        u = np.asarray(u, dtype=np.float64)
        return special.gammaincinv(2.0, u) / self.rate

    def moment(self, order: int) -> float:
        return math.factorial(_check_order(order) + 1) / self.rate**order


@dataclass(frozen=True)
class Pareto:
    """Pareto with left endpoint ``scale`` and exponent ``tail_index``."""

    scale: float
    tail_index: float

    def __post_init__(self):
        _positive("scale", self.scale)
        _positive("tail_index", self.tail_index)

    def ppf(self, u):
        u = np.asarray(u, dtype=np.float64)
        return self.scale * (1.0 - u) ** (-1.0 / self.tail_index)

    def sf(self, t: float) -> float:
        if t <= self.scale:
            return 1.0
        return (self.scale / t) ** self.tail_index

    def moment(self, order: int) -> float:
        order = _check_order(order)
        if self.tail_index <= order:
            return math.inf
        return self.tail_index * self.scale**order / (self.tail_index - order)

    def size_biased(self) -> "Pareto":
        if self.tail_index <= 1.0:
            raise ValueError(
                "size-biased Pareto needs tail_index > 1 (the mean must be finite)"
            )
        return Pareto(self.scale, self.tail_index - 1.0)


@dataclass(frozen=True)
class TwoPoint:
    """Two-point distribution: ``value_a`` with ``prob_a``, else ``value_b``."""

    value_a: float
    value_b: float
    prob_a: float

    def __post_init__(self):
        _positive("value_a", self.value_a)
        _positive("value_b", self.value_b)
        if not 0.0 <= self.prob_a <= 1.0:
            raise ValueError(f"prob_a must lie in [0, 1], got {self.prob_a!r}")

    def _ordered(self) -> tuple[float, float, float]:
        """(low value, its probability, high value); ties collapse to low."""
        if self.value_a <= self.value_b:
            return self.value_a, self.prob_a, self.value_b
        return self.value_b, 1.0 - self.prob_a, self.value_a

    def ppf(self, u):
        lo, p_lo, hi = self._ordered()
        u = np.asarray(u, dtype=np.float64)
        return np.where(u < p_lo, lo, hi)

    def sf(self, t: float) -> float:
        lo, p_lo, hi = self._ordered()
        if t < lo:
            return 1.0
        if t < hi:
            return 1.0 - p_lo
        return 0.0

    def moment(self, order: int) -> float:
        order = _check_order(order)
        return self.prob_a * self.value_a**order + (1.0 - self.prob_a) * self.value_b**order

    def size_biased(self) -> "TwoPoint":
        mean = self.moment(1)
        return TwoPoint(self.value_a, self.value_b, self.prob_a * self.value_a / mean)


WeightDist = Union[Constant, Exponential, Pareto, TwoPoint]


class Coupling(str, Enum):
    """Joint law of an actor's demand/supply pair given the marginals."""

    INDEPENDENT = "independent"
    COMONOTONE = "comonotone"


@dataclass(frozen=True)
class NodeWeightConfig:
    """Marginals and coupling for the per-actor weight pair ``(X, Y)``.

    Under ``COMONOTONE`` both marginals are driven by one shared uniform,
    so identical marginals yield ``x == y`` exactly, actor by actor.
    """

    x_dist: WeightDist
    y_dist: WeightDist
    coupling: Coupling = Coupling.INDEPENDENT


@dataclass(frozen=True)
class WeightSample:
    """Realized weights: ``xy`` with shape (n, 2), ``z`` with shape (m,)."""

    xy: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        xy = np.ascontiguousarray(np.asarray(self.xy, dtype=np.float64))
        z = np.ascontiguousarray(np.asarray(self.z, dtype=np.float64))
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise ValueError(f"xy must have shape (n, 2), got {xy.shape}")
        if z.ndim != 1:
            raise ValueError(f"z must be one-dimensional, got shape {z.shape}")
        if xy.size and xy.min() < 0.0:
            raise ValueError("node weights must be nonnegative")
        if z.size and z.min() <= 0.0:
            raise ValueError("attribute weights must be strictly positive")
        object.__setattr__(self, "xy", xy)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return self.xy.shape[0]

    @property
    def m(self) -> int:
        return self.z.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.xy[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.xy[:, 1]


def draw_weight_sample(
    config: NodeWeightConfig, z_dist: WeightDist, n: int, m: int, root: StreamRoot
) -> WeightSample:
    """Sample all model weights for one replicate from tagged sub-streams."""
    return WeightSample(
        xy=sample_node_weights(config, n, root),
        z=sample_attribute_weights(z_dist, m, root),
    )


def sample_node_weights(config: NodeWeightConfig, n: int, root: StreamRoot) -> np.ndarray:
    """Draw the demand/supply weight pairs for ``n`` actors.

    Parameters
    ----------
    config : NodeWeightConfig
        Marginal distributions and coupling.
    n : int
        Number of actors.
    root : StreamRoot
        Stream handle; tagged children of it drive all draws, so results
        depend only on ``root`` and ``config``, never on call order.

    Returns
    -------
    numpy.ndarray
        Array of shape ``(n, 2)``; column 0 is demand ``x``, column 1 is
        supply ``y``.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    out = np.empty((n, 2), dtype=np.float64)
    if config.coupling is Coupling.COMONOTONE:
        u = root.child(TAG_NODE_WEIGHTS_SHARED).generator().random(n)
        out[:, 0] = config.x_dist.ppf(u)
        out[:, 1] = config.y_dist.ppf(u)
    else:
        ux = root.child(TAG_NODE_WEIGHTS_X).generator().random(n)
        uy = root.child(TAG_NODE_WEIGHTS_Y).generator().random(n)
        out[:, 0] = config.x_dist.ppf(ux)
        out[:, 1] = config.y_dist.ppf(uy)
    return out


def sample_attribute_weights(dist: WeightDist, m: int, root: StreamRoot) -> np.ndarray:
    """Draw the ``m`` attribute weights ``z``; all entries are positive."""
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    u = root.child(TAG_ATTRIBUTE_WEIGHTS).generator().random(m)
    z = np.asarray(dist.ppf(u), dtype=np.float64)
    if z.size and z.min() <= 0.0:
        raise ValueError("attribute weights must be strictly positive")
    return z


# ---------------------------------------------------------------------------
# Cross moments of the pair (X, Y).
# ---------------------------------------------------------------------------


def cross_moment_xy(config: NodeWeightConfig) -> float:
    """E[X Y] under the configured coupling (may be ``inf``)."""
    dx, dy = config.x_dist, config.y_dist
    if config.coupling is Coupling.INDEPENDENT:
        return dx.moment(1) * dy.moment(1)
    return _comonotone_xy(dx, dy)


def cross_moment_min(config: NodeWeightConfig) -> float:
    """E[min(X, Y)] under the configured coupling (may be ``inf``)."""
    dx, dy = config.x_dist, config.y_dist
    if config.coupling is Coupling.INDEPENDENT:
        return _independent_min(dx, dy)
    return _comonotone_min(dx, dy)


def _emin_against_constant(c: float, dist: WeightDist) -> float:
    """E[min(c, D)]; the coupling cannot matter against a point mass."""
    if isinstance(dist, Constant):
        return min(c, dist.value)
    if isinstance(dist, TwoPoint):
        return dist.prob_a * min(c, dist.value_a) + (1.0 - dist.prob_a) * min(c, dist.value_b)
    if isinstance(dist, Exponential):
        return -math.expm1(-dist.rate * c) / dist.rate
    if isinstance(dist, Pareto):
        s, a = dist.scale, dist.tail_index
        if c <= s:
            return c
        if a == 1.0:
            return s + s * math.log(c / s)
        return s + s * (1.0 - (s / c) ** (a - 1.0)) / (a - 1.0)
    raise TypeError(f"unsupported weight distribution {dist!r}")


def _independent_min(dx: WeightDist, dy: WeightDist) -> float:
    if isinstance(dx, Constant):
        return _emin_against_constant(dx.value, dy)
    if isinstance(dy, Constant):
        return _emin_against_constant(dy.value, dx)
    # A two-point marginal reduces to a mixture of the constant cases.
    if isinstance(dx, TwoPoint):
        p = dx.prob_a
        return p * _emin_against_constant(dx.value_a, dy) + (1.0 - p) * _emin_against_constant(
            dx.value_b, dy
        )
    if isinstance(dy, TwoPoint):
        return _independent_min(dy, dx)
    if isinstance(dx, Exponential) and isinstance(dy, Exponential):
        return 1.0 / (dx.rate + dy.rate)
    if isinstance(dx, Pareto) and isinstance(dy, Pareto):
        if dx.tail_index + dy.tail_index <= 1.0:
            return math.inf
    # Remaining continuous pairs: integrate the product of survival
    # functions.  The integrand has kinks at Pareto left endpoints, and
    # quad refuses breakpoints on an infinite interval, so integrate each
    # segment separately and let only the last one run to infinity.
    kinks = sorted(d.scale for d in (dx, dy) if isinstance(d, Pareto))
    integrand = lambda t: dx.sf(t) * dy.sf(t)
    total = 0.0
    lower = 0.0
    for kink in kinks:
        if kink > lower:
            part, _ = integrate.quad(integrand, lower, kink, **_QUAD_OPTS)
            total += part
            lower = kink
    tail, _ = integrate.quad(integrand, lower, math.inf, **_QUAD_OPTS)
    return total + tail


def _comonotone_xy(dx: WeightDist, dy: WeightDist) -> float:
    if isinstance(dx, Constant):
        return dx.value * dy.moment(1)
    if isinstance(dy, Constant):
        return dy.value * dx.moment(1)
    if dx == dy:
        return dx.moment(2)
    if isinstance(dx, Exponential) and isinstance(dy, Exponential):
        return 2.0 / (dx.rate * dy.rate)
    if isinstance(dx, Pareto) and isinstance(dy, Pareto):
        inv = 1.0 / dx.tail_index + 1.0 / dy.tail_index
        if inv >= 1.0:
            return math.inf
        return dx.scale * dy.scale / (1.0 - inv)
    if isinstance(dx, Exponential) and isinstance(dy, Pareto):
        dx, dy = dy, dx
    if isinstance(dx, Pareto) and isinstance(dy, Exponential):
        # s * a^2 / (rate * (a-1)^2), from integrating the quantile product.
        a = dx.tail_index
        if a <= 1.0:
            return math.inf
        return dx.scale * a * a / (dy.rate * (a - 1.0) ** 2)
    if math.isinf(dx.moment(1)) or math.isinf(dy.moment(1)):
        return math.inf
    return _quantile_quad(dx, dy, lambda qx, qy: qx * qy)


def _comonotone_min(dx: WeightDist, dy: WeightDist) -> float:
    if isinstance(dx, Constant):
        return _emin_against_constant(dx.value, dy)
    if isinstance(dy, Constant):
        return _emin_against_constant(dy.value, dx)
    if dx == dy:
        return dx.moment(1)
    if isinstance(dx, Exponential) and isinstance(dy, Exponential):
        return 1.0 / max(dx.rate, dy.rate)
    if isinstance(dx, Pareto) and isinstance(dy, Pareto) and math.isinf(
        min(dx.moment(1), dy.moment(1))
    ):
        # The pointwise-smaller quantile still has a divergent integral.
        return math.inf
    return _quantile_quad(dx, dy, min)


def _quantile_quad(dx: WeightDist, dy: WeightDist, combine) -> float:
    """Integrate ``combine(qx(u), qy(u))`` over the unit interval."""
    points = set()
    for d in (dx, dy):
        if isinstance(d, TwoPoint):
            points.add(d._ordered()[1])

    def integrand(u: float) -> float:
        return combine(_ppf_scalar(dx, u), _ppf_scalar(dy, u))

    value, _ = integrate.quad(
        integrand, 0.0, 1.0, points=sorted(points) or None, **_QUAD_OPTS
    )
    return value


def _ppf_scalar(dist: WeightDist, u: float) -> float:
    return float(dist.ppf(np.float64(u)))
