"""Rate function of quantile-matching (MQ) estimators and its curvature.

For a level ``lam`` and true parameter ``theta0`` the rate is the Bernoulli
relative entropy ``H(lam | h(theta))`` with
``h(theta) = F_{theta0}(F_theta^{-1}(lam))``; it is infinite when the
quantile ``F_theta^{-1}(lam)`` leaves the support of ``F_{theta0}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import (FamilySpec, LocationFamily, ParetoFamily,
                            RightEndpointFamily, ScaleFamily, SkewFamily)
from .errors import DomainError

INF = math.inf
_NOT_ALLOWED_TOL = 1e-12


@dataclass(frozen=True)
class MqRateContext:
    family: FamilySpec
    theta0: float
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "theta0", self.family.check_theta(self.theta0))
        lam = float(self.lam)
        if not (0.0 < lam < 1.0):
            raise DomainError(f"level {lam} must lie in (0, 1)")
        object.__setattr__(self, "lam", lam)

    @property
    def not_allowed_level(self) -> bool:
        """True at ``lam = G(0)`` for scale families supported on the whole line.

        There every quantile ``theta * G^{-1}(lam)`` is 0 and the level carries
        no information about theta.
        """
        return bool(_is_not_allowed(self.family, self.lam))


def _is_not_allowed(family, lam):
    if not isinstance(family, ScaleFamily) or family.shape.support[0] != -INF:
        return np.zeros_like(np.asarray(lam, dtype=float), dtype=bool)
    return np.abs(np.asarray(lam, dtype=float) - float(family.shape.cdf(0.0))) <= _NOT_ALLOWED_TOL


@dataclass
class RateCurve:
    thetas: np.ndarray
    values: np.ndarray
    label: str
    meta: dict = field(default_factory=dict)

    def rows(self):
        return list(zip(self.thetas.tolist(), self.values.tolist()))


def entropy_bernoulli(p: float, q: float) -> float:
    """Relative entropy of Bernoulli(p) with respect to Bernoulli(q).

    ``q`` equal to exactly 0 or 1 gives ``inf``; anything else outside
    (0, 1) raises DomainError.
    """
    p, q = float(p), float(q)
    if not (0.0 < p < 1.0):
        raise DomainError(f"p={p} must lie in (0, 1)")
    if q == 0.0 or q == 1.0:
        return INF
    if not (0.0 < q < 1.0):
        raise DomainError(f"q={q} must lie in [0, 1]")
    d = q - p
    # log1p form keeps relative accuracy when q is close to p
    return -p * math.log1p(d / p) - (1.0 - p) * math.log1p(-d / (1.0 - p))


def _entropy_logs(p, log_q, log_1mq):
    """``H(p|q)`` from ``log q`` and ``log(1-q)`` (for q near 0 or 1)."""
    out = 0.0
    if p > 0.0:
        out += p * (math.log(p) - log_q)
    if p < 1.0:
        out += (1.0 - p) * (math.log1p(-p) - log_1mq)
    return max(out, 0.0)


def _quantile_in_truth_support(ctx: MqRateContext, theta):
    fam = ctx.family
    theta = fam.check_theta(theta)
    x = fam.quantile(theta, ctx.lam)
    lo, hi = fam.support(ctx.theta0)
    return x if lo < x < hi else None


def h_value(ctx: MqRateContext, theta) -> float | None:
    """``F_{theta0}(F_theta^{-1}(lam))``, or None when the quantile leaves the support."""
    if float(theta) == ctx.theta0:
        ctx.family.check_theta(theta)
        return ctx.lam
    x = _quantile_in_truth_support(ctx, theta)
    if x is None:
        return None
    return ctx.family.cdf(ctx.theta0, x)


def mq_rate(ctx: MqRateContext, theta) -> float:
    """``H(lam | h(theta))``; ``inf`` outside the attainable range, 0 at theta0."""
    if float(theta) == ctx.theta0:
        ctx.family.check_theta(theta)
        return 0.0
    x = _quantile_in_truth_support(ctx, theta)
    if x is None:
        return INF
    lam = ctx.lam
    h = ctx.family.cdf(ctx.theta0, x)
    if 1e-15 < h < 1.0 - 1e-15:
        return entropy_bernoulli(lam, h)
    return _entropy_logs(lam, ctx.family.logcdf(ctx.theta0, x),
                         ctx.family.logsf(ctx.theta0, x))


def mq_rate_many(ctx: MqRateContext, thetas) -> np.ndarray:
    return np.array([mq_rate(ctx, t) for t in np.asarray(thetas, dtype=float)])


def rate_curve(ctx: MqRateContext, thetas) -> RateCurve:
    thetas = np.asarray(thetas, dtype=float)
    meta = {"family": ctx.family.label, "theta0": ctx.theta0, "lambda": ctx.lam,
            "estimator": "mq"}
    return RateCurve(thetas, mq_rate_many(ctx, thetas), "mq", meta)


def curvature_levels(family: FamilySpec, theta0: float, lams) -> np.ndarray | float:
    """Closed-form ``I''_{lam,theta0}(theta0)`` for an array of levels.

    Returns 0 at the not-allowed level of full-support scale families.
    """
    theta0 = family.check_theta(theta0)
    lam = np.asarray(lams, dtype=float)
    if not np.all((lam > 0.0) & (lam < 1.0)):
        raise DomainError("levels must lie in (0, 1)")
    v = lam * (1.0 - lam)
    with np.errstate(all="ignore"):
        if isinstance(family, ScaleFamily):
            G = family.shape
            q = G.quantile(lam)
            out = (G.pdf(q) * q) ** 2 / (v * theta0 ** 2)
            out = np.where(_is_not_allowed(family, lam) | (q == 0.0), 0.0, out)
        elif isinstance(family, LocationFamily):
            G = family.shape
            out = G.pdf(G.quantile(lam)) ** 2 / v
        elif isinstance(family, SkewFamily):
            G, t = family.shape, theta0
            lower = lam <= 0.5 * (1.0 + t)
            p_lo = np.where(lower, lam / (1.0 + t), 0.5)
            q_lo = G.quantile(p_lo)
            d_lo = G.pdf(q_lo) * q_lo - p_lo
            p_up = np.where(lower, 0.5, (lam - t) / (1.0 - t))
            q_up = G.quantile(p_up)
            d_up = -G.pdf(q_up) * q_up + (lam - 1.0) / (1.0 - t)
            out = np.where(lower, d_lo, d_up) ** 2 / v
        elif isinstance(family, ParetoFamily):
            out = (1.0 - lam) * np.log1p(-lam) ** 2 / (lam * theta0 ** 2)
        elif isinstance(family, RightEndpointFamily):
            g = family.g
            out = lam * float(g.g_prime(theta0)) ** 2 / ((1.0 - lam) * float(g.g(theta0)) ** 2)
        else:
            raise DomainError(f"no curvature formula for {family.id.value}")
    out = np.asarray(out, dtype=float)
    return float(out) if lam.ndim == 0 else out


def mq_curvature(ctx: MqRateContext) -> float:
    """``I''_{lam,theta0}(theta0) = h'(theta0)^2 / (lam (1 - lam))`` in closed form."""
    return float(curvature_levels(ctx.family, ctx.theta0, ctx.lam))


def mq_rate_lambda1_right_endpoint(family: FamilySpec, theta0: float, theta: float) -> float:
    """Rate of the sample maximum as an estimator of a right-endpoint parameter.

    ``log(G(theta0) / G(theta))`` for ``0 < theta <= theta0``, ``inf`` above.
    """
    if not isinstance(family, RightEndpointFamily):
        raise DomainError("the maximum-order-statistic rate needs a right-endpoint family")
    theta0 = family.check_theta(theta0)
    theta = family.check_theta(theta)
    if theta > theta0:
        return INF
    if theta == theta0:
        return 0.0
    g = family.g
    return math.log(float(g.g(theta0))) - math.log(float(g.g(theta)))
