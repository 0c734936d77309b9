"""Rate function of moment-matching (MM) estimators.

``J_{theta0}(theta) = Lambda*_{theta0}(mu(theta))`` where ``Lambda*`` is the
Legendre transform of the cumulant generating function of ``F_{theta0}``.
Closed forms are used where they exist; otherwise the transform is computed
numerically from the (closed-form or quadrature) CGF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._numerics import golden_max
from .distributions import (FamilyId, FamilySpec, MMApplicability, ParetoFamily,
                            TailClass, _expm1_minus_id)
from .errors import DomainError, MMInapplicableError, MMUndefinedError
from .mq_rate import RateCurve

INF = math.inf


@dataclass(frozen=True)
class MmRateContext:
    family: FamilySpec
    theta0: float
    exploratory: bool = False

    def __post_init__(self):
        object.__setattr__(self, "theta0", self.family.check_theta(self.theta0))

    @property
    def applicability(self) -> MMApplicability:
        return self.family.mm_applicability

    @property
    def tail_class(self) -> TailClass:
        return self.family.tail_class

    @property
    def good(self) -> bool:
        """Whether the transform is a good rate function (light tails only)."""
        return self.tail_class is TailClass.LIGHT


def _require_mm(ctx: MmRateContext):
    fam = ctx.family
    if ctx.applicability is MMApplicability.UNDEFINED:
        raise MMUndefinedError(f"no moment-matching estimator for {fam.label}")
    if isinstance(fam, ParetoFamily):
        if not ctx.exploratory:
            raise MMInapplicableError(
                "pareto: the transform is not a good rate function and no LDP for the "
                "moment estimator follows; pass exploratory=True for the naive value")
        if not ctx.theta0 < 1.0:
            raise MMUndefinedError("pareto mean is infinite for theta >= 1")


def cgf(ctx: MmRateContext, gamma: float) -> float:
    """``Lambda_{theta0}(gamma)``; ``inf`` outside its finiteness region."""
    if ctx.tail_class is TailClass.UNDEFINED:
        raise MMUndefinedError(f"{ctx.family.label} has no finite mean")
    return ctx.family.cgf(ctx.theta0, gamma)


def _centered_cgf(ctx, gamma):
    return ctx.family.cgf_centered_value(ctx.theta0, gamma)


def _legendre_centered(ctx: MmRateContext, d: float, sd: float) -> float:
    """``sup_gamma {gamma d - Lambda_c(gamma)}`` for a centred offset ``d``."""
    if d == 0.0:
        return 0.0
    s = 1.0 if d > 0 else -1.0
    lo, hi = ctx.family.cgf_domain(ctx.theta0)
    edge = hi if s > 0 else -lo
    if edge <= 0.0:
        # one-sided CGF: the supremum is approached as gamma -> 0
        return 0.0

    def phi(a):
        val = s * a * d - _centered_cgf(ctx, s * a)
        return val if math.isfinite(val) else -INF

    a = min(abs(d) / (sd * sd), 0.5 * edge)
    left, prev, f_prev = 0.0, 0.0, 0.0
    for _ in range(400):
        fa = phi(a)
        if fa < f_prev:
            break
        left, prev, f_prev = prev, a, fa
        nxt = 2.0 * a
        if nxt >= edge:
            nxt = 0.5 * (a + edge)
        if nxt - a <= 1e-15 * max(1.0, a):
            # supremum at the boundary of the finiteness region
            return max(f_prev, 0.0)
        a = nxt
    _, fx = golden_max(phi, left, a, tol=1e-10 * a / max(1.0, a))
    return max(fx, f_prev, 0.0)


def legendre(ctx: MmRateContext, x: float) -> float:
    """``Lambda*_{theta0}(x) = sup_gamma {gamma x - Lambda_{theta0}(gamma)}``.

    Returns ``inf`` for x outside the open support and 0 on the side where a
    heavy tail makes the CGF infinite.
    """
    if ctx.tail_class is TailClass.UNDEFINED:
        raise MMUndefinedError(f"{ctx.family.label} has no finite mean")
    fam = ctx.family
    lo, hi = fam.support(ctx.theta0)
    x = float(x)
    if not (lo < x < hi):
        return INF
    m0 = fam.mean(ctx.theta0)
    try:
        sd = math.sqrt(fam.variance(ctx.theta0))
    except MMUndefinedError:
        sd = abs(m0) + 1.0
    return _legendre_centered(ctx, x - m0, sd)


def _closed_form_rate(ctx, theta):
    fam, t0 = ctx.family, ctx.theta0
    if fam.id is FamilyId.WEIBULL_SCALE and fam.fixed_params["rho"] == 1.0:
        u = math.log(theta / t0)
        return float(_expm1_minus_id(u))
    if fam.id is FamilyId.NORMAL_LOC:
        return 0.5 * ((theta - t0) / fam.fixed_params["s"]) ** 2
    return None


def mm_rate(ctx: MmRateContext, theta: float) -> float:
    """``J_{theta0}(theta) = Lambda*_{theta0}(mu(theta))``."""
    _require_mm(ctx)
    fam = ctx.family
    theta = fam.check_theta(theta)
    if theta == ctx.theta0:
        return 0.0
    if isinstance(fam, ParetoFamily) and theta >= 1.0:
        raise MMUndefinedError("pareto mean is infinite for theta >= 1")
    closed = _closed_form_rate(ctx, theta)
    if closed is not None:
        return closed
    return legendre(ctx, fam.mean(theta))


def mm_rate_many(ctx: MmRateContext, thetas) -> np.ndarray:
    return np.array([mm_rate(ctx, t) for t in np.asarray(thetas, dtype=float)])


def mm_rate_curve(ctx: MmRateContext, thetas) -> RateCurve:
    thetas = np.asarray(thetas, dtype=float)
    meta = {"family": ctx.family.label, "theta0": ctx.theta0, "estimator": "mm",
            "applicability": ctx.applicability.value, "tail_class": ctx.tail_class.value}
    if ctx.exploratory:
        meta["exploratory"] = True
    return RateCurve(thetas, mm_rate_many(ctx, thetas), "mm", meta)


def mm_curvature(ctx: MmRateContext) -> float:
    """``mu'(theta0)^2 / sigma^2(theta0)``.

    For heavy-tailed Weibull this is the left second derivative; the right
    side of the rate is identically zero.
    """
    _require_mm(ctx)
    fam, t0 = ctx.family, ctx.theta0
    if isinstance(fam, ParetoFamily) and not t0 < 0.5:
        raise MMUndefinedError("pareto variance is infinite for theta >= 1/2")
    return fam.mean_prime(t0) ** 2 / fam.variance(t0)


def _check_normal_scale(family):
    if family is not None and family.id is not FamilyId.NORMAL_SCALE:
        raise DomainError("variance-matching rate is only available for normal-scale")


def gmm_normal_scale_rate(theta0: float, theta: float, family: FamilySpec | None = None) -> float:
    """Rate of the variance-matching estimator for the normal-scale family.

    ``(r - 1 - log r) / 2`` with ``r = theta^2 / theta0^2``, for every eta.
    """
    _check_normal_scale(family)
    theta0 = float(theta0)
    if not theta0 > 0.0:
        raise DomainError("theta0 must be positive")
    theta = float(theta)
    if not theta > 0.0:
        return INF
    u = 2.0 * math.log(theta / theta0)
    return 0.5 * float(_expm1_minus_id(u))


def gmm_normal_scale_curvature(theta0: float, family: FamilySpec | None = None) -> float:
    _check_normal_scale(family)
    theta0 = float(theta0)
    if not theta0 > 0.0:
        raise DomainError("theta0 must be positive")
    return 2.0 / theta0 ** 2


def gmm_rate_curve(theta0: float, thetas, family: FamilySpec | None = None) -> RateCurve:
    thetas = np.asarray(thetas, dtype=float)
    vals = np.array([gmm_normal_scale_rate(theta0, t, family) for t in thetas])
    meta = {"family": family.label if family is not None else "normal-scale",
            "theta0": float(theta0), "estimator": "gmm"}
    return RateCurve(thetas, vals, "gmm", meta)
