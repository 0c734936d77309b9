"""Parametric one-parameter families of distributions.

Every family exposes the pieces the rate-function code needs: support, CDF,
survival function (kept separate for accuracy in the upper tail), quantile,
density, moments and the centred cumulant generating function where a closed
form exists.  Callables accept scalar ``theta`` and scalar or array ``x`` /
``lam`` arguments.

Families
--------
scale (``F_theta(x) = G(x / theta)``)
    weibull-scale, normal-scale, cauchy-scale, logistic-scale, gumbel-scale
location (``F_theta(x) = G(x - theta)``)
    normal-loc, cauchy-loc, logistic-loc, gumbel-loc, gtilde
skewness (epsilon-skew split of a symmetric G at 0)
    skew-normal, skew-cauchy, skew-logistic
pareto
    ``F_theta(x) = 1 - x**(-1/theta)`` on ``(1, inf)``
right-endpoint
    ``F_theta(x) = G(x) / G(theta)`` on ``(0, theta)`` for
    G in {identity, exp-minus-one, power}
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import special
from scipy.optimize import brentq

from .errors import DomainError, MMUndefinedError

EULER_GAMMA = 0.57721566490153286061
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_INF = math.inf


class FamilyId(str, enum.Enum):
    WEIBULL_SCALE = "weibull-scale"
    NORMAL_SCALE = "normal-scale"
    CAUCHY_SCALE = "cauchy-scale"
    LOGISTIC_SCALE = "logistic-scale"
    GUMBEL_SCALE = "gumbel-scale"
    NORMAL_LOC = "normal-loc"
    CAUCHY_LOC = "cauchy-loc"
    LOGISTIC_LOC = "logistic-loc"
    GUMBEL_LOC = "gumbel-loc"
    SKEW_NORMAL = "skew-normal"
    SKEW_CAUCHY = "skew-cauchy"
    SKEW_LOGISTIC = "skew-logistic"
    PARETO = "pareto"
    RIGHT_ENDPOINT = "right-endpoint"
    GTILDE = "gtilde"


class MMApplicability(str, enum.Enum):
    CLOSED_FORM_GOOD = "closed_form_good"
    NUMERIC_GOOD = "numeric_good"
    NOT_GOOD = "not_good"
    UNDEFINED = "undefined"


class TailClass(str, enum.Enum):
    LIGHT = "light"
    HEAVY = "heavy"
    UNDEFINED = "undefined"


def _out(v):
    v = np.asarray(v, dtype=float)
    return float(v) if v.ndim == 0 else v


def _in_open(x, lo, hi) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(np.all((x > lo) & (x < hi)))


def _expm1_minus_id(u):
    """``expm1(u) - u`` without cancellation for small ``u``."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 0.1
    us = np.where(small, u, 0.0)
    series = us * us * (0.5 + us * (1 / 6 + us * (1 / 24 + us * (1 / 120 + us * (
        1 / 720 + us * (1 / 5040 + us * (1 / 40320 + us / 362880)))))))
    with np.errstate(over="ignore"):
        direct = np.expm1(u) - u
    return np.where(small, series, direct)


_ZETA = special.zeta(np.arange(2, 64, dtype=float))


def _zeta_series(t, k0, stride):
    """``sum_{j>=0} zeta(k0 + stride*j) t^(k0/stride + j) / (k0/stride + j)``.

    With ``(k0, stride) = (2, 1)`` this is ``lgamma(1-t) - t*euler``; with
    ``(2, 2)`` and ``t = x^2`` it is ``-log(sin(pi x) / (pi x))``.
    """
    total = 0.0
    n = k0 // stride
    tk = t ** n
    for k in range(k0, len(_ZETA) + 2, stride):
        term = _ZETA[k - 2] * tk / n
        total += term
        if abs(term) <= 1e-18 * abs(total):
            break
        n += 1
        tk *= t
    return total


def _zeta_free_series(g):
    """``-log(1-g) - g = sum_{k>=2} g^k / k`` for small ``g``."""
    total, gk, k = 0.0, g * g, 2
    while True:
        term = gk / k
        total += term
        if abs(term) <= 1e-18 * abs(total) or k > 80:
            return total
        k += 1
        gk *= g


def _em1_scalar(u: float) -> float:
    if abs(u) < 0.1:
        return u * u * (0.5 + u * (1 / 6 + u * (1 / 24 + u * (1 / 120 + u * (
            1 / 720 + u * (1 / 5040 + u * (1 / 40320 + u / 362880)))))))
    if u > 709.0:
        return _INF
    return math.expm1(u) - u


def log_sinhc(v):
    """``log(sinh(v) / v)``, stable for tiny and large ``|v|``."""
    v = abs(float(v))
    if v < 1e-2:
        v2 = v * v
        return math.log1p(v2 * (1 / 6 + v2 * (1 / 120 + v2 / 5040)))
    if v > 20.0:
        return v - math.log(2.0 * v) + math.log1p(-math.exp(-2.0 * v))
    return math.log(math.sinh(v) / v)


# ---------------------------------------------------------------------------
# Standard shapes G.  ``loc``/``scale`` are the fixed parameters of the family
# (eta for scale families, s for location and skew families).
# ---------------------------------------------------------------------------

class _Shape:
    support = (-_INF, _INF)
    symmetric = False
    heavy = False

    def logcdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.cdf(x))

    def logsf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.sf(x))

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))

    def mean(self):
        raise MMUndefinedError(f"{type(self).__name__} has no finite mean")

    def var(self):
        raise MMUndefinedError(f"{type(self).__name__} has no finite variance")

    # E[Y; Y > 0] and E[Y^2] for a symmetric shape centred at 0
    def upper_partial_mean(self):
        raise MMUndefinedError(f"{type(self).__name__} has no finite mean")

    def cgf_centered(self, gamma):
        return None

    def cgf_domain(self):
        return (-_INF, _INF)

    # scalar fast paths used inside quadrature loops
    def pdf1(self, x: float) -> float:
        return float(self.pdf(x))

    def logpdf1(self, x: float) -> float:
        with np.errstate(divide="ignore"):
            return float(self.logpdf(x))


@dataclass(frozen=True)
class _Weibull(_Shape):
    rho: float
    support = (0.0, _INF)

    @property
    def heavy(self):
        return self.rho < 1.0

    def cdf(self, x):
        return -np.expm1(-np.power(x, self.rho))

    def sf(self, x):
        return np.exp(-np.power(x, self.rho))

    def logsf(self, x):
        return -np.power(x, self.rho)

    def pdf(self, x):
        xr = np.power(x, self.rho)
        return self.rho * xr / x * np.exp(-xr)

    def logpdf(self, x):
        return math.log(self.rho) + (self.rho - 1.0) * np.log(x) - np.power(x, self.rho)

    def quantile(self, p):
        return np.power(-np.log1p(-np.asarray(p, dtype=float)), 1.0 / self.rho)

    def pdf1(self, x):
        if x <= 0.0:
            return 0.0
        xr = x ** self.rho
        return self.rho * xr / x * math.exp(-xr)

    def logpdf1(self, x):
        if x <= 0.0:
            return -_INF
        return math.log(self.rho) + (self.rho - 1.0) * math.log(x) - x ** self.rho

    def mean(self):
        return math.gamma(1.0 + 1.0 / self.rho)

    def var(self):
        return math.gamma(1.0 + 2.0 / self.rho) - math.gamma(1.0 + 1.0 / self.rho) ** 2

    def cgf_centered(self, gamma):
        if self.rho != 1.0:
            return None
        if gamma >= 1.0:
            return _INF
        if abs(gamma) < 0.25:
            return _zeta_free_series(gamma)
        return -math.log1p(-gamma) - gamma

    def cgf_domain(self):
        if self.rho < 1.0:
            return (-_INF, 0.0)
        if self.rho == 1.0:
            return (-_INF, 1.0)
        return (-_INF, _INF)


@dataclass(frozen=True)
class _Normal(_Shape):
    loc: float = 0.0
    scale: float = 1.0

    @property
    def symmetric(self):
        return self.loc == 0.0

    def _z(self, x):
        return (np.asarray(x, dtype=float) - self.loc) / self.scale

    def cdf(self, x):
        return special.ndtr(self._z(x))

    def sf(self, x):
        return special.ndtr(-self._z(x))

    def logcdf(self, x):
        return special.log_ndtr(self._z(x))

    def logsf(self, x):
        return special.log_ndtr(-self._z(x))

    def pdf(self, x):
        z = self._z(x)
        return np.exp(-0.5 * z * z) / (_SQRT_2PI * self.scale)

    def logpdf(self, x):
        z = self._z(x)
        return -0.5 * z * z - math.log(_SQRT_2PI * self.scale)

    def dpdf(self, x):
        return -self._z(x) / self.scale * self.pdf(x)

    def pdf1(self, x):
        z = (x - self.loc) / self.scale
        return math.exp(-0.5 * z * z) / (_SQRT_2PI * self.scale)

    def logpdf1(self, x):
        z = (x - self.loc) / self.scale
        return -0.5 * z * z - math.log(_SQRT_2PI * self.scale)

    def quantile(self, p):
        return self.loc + self.scale * special.ndtri(p)

    def mean(self):
        return self.loc

    def var(self):
        return self.scale ** 2

    def upper_partial_mean(self):
        return self.scale / _SQRT_2PI

    def cgf_centered(self, gamma):
        return 0.5 * (self.scale * gamma) ** 2


@dataclass(frozen=True)
class _Cauchy(_Shape):
    loc: float = 0.0
    scale: float = 1.0
    heavy = True

    @property
    def symmetric(self):
        return self.loc == 0.0

    def _z(self, x):
        return (np.asarray(x, dtype=float) - self.loc) / self.scale

    @staticmethod
    def _std_cdf(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            lower = -np.arctan(1.0 / z) / math.pi
        return np.where(z < -1.0, lower, 0.5 + np.arctan(z) / math.pi)

    def cdf(self, x):
        return self._std_cdf(self._z(x))

    def sf(self, x):
        return self._std_cdf(-self._z(x))

    def pdf(self, x):
        z = self._z(x)
        return 1.0 / (math.pi * self.scale * (1.0 + z * z))

    def dpdf(self, x):
        z = self._z(x)
        return -2.0 * z / (math.pi * self.scale ** 2 * (1.0 + z * z) ** 2)

    def quantile(self, p):
        return self.loc + self.scale * np.tan(math.pi * (np.asarray(p, dtype=float) - 0.5))


@dataclass(frozen=True)
class _Logistic(_Shape):
    loc: float = 0.0
    scale: float = 1.0

    @property
    def symmetric(self):
        return self.loc == 0.0

    def _z(self, x):
        return (np.asarray(x, dtype=float) - self.loc) / self.scale

    def cdf(self, x):
        return special.expit(self._z(x))

    def sf(self, x):
        return special.expit(-self._z(x))

    def logcdf(self, x):
        return special.log_expit(self._z(x))

    def logsf(self, x):
        return special.log_expit(-self._z(x))

    def pdf(self, x):
        z = self._z(x)
        return special.expit(z) * special.expit(-z) / self.scale

    def logpdf(self, x):
        z = self._z(x)
        return special.log_expit(z) + special.log_expit(-z) - math.log(self.scale)

    def dpdf(self, x):
        z = self._z(x)
        return self.pdf(x) * (special.expit(-z) - special.expit(z)) / self.scale

    def pdf1(self, x):
        e = math.exp(-abs((x - self.loc) / self.scale))
        return e / ((1.0 + e) ** 2 * self.scale)

    def logpdf1(self, x):
        a = abs((x - self.loc) / self.scale)
        return -a - 2.0 * math.log1p(math.exp(-a)) - math.log(self.scale)

    def quantile(self, p):
        return self.loc + self.scale * special.logit(p)

    def mean(self):
        return self.loc

    def var(self):
        return (math.pi * self.scale) ** 2 / 3.0

    def upper_partial_mean(self):
        return self.scale * math.log(2.0)

    def cgf_centered(self, gamma):
        t = self.scale * gamma
        if abs(t) >= 1.0:
            return _INF
        if abs(t) < 0.25:
            return _zeta_series(t * t, 2, 2)
        return -math.log(np.sinc(t))

    def cgf_domain(self):
        return (-1.0 / self.scale, 1.0 / self.scale)


@dataclass(frozen=True)
class _Gumbel(_Shape):
    loc: float = 0.0
    scale: float = 1.0

    def _z(self, x):
        return (np.asarray(x, dtype=float) - self.loc) / self.scale

    def _ez(self, x):
        # exp(-z) overflows to inf far in the left tail, which is the right limit
        with np.errstate(over="ignore"):
            return np.exp(-self._z(x))

    def cdf(self, x):
        return np.exp(-self._ez(x))

    def sf(self, x):
        return -np.expm1(-self._ez(x))

    def logcdf(self, x):
        return -self._ez(x)

    def pdf(self, x):
        z = self._z(x)
        with np.errstate(over="ignore", invalid="ignore"):
            v = np.exp(-z - self._ez(x)) / self.scale
        return np.where(np.isnan(v), 0.0, v)

    def logpdf(self, x):
        z = self._z(x)
        with np.errstate(over="ignore", invalid="ignore"):
            v = -z - self._ez(x) - math.log(self.scale)
        return np.where(np.isnan(v), -np.inf, v)

    def quantile(self, p):
        return self.loc - self.scale * np.log(-np.log(p))

    def logpdf1(self, x):
        z = (x - self.loc) / self.scale
        if z < -700.0:
            return -_INF
        return -z - math.exp(-z) - math.log(self.scale)

    def pdf1(self, x):
        v = self.logpdf1(x)
        return math.exp(v) if v > -745.0 else 0.0

    def mean(self):
        return self.loc + self.scale * EULER_GAMMA

    def var(self):
        return (math.pi * self.scale) ** 2 / 6.0

    def cgf_centered(self, gamma):
        t = self.scale * gamma
        if t >= 1.0:
            return _INF
        if abs(t) < 0.25:
            return _zeta_series(t, 2, 1)
        return math.lgamma(1.0 - t) - t * EULER_GAMMA

    def cgf_domain(self):
        return (-_INF, 1.0 / self.scale)


@dataclass(frozen=True)
class _GTilde(_Shape):
    """Three-piece symmetric shape with a linear middle on ``|x| < 1``."""
    base: Any
    symmetric = True

    @property
    def slope(self):
        a = float(self.base.pdf(0.0))
        return a / (2.0 * a + 1.0)

    @property
    def _den(self):
        return 2.0 * float(self.base.pdf(0.0)) + 1.0

    @property
    def heavy(self):
        return self.base.heavy

    @property
    def lower_break(self):
        """``G~(-1) = 1 / (2 (2 G'(0) + 1))``."""
        return 1.0 / (2.0 * self._den)

    @property
    def upper_break(self):
        a = float(self.base.pdf(0.0))
        return (4.0 * a + 1.0) / (2.0 * self._den)

    def _pieces(self, x, lower, middle, upper):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            lo = lower(np.minimum(x, -1.0))
            mid = middle(np.clip(x, -1.0, 1.0))
            up = upper(np.maximum(x, 1.0))
        return np.where(x <= -1.0, lo, np.where(x >= 1.0, up, mid))

    def cdf(self, x):
        a, d = float(self.base.pdf(0.0)), self._den
        return self._pieces(x, lambda t: self.base.cdf(1.0 + t) / d,
                            lambda t: 0.5 + a * t / d,
                            lambda t: (2.0 * a + self.base.cdf(t - 1.0)) / d)

    def sf(self, x):
        return self.cdf(-np.asarray(x, dtype=float))

    def pdf(self, x):
        d = self._den
        return self._pieces(x, lambda t: self.base.pdf(1.0 + t) / d,
                            lambda t: self.slope + 0.0 * t,
                            lambda t: self.base.pdf(t - 1.0) / d)

    def pdf1(self, x):
        d = self._den
        if x <= -1.0:
            return self.base.pdf1(1.0 + x) / d
        if x >= 1.0:
            return self.base.pdf1(x - 1.0) / d
        return self.slope

    def logpdf1(self, x):
        v = self.pdf1(x)
        return math.log(v) if v > 0.0 else -_INF

    def dpdf(self, x):
        d = self._den
        return self._pieces(x, lambda t: self.base.dpdf(1.0 + t) / d,
                            lambda t: 0.0 * t,
                            lambda t: self.base.dpdf(t - 1.0) / d)

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        a, d = float(self.base.pdf(0.0)), self._den
        lo_b, up_b = self.lower_break, self.upper_break
        with np.errstate(all="ignore"):
            lo = self.base.quantile(np.clip(p * d, 1e-300, 0.5)) - 1.0
            up = self.base.quantile(np.clip(p * d - 2.0 * a, 0.5, 1.0 - 1e-17)) + 1.0
        mid = (p - 0.5) * d / a
        return np.where(p <= lo_b, lo, np.where(p >= up_b, up, mid))

    def mean(self):
        self.base.upper_partial_mean()
        return 0.0

    def var(self):
        m_plus = self.base.upper_partial_mean()
        a = float(self.base.pdf(0.0))
        return (self.base.var() + 4.0 * m_plus + 1.0 + 2.0 * a / 3.0) / self._den

    def upper_partial_mean(self):
        # E[X; X > 0] = int_0^1 x a/d dx + E[(Y + 1); Y > 0] / d
        m_plus = self.base.upper_partial_mean()
        a = float(self.base.pdf(0.0))
        return (0.5 * a + m_plus + 0.5) / self._den

    def cgf_domain(self):
        return self.base.cgf_domain()


# right-endpoint generators G on [0, inf) with G(0) = 0

@dataclass(frozen=True)
class _GIdentity:
    name = "identity"

    def g(self, x):
        return np.asarray(x, dtype=float)

    def g_inv(self, u):
        return np.asarray(u, dtype=float)

    def g_prime(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def mean(self, theta):
        return 0.5 * theta

    def mean_prime(self, theta):
        return 0.5

    def var(self, theta):
        return theta * theta / 12.0


@dataclass(frozen=True)
class _GExpMinusOne:
    name = "exp-minus-one"

    def g(self, x):
        return np.expm1(x)

    def g_inv(self, u):
        return np.log1p(u)

    def g_prime(self, x):
        return np.exp(x)

    def mean(self, theta):
        return theta / -math.expm1(-theta) - 1.0

    def mean_prime(self, theta):
        em = math.expm1(theta)
        return math.exp(theta) * (em - theta) / (em * em)

    def var(self, theta):
        em = math.expm1(theta)
        second = (math.exp(theta) * (theta * theta - 2.0 * theta + 2.0) - 2.0) / em
        return second - self.mean(theta) ** 2


@dataclass(frozen=True)
class _GPower:
    y: float
    name = "power"

    def g(self, x):
        return np.power(x, self.y)

    def g_inv(self, u):
        return np.power(u, 1.0 / self.y)

    def g_prime(self, x):
        return self.y * np.power(x, self.y - 1.0)

    def mean(self, theta):
        return self.y * theta / (self.y + 1.0)

    def mean_prime(self, theta):
        return self.y / (self.y + 1.0)

    def var(self, theta):
        y = self.y
        return y * theta * theta / ((y + 2.0) * (y + 1.0) ** 2)


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilySpec:
    """A one-parameter family ``{F_theta : theta in theta_domain}``.

    Instances are immutable; all methods are pure.
    """
    id: FamilyId
    theta_domain: tuple[float, float]
    fixed_params: dict = field(default_factory=dict, compare=False)
    kind: str = ""

    # -- validation -------------------------------------------------------
    def check_theta(self, theta) -> float:
        theta = float(theta)
        lo, hi = self.theta_domain
        if not (lo < theta < hi):
            raise DomainError(f"theta={theta} outside {self.id.value} domain ({lo}, {hi})")
        return theta

    def _check_x(self, theta, x):
        lo, hi = self.support(theta)
        if not _in_open(x, lo, hi):
            raise DomainError(f"x outside the open support ({lo}, {hi})")
        return np.asarray(x, dtype=float)

    @staticmethod
    def _check_level(lam):
        if not _in_open(lam, 0.0, 1.0):
            raise DomainError("level must lie in the open interval (0, 1)")
        return np.asarray(lam, dtype=float)

    def support(self, theta) -> tuple[float, float]:
        raise NotImplementedError

    def cdf(self, theta, x):
        raise NotImplementedError

    def sf(self, theta, x):
        raise NotImplementedError

    def logcdf(self, theta, x):
        with np.errstate(divide="ignore"):
            return _out(np.log(self.cdf(theta, x)))

    def logsf(self, theta, x):
        with np.errstate(divide="ignore"):
            return _out(np.log(self.sf(theta, x)))

    def pdf(self, theta, x):
        raise NotImplementedError

    def logpdf(self, theta, x):
        with np.errstate(divide="ignore"):
            return _out(np.log(self.pdf(theta, x)))

    def quantile(self, theta, lam):
        raise NotImplementedError

    def mean(self, theta) -> float:
        raise NotImplementedError

    def variance(self, theta) -> float:
        raise NotImplementedError

    def mean_prime(self, theta) -> float:
        raise NotImplementedError

    def cgf_centered(self, theta, gamma):
        """Closed-form ``Lambda_theta(gamma) - gamma * mean(theta)`` or None."""
        return None

    def cgf_domain(self, theta) -> tuple[float, float]:
        """Open interval of ``gamma`` on which the CGF is finite.

        For heavy right tails this is ``(-inf, 0)``; ``gamma = 0`` is always
        finite and handled by the caller.
        """
        return (-_INF, _INF)

    def density(self, theta):
        """Unchecked scalar density ``x -> F'_theta(x)`` for inner loops."""
        theta = self.check_theta(theta)
        return lambda x: float(self.pdf(theta, x))

    def log_density(self, theta):
        theta = self.check_theta(theta)

        def f(x):
            with np.errstate(divide="ignore"):
                return float(self.logpdf(theta, x))
        return f

    def breaks(self, theta) -> tuple[float, ...]:
        """Interior points where the density is not smooth (quadrature hints)."""
        return ()

    def cgf_centered_value(self, theta, gamma) -> float:
        """``Lambda_theta(gamma) - gamma * mean(theta)``; inf off the domain."""
        theta = self.check_theta(theta)
        gamma = float(gamma)
        if gamma == 0.0:
            return 0.0
        lo, hi = self.cgf_domain(theta)
        if not (lo < gamma < hi):
            return _INF
        closed = self.cgf_centered(theta, gamma)
        if closed is not None:
            return float(closed)
        return _numeric_cgf_centered(self, theta, gamma)

    def cgf(self, theta, gamma) -> float:
        """``Lambda_theta(gamma) = log E exp(gamma X)``; inf off the domain."""
        c = self.cgf_centered_value(theta, gamma)
        if c == _INF:
            return _INF
        return c + float(gamma) * self.mean(theta)

    @property
    def mm_applicability(self) -> MMApplicability:
        raise NotImplementedError

    @property
    def tail_class(self) -> TailClass:
        raise NotImplementedError

    @property
    def label(self) -> str:
        params = ",".join(f"{k}={v}" for k, v in self.fixed_params.items())
        return f"{self.id.value}({params})" if params else self.id.value

    def theta_for_quantile(self, lam, x):
        """Solve ``quantile(theta, lam) = x`` for theta; None if no solution."""
        raise NotImplementedError

    def theta_for_mean(self, m):
        """Solve ``mean(theta) = m`` for theta; None if no solution."""
        lo, hi = self.theta_domain
        lo = max(lo, -1e6)
        hi = min(hi, 1e6)
        eps = 1e-12 * max(1.0, hi - lo)
        try:
            f = lambda t: self.mean(t) - m  # noqa: E731
            return brentq(f, lo + eps, hi - eps, xtol=1e-14, rtol=1e-14)
        except ValueError:
            return None


@dataclass(frozen=True)
class _ShapeFamily(FamilySpec):
    shape: Any = None

    def support(self, theta):
        self.check_theta(theta)
        return self.shape.support


@dataclass(frozen=True)
class ScaleFamily(_ShapeFamily):
    """``F_theta(x) = G(x / theta)`` with ``theta > 0``."""

    def cdf(self, theta, x):
        theta = self.check_theta(theta)
        x = self._check_x(theta, x)
        return _out(self.shape.cdf(x / theta))

    def sf(self, theta, x):
        theta = self.check_theta(theta)
        x = self._check_x(theta, x)
        return _out(self.shape.sf(x / theta))

    def logcdf(self, theta, x):
        theta = self.check_theta(theta)
        return _out(self.shape.logcdf(self._check_x(theta, x) / theta))

    def logsf(self, theta, x):
        theta = self.check_theta(theta)
        return _out(self.shape.logsf(self._check_x(theta, x) / theta))

    def pdf(self, theta, x):
        theta = self.check_theta(theta)
        return _out(self.shape.pdf(self._check_x(theta, x) / theta) / theta)

    def logpdf(self, theta, x):
        theta = self.check_theta(theta)
        return _out(self.shape.logpdf(self._check_x(theta, x) / theta) - math.log(theta))

    def quantile(self, theta, lam):
        theta = self.check_theta(theta)
        return _out(theta * self.shape.quantile(self._check_level(lam)))

    def mean(self, theta):
        return self.check_theta(theta) * self.shape.mean()

    def variance(self, theta):
        return self.check_theta(theta) ** 2 * self.shape.var()

    def mean_prime(self, theta):
        self.check_theta(theta)
        return self.shape.mean()

    def cgf_centered(self, theta, gamma):
        return self.shape.cgf_centered(self.check_theta(theta) * gamma)

    def cgf_domain(self, theta):
        lo, hi = self.shape.cgf_domain()
        theta = self.check_theta(theta)
        return (lo / theta, hi / theta)

    def density(self, theta):
        t, sh = self.check_theta(theta), self.shape
        return lambda x: sh.pdf1(x / t) / t

    def log_density(self, theta):
        t, sh = self.check_theta(theta), self.shape
        lt = math.log(t)
        return lambda x: sh.logpdf1(x / t) - lt

    def theta_for_quantile(self, lam, x):
        q = float(self.shape.quantile(lam))
        if q == 0.0:
            return None
        t = x / q
        return t if t > 0 else None

    def theta_for_mean(self, m):
        try:
            mu1 = self.shape.mean()
        except MMUndefinedError:
            return None
        if mu1 == 0.0:
            return None
        t = m / mu1
        return t if t > 0 else None

    @property
    def mm_applicability(self):
        if self.id is FamilyId.WEIBULL_SCALE:
            rho = self.shape.rho
            if rho < 1.0:
                return MMApplicability.NOT_GOOD
            return MMApplicability.CLOSED_FORM_GOOD if rho == 1.0 else MMApplicability.NUMERIC_GOOD
        if self.id is FamilyId.GUMBEL_SCALE:
            return MMApplicability.NUMERIC_GOOD
        # normal/logistic: moment matching on the mean carries no information
        # at eta = 0 (treated as uninformative for all eta); cauchy has no mean at all
        return MMApplicability.UNDEFINED

    @property
    def tail_class(self):
        if self.id is FamilyId.CAUCHY_SCALE:
            return TailClass.UNDEFINED
        return TailClass.HEAVY if self.shape.heavy else TailClass.LIGHT


@dataclass(frozen=True)
class LocationFamily(_ShapeFamily):
    """``F_theta(x) = G(x - theta)`` with ``theta`` real."""

    def cdf(self, theta, x):
        theta = self.check_theta(theta)
        return _out(self.shape.cdf(self._check_x(theta, x) - theta))

    def sf(self, theta, x):
        theta = self.check_theta(theta)
        return _out(self.shape.sf(self._check_x(theta, x) - theta))

    def logcdf(self, theta, x):
        theta = self.check_theta(theta)
        return _out(self.shape.logcdf(self._check_x(theta, x) - theta))

    def logsf(self, theta, x):
        theta = self.check_theta(theta)
        return _out(self.shape.logsf(self._check_x(theta, x) - theta))

    def pdf(self, theta, x):
        theta = self.check_theta(theta)
        return _out(self.shape.pdf(self._check_x(theta, x) - theta))

    def logpdf(self, theta, x):
        theta = self.check_theta(theta)
        return _out(self.shape.logpdf(self._check_x(theta, x) - theta))

    def quantile(self, theta, lam):
        theta = self.check_theta(theta)
        return _out(theta + self.shape.quantile(self._check_level(lam)))

    def mean(self, theta):
        return self.check_theta(theta) + self.shape.mean()

    def variance(self, theta):
        self.check_theta(theta)
        return self.shape.var()

    def mean_prime(self, theta):
        self.check_theta(theta)
        self.shape.mean()
        return 1.0

    def cgf_centered(self, theta, gamma):
        self.check_theta(theta)
        return self.shape.cgf_centered(gamma)

    def cgf_domain(self, theta):
        self.check_theta(theta)
        return self.shape.cgf_domain()

    def theta_for_quantile(self, lam, x):
        return x - float(self.shape.quantile(lam))

    def density(self, theta):
        t, sh = self.check_theta(theta), self.shape
        return lambda x: sh.pdf1(x - t)

    def log_density(self, theta):
        t, sh = self.check_theta(theta), self.shape
        return lambda x: sh.logpdf1(x - t)

    def breaks(self, theta):
        if isinstance(self.shape, _GTilde):
            return (theta - 1.0, theta + 1.0)
        return ()

    def theta_for_mean(self, m):
        try:
            return m - self.shape.mean()
        except MMUndefinedError:
            return None

    @property
    def mm_applicability(self):
        if isinstance(self.shape, _Cauchy) or (
                isinstance(self.shape, _GTilde) and isinstance(self.shape.base, _Cauchy)):
            return MMApplicability.UNDEFINED
        if isinstance(self.shape, _Normal):
            return MMApplicability.CLOSED_FORM_GOOD
        return MMApplicability.NUMERIC_GOOD

    @property
    def tail_class(self):
        if self.mm_applicability is MMApplicability.UNDEFINED:
            return TailClass.UNDEFINED
        return TailClass.LIGHT


@dataclass(frozen=True)
class SkewFamily(_ShapeFamily):
    """Epsilon-skew family over a symmetric shape, ``theta in (-1, 1)``."""

    def _split(self, x, lower, upper):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            lo = lower(np.minimum(x, 0.0))
            up = upper(np.maximum(x, 0.0))
        return _out(np.where(x <= 0.0, lo, up))

    def cdf(self, theta, x):
        t = self.check_theta(theta)
        x = self._check_x(t, x)
        G = self.shape
        return self._split(x, lambda v: (1 + t) * G.cdf(v / (1 + t)),
                           lambda v: t + (1 - t) * G.cdf(v / (1 - t)))

    def sf(self, theta, x):
        t = self.check_theta(theta)
        x = self._check_x(t, x)
        G = self.shape
        return self._split(x, lambda v: 1.0 - (1 + t) * G.cdf(v / (1 + t)),
                           lambda v: (1 - t) * G.sf(v / (1 - t)))

    def logcdf(self, theta, x):
        t = self.check_theta(theta)
        x = self._check_x(t, x)
        G = self.shape
        return self._split(x, lambda v: math.log1p(t) + G.logcdf(v / (1 + t)),
                           lambda v: np.log(t + (1 - t) * G.cdf(v / (1 - t))))

    def logsf(self, theta, x):
        t = self.check_theta(theta)
        x = self._check_x(t, x)
        G = self.shape
        return self._split(x, lambda v: np.log1p(-(1 + t) * G.cdf(v / (1 + t))),
                           lambda v: math.log1p(-t) + G.logsf(v / (1 - t)))

    def pdf(self, theta, x):
        t = self.check_theta(theta)
        x = self._check_x(t, x)
        G = self.shape
        return self._split(x, lambda v: G.pdf(v / (1 + t)), lambda v: G.pdf(v / (1 - t)))

    def logpdf(self, theta, x):
        t = self.check_theta(theta)
        x = self._check_x(t, x)
        G = self.shape
        return self._split(x, lambda v: G.logpdf(v / (1 + t)), lambda v: G.logpdf(v / (1 - t)))

    def quantile(self, theta, lam):
        t = self.check_theta(theta)
        lam = self._check_level(lam)
        return skew_quantile(t, lam, self.shape)

    def mean(self, theta):
        t = self.check_theta(theta)
        return -4.0 * t * self.shape.upper_partial_mean()

    def variance(self, theta):
        t = self.check_theta(theta)
        m_plus = self.shape.upper_partial_mean()
        return (1.0 + 3.0 * t * t) * self.shape.var() - 16.0 * t * t * m_plus * m_plus

    def mean_prime(self, theta):
        self.check_theta(theta)
        return -4.0 * self.shape.upper_partial_mean()

    def cgf_domain(self, theta):
        t = self.check_theta(theta)
        lo, hi = self.shape.cgf_domain()
        return (lo / (1.0 + t), hi / (1.0 - t))

    def breaks(self, theta):
        return (0.0,)

    def density(self, theta):
        t, sh = self.check_theta(theta), self.shape
        return lambda x: sh.pdf1(x / (1.0 + t)) if x <= 0.0 else sh.pdf1(x / (1.0 - t))

    def log_density(self, theta):
        t, sh = self.check_theta(theta), self.shape
        return lambda x: sh.logpdf1(x / (1.0 + t)) if x <= 0.0 else sh.logpdf1(x / (1.0 - t))

    def theta_for_quantile(self, lam, x):
        lo, hi = self.theta_domain
        eps = 1e-12
        f = lambda t: float(skew_quantile(t, lam, self.shape)) - x  # noqa: E731
        a, b = lo + eps, hi - eps
        fa, fb = f(a), f(b)
        if not (np.isfinite(fa) and np.isfinite(fb)) or (fa > 0) == (fb > 0):
            return None
        return brentq(f, a, b, xtol=1e-15, rtol=4e-16)

    def theta_for_mean(self, m):
        try:
            m_plus = self.shape.upper_partial_mean()
        except MMUndefinedError:
            return None
        t = -m / (4.0 * m_plus)
        return t if -1.0 < t < 1.0 else None

    @property
    def mm_applicability(self):
        if isinstance(self.shape, _Cauchy):
            return MMApplicability.UNDEFINED
        return MMApplicability.NUMERIC_GOOD

    @property
    def tail_class(self):
        return TailClass.UNDEFINED if isinstance(self.shape, _Cauchy) else TailClass.LIGHT


@dataclass(frozen=True)
class ParetoFamily(FamilySpec):
    """``F_theta(x) = 1 - x**(-1/theta)`` on ``(1, inf)``.

    The mean exists only on the sub-domain ``mean_domain = (0, 1)``.
    """
    mean_domain: tuple[float, float] = (0.0, 1.0)

    def support(self, theta):
        self.check_theta(theta)
        return (1.0, _INF)

    def cdf(self, theta, x):
        t = self.check_theta(theta)
        return _out(-np.expm1(-np.log(self._check_x(t, x)) / t))

    def sf(self, theta, x):
        t = self.check_theta(theta)
        return _out(np.exp(-np.log(self._check_x(t, x)) / t))

    def logsf(self, theta, x):
        t = self.check_theta(theta)
        return _out(-np.log(self._check_x(t, x)) / t)

    def pdf(self, theta, x):
        t = self.check_theta(theta)
        x = self._check_x(t, x)
        return _out(np.power(x, -1.0 / t - 1.0) / t)

    def logpdf(self, theta, x):
        t = self.check_theta(theta)
        x = self._check_x(t, x)
        return _out((-1.0 / t - 1.0) * np.log(x) - math.log(t))

    def quantile(self, theta, lam):
        t = self.check_theta(theta)
        lam = self._check_level(lam)
        return _out(np.exp(-t * np.log1p(-lam)))

    def _check_mean_domain(self, t, upper=1.0):
        if not (0.0 < t < upper):
            raise MMUndefinedError(f"pareto moment infinite for theta={t}")

    def mean(self, theta):
        t = self.check_theta(theta)
        self._check_mean_domain(t)
        return 1.0 / (1.0 - t)

    def variance(self, theta):
        t = self.check_theta(theta)
        self._check_mean_domain(t, 0.5)
        return t * t / ((1.0 - t) ** 2 * (1.0 - 2.0 * t))

    def mean_prime(self, theta):
        t = self.check_theta(theta)
        self._check_mean_domain(t)
        return 1.0 / (1.0 - t) ** 2

    def cgf_domain(self, theta):
        self.check_theta(theta)
        return (-_INF, 0.0)

    def theta_for_quantile(self, lam, x):
        if x <= 1.0:
            return None
        return math.log(x) / -math.log1p(-lam)

    def theta_for_mean(self, m):
        if m <= 1.0:
            return None
        return 1.0 - 1.0 / m

    @property
    def mm_applicability(self):
        return MMApplicability.NOT_GOOD

    @property
    def tail_class(self):
        return TailClass.HEAVY


@dataclass(frozen=True)
class RightEndpointFamily(FamilySpec):
    """``F_theta(x) = G(x) / G(theta)`` on ``(0, theta)``."""
    g: Any = None

    def support(self, theta):
        return (0.0, self.check_theta(theta))

    def cdf(self, theta, x):
        t = self.check_theta(theta)
        return _out(self.g.g(self._check_x(t, x)) / self.g.g(t))

    def sf(self, theta, x):
        t = self.check_theta(theta)
        gt = self.g.g(t)
        return _out((gt - self.g.g(self._check_x(t, x))) / gt)

    def pdf(self, theta, x):
        t = self.check_theta(theta)
        return _out(self.g.g_prime(self._check_x(t, x)) / self.g.g(t))

    def quantile(self, theta, lam):
        t = self.check_theta(theta)
        return _out(self.g.g_inv(self._check_level(lam) * self.g.g(t)))

    def mean(self, theta):
        return self.g.mean(self.check_theta(theta))

    def variance(self, theta):
        return self.g.var(self.check_theta(theta))

    def mean_prime(self, theta):
        return self.g.mean_prime(self.check_theta(theta))

    def cgf_centered(self, theta, gamma):
        if not isinstance(self.g, _GIdentity):
            return None
        # uniform(0, theta): log(sinh(v)/v) with v = gamma*theta/2
        return log_sinhc(0.5 * gamma * self.check_theta(theta))

    def theta_for_quantile(self, lam, x):
        if x <= 0.0:
            return None
        return float(self.g.g_inv(self.g.g(x) / lam))

    def theta_for_mean(self, m):
        if isinstance(self.g, (_GIdentity, _GPower)):
            return m / self.g.mean_prime(1.0) if m > 0 else None
        return super().theta_for_mean(m)

    @property
    def mm_applicability(self):
        return MMApplicability.NUMERIC_GOOD

    @property
    def tail_class(self):
        return TailClass.LIGHT


def _numeric_cgf_centered(fam: FamilySpec, theta: float, gamma: float) -> float:
    from scipy.integrate import quad

    m = fam.mean(theta)
    sd = math.sqrt(fam.variance(theta)) if _finite_var(fam, theta) else abs(m) + 1.0
    lo, hi = fam.support(theta)
    cuts = sorted({m, *fam.breaks(theta)})
    opts = dict(epsabs=0.0, epsrel=1e-12, limit=400)

    def integrate(g, points):
        # cuts within rounding distance of a finite edge only create slivers
        near = lambda p, e: math.isfinite(e) and abs(p - e) <= 1e-9 * max(1.0, abs(e))  # noqa: E731
        edges = [lo, *[p for p in points if lo < p < hi and not near(p, lo) and not near(p, hi)], hi]
        total = 0.0
        inner = lambda x: g(x) if lo < x < hi else 0.0  # noqa: E731
        for a, b in zip(edges[:-1], edges[1:]):
            if b > a:
                total += quad(inner, a, b, **opts)[0]
        return total

    if abs(gamma) * sd <= 1.0:
        # E[exp(u) - 1 - u] with u = gamma (X - m); exact zero-mean cancellation
        dens = fam.density(theta)

        def g(x):
            d = dens(x)
            return 0.0 if d == 0.0 else _em1_scalar(gamma * (x - m)) * d
        val = integrate(g, cuts)
        return math.log1p(val) if val > -1.0 else -_INF

    # log-space with a shift at the (approximate) tilted mode
    levels = np.concatenate([np.logspace(-250, -2, 200), np.linspace(0.01, 0.99, 99),
                             1.0 - np.logspace(-2, -15, 120)])
    xs = np.asarray(fam.quantile(theta, levels), dtype=float)
    xs = xs[np.isfinite(xs) & (xs > lo) & (xs < hi)]
    with np.errstate(all="ignore"):
        vals = gamma * (xs - m) + np.asarray(fam.logpdf(theta, xs), dtype=float)
    j = int(np.nanargmax(vals))
    shift, xstar = float(vals[j]), float(xs[j])

    log_dens = fam.log_density(theta)

    def g(x):
        v = gamma * (x - m) + log_dens(x) - shift
        return math.exp(v) if v > -745.0 else 0.0
    val = integrate(g, sorted({*cuts, xstar}))
    if not (val > 0.0) or not math.isfinite(val):
        return _INF
    return math.log(val) + shift


def _finite_var(fam, theta) -> bool:
    try:
        v = fam.variance(theta)
    except MMUndefinedError:
        return False
    return math.isfinite(v) and v > 0


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

_POS = (0.0, _INF)
_REAL = (-_INF, _INF)

_PARAMS = {
    FamilyId.WEIBULL_SCALE: {"rho": 1.0},
    FamilyId.NORMAL_SCALE: {"eta": 0.0},
    FamilyId.CAUCHY_SCALE: {"eta": 0.0},
    FamilyId.LOGISTIC_SCALE: {"eta": 0.0},
    FamilyId.GUMBEL_SCALE: {"eta": 0.0},
    FamilyId.NORMAL_LOC: {"s": 1.0},
    FamilyId.CAUCHY_LOC: {"s": 1.0},
    FamilyId.LOGISTIC_LOC: {"s": 1.0},
    FamilyId.GUMBEL_LOC: {"s": 1.0},
    FamilyId.SKEW_NORMAL: {"s": 1.0},
    FamilyId.SKEW_CAUCHY: {"s": 1.0},
    FamilyId.SKEW_LOGISTIC: {"s": 1.0},
    FamilyId.PARETO: {},
    FamilyId.RIGHT_ENDPOINT: {"g": "identity", "y": 1.0},
    FamilyId.GTILDE: {"base": "normal-loc", "s": 1.0},
}

_SCALE_SHAPES = {
    FamilyId.NORMAL_SCALE: _Normal,
    FamilyId.CAUCHY_SCALE: _Cauchy,
    FamilyId.LOGISTIC_SCALE: _Logistic,
    FamilyId.GUMBEL_SCALE: _Gumbel,
}
_LOC_SHAPES = {
    FamilyId.NORMAL_LOC: _Normal,
    FamilyId.CAUCHY_LOC: _Cauchy,
    FamilyId.LOGISTIC_LOC: _Logistic,
    FamilyId.GUMBEL_LOC: _Gumbel,
}
_SKEW_SHAPES = {
    FamilyId.SKEW_NORMAL: _Normal,
    FamilyId.SKEW_CAUCHY: _Cauchy,
    FamilyId.SKEW_LOGISTIC: _Logistic,
}


def _positive(name, value):
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value}")
    return value


def make_family(family_id: FamilyId | str, **params) -> FamilySpec:
    """Build a family from its id and fixed parameters.

    Unspecified parameters take defaults (rho=1, eta=0, s=1, g="identity",
    y=1, base="normal-loc").  ``y`` is only meaningful for ``g="power"``.
    """
    try:
        fid = FamilyId(family_id)
    except ValueError:
        raise DomainError(f"unknown family {family_id!r}") from None
    allowed = _PARAMS[fid]
    unknown = set(params) - set(allowed)
    if unknown:
        raise DomainError(f"{fid.value} does not take parameters {sorted(unknown)}")
    p = {**allowed, **params}

    if fid is FamilyId.WEIBULL_SCALE:
        rho = _positive("rho", p["rho"])
        return ScaleFamily(fid, _POS, {"rho": rho}, "scale", _Weibull(rho))
    if fid in _SCALE_SHAPES:
        eta = float(p["eta"])
        if not math.isfinite(eta):
            raise DomainError("eta must be finite")
        return ScaleFamily(fid, _POS, {"eta": eta}, "scale", _SCALE_SHAPES[fid](eta, 1.0))
    if fid in _LOC_SHAPES:
        s = _positive("s", p["s"])
        return LocationFamily(fid, _REAL, {"s": s}, "location", _LOC_SHAPES[fid](0.0, s))
    if fid in _SKEW_SHAPES:
        s = _positive("s", p["s"])
        return SkewFamily(fid, (-1.0, 1.0), {"s": s}, "skew", _SKEW_SHAPES[fid](0.0, s))
    if fid is FamilyId.PARETO:
        return ParetoFamily(fid, _POS, {}, "pareto")
    if fid is FamilyId.RIGHT_ENDPOINT:
        name = str(p["g"]).replace("_", "-")
        if name == "identity":
            g, fp = _GIdentity(), {"g": "identity"}
        elif name == "exp-minus-one":
            g, fp = _GExpMinusOne(), {"g": "exp-minus-one"}
        elif name == "power":
            y = _positive("y", p["y"])
            g, fp = _GPower(y), {"g": "power", "y": y}
        else:
            raise DomainError(f"unknown right-endpoint generator {p['g']!r}")
        return RightEndpointFamily(fid, _POS, fp, "right-endpoint", g)
    # gtilde
    base = make_family(p["base"], s=p["s"])
    return make_gtilde(base)


def skew_quantile(theta: float, lam, shape) -> Any:
    """Quantile of the epsilon-skew family built on symmetric ``shape``.

    The breakpoint ``lam = (1 + theta) / 2`` belongs to the lower branch.
    ``shape`` may be a location FamilySpec (its theta=0 member is used) or a
    raw shape object.
    """
    if isinstance(shape, FamilySpec):
        shape = shape.shape
    lam = np.asarray(lam, dtype=float)
    t = float(theta)
    lower = lam <= 0.5 * (1.0 + t)
    with np.errstate(all="ignore"):
        lo = (1.0 + t) * shape.quantile(np.where(lower, lam / (1.0 + t), 0.5))
        up = (1.0 - t) * shape.quantile(np.where(lower, 0.5, (lam - t) / (1.0 - t)))
    return _out(np.where(lower, lo, up))


def make_gtilde(base: FamilySpec) -> LocationFamily:
    """Location family on the three-piece G~ built from a symmetric base.

    ``base`` must be a location family whose shape is symmetric about 0 with
    ``G''(0) = 0``; both are checked numerically.
    """
    shape = getattr(base, "shape", None)
    if not isinstance(base, LocationFamily) or isinstance(shape, _GTilde):
        raise DomainError("gtilde base must be a plain location family")
    xs = np.linspace(-6.0, 6.0, 241)
    if np.max(np.abs(shape.cdf(xs) - shape.sf(-xs))) > 1e-8 or abs(float(shape.cdf(0.0)) - 0.5) > 1e-12:
        raise DomainError(f"gtilde base {base.id.value} is not symmetric")
    h = 1e-3
    g2 = (shape.pdf(h) - shape.pdf(-h)) / (2 * h)
    if abs(float(g2)) > 1e-8:
        raise DomainError(f"gtilde base {base.id.value} has G''(0) != 0")
    fp = {"base": base.id.value, **base.fixed_params}
    return LocationFamily(FamilyId.GTILDE, _REAL, fp, "location", _GTilde(shape))
