"""Monte Carlo checks of the rate-function predictions.

Random numbers come from a counter-based generator (Philox) keyed by
``(seed, n, chunk)``, so each block of replications has its own stream and
results do not depend on how blocks are scheduled across threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._numerics import second_derivative
from .distributions import (FamilyId, FamilySpec, LocationFamily, ParetoFamily,
                            RightEndpointFamily, ScaleFamily, SkewFamily, _GExpMinusOne)
from .errors import DomainError, InsufficientTailEvents, MMUndefinedError
from .mm_rate import MmRateContext, mm_rate
from .mq_rate import MqRateContext, entropy_bernoulli, mq_rate

CHUNK = 2000
_TWO53 = float(2 ** 53)


def order_index(lam: float, n: int) -> int:
    """1-based index ``k_n = ceil(lam n)`` of the order statistic."""
    return max(1, min(n, math.ceil(lam * n - 1e-12)))


def _generator(seed: int, n: int, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(n), int(chunk)))
    return np.random.Generator(np.random.Philox(ss))


def uniforms(gen: np.random.Generator, shape) -> np.ndarray:
    """Uniforms on the open interval (0, 1) with 53 random bits."""
    bits = gen.integers(0, 2 ** 53, size=shape, dtype=np.uint64)
    return (bits.astype(np.float64) + 0.5) / _TWO53


def sample(family: FamilySpec, theta0: float, n: int, seed: int, stream: int = 0) -> np.ndarray:
    """``n`` draws from ``F_{theta0}`` by inversion; reproducible for a given seed."""
    if n < 0:
        raise DomainError("sample size must be non-negative")
    theta0 = family.check_theta(theta0)
    u = uniforms(_generator(seed, n, stream), n)
    return np.asarray(family.quantile(theta0, u), dtype=float)


# -- estimators ---------------------------------------------------------------

def _vec_invert(fn, targets, lo, hi, iters=200):
    """Solve ``fn(theta) = target`` elementwise for monotone ``fn`` on (lo, hi)."""
    targets = np.asarray(targets, dtype=float)
    a = np.full(targets.shape, lo)
    b = np.full(targets.shape, hi)
    fa, fb = fn(a), fn(b)
    inc = fb > fa
    ok = np.where(inc, (targets > fa) & (targets < fb), (targets < fa) & (targets > fb))
    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = fn(m)
        go_right = np.where(inc, fm < targets, fm > targets)
        a = np.where(go_right, m, a)
        b = np.where(go_right, b, m)
        if np.all(b - a <= 1e-15 * np.maximum(1.0, np.abs(a))):
            break
    return np.where(ok, 0.5 * (a + b), np.nan)


def _skew_quantile_vec(shape, lam, t):
    lower = lam <= 0.5 * (1.0 + t)
    with np.errstate(all="ignore"):
        lo = (1.0 + t) * shape.quantile(np.where(lower, lam / (1.0 + t), 0.5))
        up = (1.0 - t) * shape.quantile(np.where(lower, 0.5, (lam - t) / (1.0 - t)))
    return np.where(lower, lo, up)


def invert_quantile(family: FamilySpec, lam: float, x) -> np.ndarray:
    """Vectorised MQ inversion ``F_theta^{-1}(lam) = x``; NaN where no theta solves it."""
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        if isinstance(family, ScaleFamily):
            q = float(family.shape.quantile(lam))
            t = x / q if q != 0.0 else np.full(x.shape, np.nan)
            return np.where(t > 0, t, np.nan)
        if isinstance(family, LocationFamily):
            return x - float(family.shape.quantile(lam))
        if isinstance(family, ParetoFamily):
            return np.where(x > 1.0, np.log(x) / -math.log1p(-lam), np.nan)
        if isinstance(family, RightEndpointFamily):
            g = family.g
            return np.where(x > 0.0, g.g_inv(g.g(x) / lam), np.nan)
        if isinstance(family, SkewFamily):
            return _vec_invert(lambda t: _skew_quantile_vec(family.shape, lam, t), x,
                               -1.0 + 1e-12, 1.0 - 1e-12)
    return np.array([np.nan if (t := family.theta_for_quantile(lam, float(v))) is None else t
                     for v in x.ravel()]).reshape(x.shape)


def invert_mean(family: FamilySpec, m) -> np.ndarray:
    """Vectorised MM inversion ``mu(theta) = m``; NaN where no theta solves it."""
    m = np.asarray(m, dtype=float)
    with np.errstate(all="ignore"):
        if isinstance(family, RightEndpointFamily) and isinstance(family.g, _GExpMinusOne):
            fn = lambda t: t / -np.expm1(-t) - 1.0  # noqa: E731
            return _vec_invert(fn, m, 1e-9, 700.0)
        if isinstance(family, SkewFamily):
            mp = family.shape.upper_partial_mean()
            t = -m / (4.0 * mp)
            return np.where((t > -1.0) & (t < 1.0), t, np.nan)
        if isinstance(family, (ScaleFamily, LocationFamily, RightEndpointFamily)):
            # mean linear in theta with mu(0) = c0 and slope c1
            if isinstance(family, LocationFamily):
                c0, c1 = family.shape.mean(), 1.0
                return (m - c0) / c1
            c1 = family.mean_prime(1.0)
            t = m / c1
            return np.where(t > 0, t, np.nan)
        if isinstance(family, ParetoFamily):
            return np.where(m > 1.0, 1.0 - 1.0 / m, np.nan)
    raise DomainError(f"no moment inversion for {family.label}")


def mq_estimate(samples, family: FamilySpec, lam: float) -> float | None:
    """MQ estimate from ``X_{ceil(lam n):n}``; None when it is not invertible."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise DomainError("empty sample")
    if not 0.0 < lam < 1.0:
        raise DomainError("level must lie in (0, 1)")
    k = order_index(lam, x.size)
    xk = float(np.partition(x, k - 1)[k - 1])
    t = float(invert_quantile(family, lam, xk))
    return None if math.isnan(t) else t


def mm_estimate(samples, family: FamilySpec) -> float | None:
    if family.mm_applicability.value == "undefined":
        raise MMUndefinedError(f"no moment estimator for {family.label}")
    x = np.asarray(samples, dtype=float)
    t = float(invert_mean(family, x.mean()))
    return None if math.isnan(t) else t


# -- decay-rate estimation --------------------------------------------------

@dataclass(frozen=True)
class SimPlan:
    family: FamilySpec
    theta0: float
    lam: float
    eps: float
    ns: tuple[int, ...] = (50, 100, 200, 400, 800)
    reps: int = 1000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "theta0", self.family.check_theta(self.theta0))
        if not self.eps > 0:
            raise DomainError("deviation radius must be positive")
        if not 0.0 < self.lam < 1.0:
            raise DomainError("level must lie in (0, 1)")
        if self.reps < 1 or any(int(n) < 1 for n in self.ns):
            raise DomainError("sample sizes and replications must be positive")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "ns", tuple(int(n) for n in self.ns))


@dataclass
class DecayRateEstimate:
    estimator: str
    ns: list[int]
    reps: int
    deviations: list[int]
    out_of_range: list[int]
    p_hat: list[float]
    slope: float
    intercept: float
    slope_origin: float
    predicted_rate: float
    relative_gap: float
    fit: str
    meta: dict = field(default_factory=dict)

    @property
    def local_rates(self) -> list[float | None]:
        """``-log(p_hat_n)/n`` per sample size; None where ``p_hat_n`` is 0 or 1."""
        return [-math.log(p) / n if 0.0 < p < 1.0 else None for n, p in zip(self.ns, self.p_hat)]

    def as_dict(self) -> dict:
        return {"estimator": self.estimator, "ns": self.ns, "reps": self.reps,
                "deviations": self.deviations, "out_of_range": self.out_of_range,
                "p_hat": self.p_hat, "slope": self.slope, "intercept": self.intercept,
                "slope_origin": self.slope_origin, "predicted_rate": self.predicted_rate,
                "relative_gap": self.relative_gap, "local_rates": self.local_rates,
                "fit": self.fit, "meta": self.meta}


def predicted_rate(plan: SimPlan, estimator: str = "mq") -> float:
    """``inf {rate(theta) : |theta - theta0| >= eps}`` (rates are monotone on each side)."""
    fam, t0, eps = plan.family, plan.theta0, plan.eps
    if estimator == "mq":
        ctx = MqRateContext(fam, t0, plan.lam)
        rate = lambda t: mq_rate(ctx, t)  # noqa: E731
    elif estimator == "mm":
        ctx = MmRateContext(fam, t0)
        rate = lambda t: mm_rate(ctx, t)  # noqa: E731
    else:
        raise DomainError(f"unknown estimator {estimator!r}")
    lo, hi = fam.theta_domain
    vals = [rate(t) for t in (t0 - eps, t0 + eps) if lo < t < hi]
    return min(vals) if vals else math.inf


def _count_chunk(plan: SimPlan, estimator: str, n: int, chunk: int, size: int):
    gen = _generator(plan.seed, n, chunk)
    u = uniforms(gen, (size, n))
    fam = plan.family
    if estimator == "mq":
        k = order_index(plan.lam, n)
        uk = np.partition(u, k - 1, axis=1)[:, k - 1]
        est = invert_quantile(fam, plan.lam, fam.quantile(plan.theta0, uk))
    else:
        x = np.asarray(fam.quantile(plan.theta0, u), dtype=float)
        est = invert_mean(fam, x.mean(axis=1))
    bad = np.isnan(est)
    dev = bad | (np.abs(est - plan.theta0) > plan.eps)
    return int(dev.sum()), int(bad.sum())


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QLDP_THREADS", "1")))
    except ValueError:
        return 1


def count_deviations(plan: SimPlan, n: int, estimator: str = "mq", threads: int | None = None):
    """``(deviations, out_of_range)`` over ``plan.reps`` replications at size n."""
    sizes = [min(CHUNK, plan.reps - c * CHUNK) for c in range(-(-plan.reps // CHUNK))]
    jobs = [(n, c, s) for c, s in enumerate(sizes)]
    threads = _threads() if threads is None else max(1, int(threads))
    if threads == 1:
        parts = [_count_chunk(plan, estimator, *j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda j: _count_chunk(plan, estimator, *j), jobs))
    return sum(p[0] for p in parts), sum(p[1] for p in parts)


def fit_decay(ns, p_hat, reps: int, fit: str = "affine_log"):
    """Decay slope from ``-log p_hat_n`` against n.

    ``origin``: least squares through the origin.
    ``affine_log``: weighted least squares of ``-log p_hat_n - log(n)/2`` on n
    with an intercept, weights ``sqrt(R p/(1-p))`` (inverse standard error of
    ``log p_hat``); the half-log term is the usual polynomial prefactor of
    tail probabilities of sums.  Cells with ``p_hat`` in {0, 1} are dropped.
    Returns ``(slope, intercept, slope_origin)``.
    """
    ns = np.asarray(ns, dtype=float)
    p = np.asarray(p_hat, dtype=float)
    use = (p > 0.0) & (p < 1.0)
    if not np.any(use):
        raise InsufficientTailEvents("no sample size produced a deviation; shrink eps or raise reps")
    n, y = ns[use], -np.log(p[use])
    slope_origin = float(np.dot(n, y) / np.dot(n, n))
    if fit == "origin" or use.sum() < 2:
        return slope_origin, 0.0, slope_origin
    if fit != "affine_log":
        raise DomainError(f"unknown fit {fit!r}")
    w = np.sqrt(reps * p[use] / (1.0 - p[use]))
    A = np.column_stack([np.ones_like(n), n]) * w[:, None]
    coef, *_ = np.linalg.lstsq(A, (y - 0.5 * np.log(n)) * w, rcond=None)
    return float(coef[1]), float(coef[0]), slope_origin


def decay_rate(plan: SimPlan, estimator: str = "mq", fit: str = "affine_log",
               threads: int | None = None, min_reps: int = 1000) -> DecayRateEstimate:
    """Empirical exponential decay rate of ``P(|theta_hat_n - theta0| > eps)``."""
    if plan.reps < min_reps:
        raise DomainError(f"decay estimates need at least {min_reps} replications")
    pred = predicted_rate(plan, estimator)
    devs, oor = [], []
    for n in plan.ns:
        d, b = count_deviations(plan, n, estimator, threads)
        devs.append(d)
        oor.append(b)
    p_hat = [d / plan.reps for d in devs]
    slope, intercept, slope0 = fit_decay(plan.ns, p_hat, plan.reps, fit)
    gap = abs(slope - pred) / pred if pred > 0 and math.isfinite(pred) else math.inf
    meta = {"family": plan.family.label, "theta0": plan.theta0, "lambda": plan.lam,
            "eps": plan.eps, "seed": int(plan.seed), "chunk": CHUNK,
            "order_index": "ceil(lambda n)", "rng": "philox(seed, n, chunk)"}
    return DecayRateEstimate(estimator, list(plan.ns), plan.reps, devs, oor, p_hat, slope,
                             intercept, slope0, pred, gap, fit, meta)


# -- asymptotic variance of the central order statistic -----------------------

@dataclass
class AsymptoticVarianceReport:
    family: str
    theta0: float
    lam: float
    sigma2: float
    curvature_fd: float
    analytic_rel_error: float
    empirical_var: float | None
    empirical_rel_error: float | None
    n: int
    reps: int

    @property
    def analytic_ok(self) -> bool:
        return self.analytic_rel_error <= 1e-6

    @property
    def empirical_ok(self) -> bool:
        return self.empirical_rel_error is not None and self.empirical_rel_error <= 0.10


def asymptotic_variance_check(family: FamilySpec, theta0: float, lam: float, n: int = 2000,
                              reps: int = 5000, seed: int = 0,
                              empirical: bool = True) -> AsymptoticVarianceReport:
    """Order-statistic rate curvature against the normal-limit variance.

    ``sigma^2 = lam (1 - lam) / f(F^{-1}(lam))^2``.  The analytic check takes the
    finite-difference second derivative of ``x -> H(lam | F(x))`` at the
    quantile; the empirical check is the sample variance of
    ``sqrt(n) (X_{ceil(lam n):n} - F^{-1}(lam))``.
    """
    theta0 = family.check_theta(theta0)
    x0 = float(family.quantile(theta0, lam))
    dens = float(family.pdf(theta0, x0))
    if not dens > 0.0:
        raise DomainError("density vanishes at the quantile")
    sigma2 = lam * (1.0 - lam) / dens ** 2

    def rate(x):
        return entropy_bernoulli(lam, family.cdf(theta0, x))
    lo, hi = family.support(theta0)
    h = 1e-4 * max(1.0, abs(x0))
    h = min(h, 0.25 * (x0 - lo), 0.25 * (hi - x0))
    fd = second_derivative(rate, x0, h)
    err = abs(fd * sigma2 - 1.0)

    emp = emp_err = None
    if empirical:
        k = order_index(lam, n)
        vals = []
        for c in range(-(-reps // CHUNK)):
            size = min(CHUNK, reps - c * CHUNK)
            u = uniforms(_generator(seed, n, c), (size, n))
            uk = np.partition(u, k - 1, axis=1)[:, k - 1]
            vals.append(np.asarray(family.quantile(theta0, uk), dtype=float))
        z = math.sqrt(n) * (np.concatenate(vals) - x0)
        emp = float(np.var(z, ddof=1))
        emp_err = abs(emp / sigma2 - 1.0)
    return AsymptoticVarianceReport(family.label, theta0, lam, sigma2, fd, err, emp, emp_err,
                                    n, reps)


def consistency_median(family: FamilySpec, theta0: float, lam: float, n: int = 800,
                       reps: int = 1000, seed: int = 0) -> float:
    """Median MQ estimate over ``reps`` samples of size n."""
    k = order_index(lam, n)
    out = []
    for c in range(-(-reps // CHUNK)):
        size = min(CHUNK, reps - c * CHUNK)
        u = uniforms(_generator(seed, n, c), (size, n))
        uk = np.partition(u, k - 1, axis=1)[:, k - 1]
        out.append(invert_quantile(family, lam, family.quantile(theta0, uk)))
    return float(np.nanmedian(np.concatenate(out)))


__all__ = [
    "SimPlan", "DecayRateEstimate", "AsymptoticVarianceReport", "sample", "mq_estimate",
    "mm_estimate", "decay_rate", "fit_decay", "predicted_rate", "count_deviations",
    "asymptotic_variance_check", "consistency_median", "order_index", "invert_quantile",
    "invert_mean", "uniforms", "FamilyId",
]
