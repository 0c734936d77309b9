"""Local comparison of estimators through the curvature of their rate functions.

The estimator whose rate function has the larger second derivative at the
true parameter has the larger rate in a punctured neighbourhood of it, and so
converges exponentially faster locally.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._numerics import bisect
from .distributions import (EULER_GAMMA, FamilyId, FamilySpec, MMApplicability,
                            ParetoFamily, RightEndpointFamily, TailClass, make_family)
from .errors import DomainError, MMInapplicableError, MMUndefinedError
from .lambda_opt import lambda_tilde_1, lambda_tilde_2, optimal_lambda
from .mm_rate import (MmRateContext, gmm_normal_scale_curvature, mm_curvature, mm_rate)
from .mq_rate import MqRateContext, curvature_levels, mq_curvature, mq_rate
from .table import Table

TIE_TOL = 1e-9
INF_CURV = math.inf


class Verdict(str, enum.Enum):
    MQ_FASTER = "MQ_faster"
    MM_FASTER = "MM_faster"
    GMM_FASTER = "GMM_faster"
    ML_FASTER = "ML_faster"
    INCOMPARABLE = "incomparable"
    TIE = "tie"
    MM_UNDEFINED = "mm_undefined"
    MM_LDP_INAPPLICABLE = "mm_ldp_inapplicable"


@dataclass
class ComparisonVerdict:
    family: str
    theta0: float
    lam: float | None
    mq_curvature: float | None
    other_curvature: float | None
    other: str
    verdict: Verdict
    rationale: str
    applicability: str | None = None
    tail_class: str | None = None

    def as_dict(self) -> dict:
        return {"family": self.family, "theta0": self.theta0, "lambda": self.lam,
                "mq_curvature": self.mq_curvature, "other": self.other,
                "other_curvature": self.other_curvature, "verdict": self.verdict.value,
                "rationale": self.rationale, "applicability": self.applicability,
                "tail_class": self.tail_class}


def curvature_verdict(mq: float, other: float, other_wins: Verdict = Verdict.MM_FASTER,
                      tol: float = TIE_TOL) -> Verdict:
    """Larger curvature wins; relative differences within ``tol`` are a tie."""
    if abs(mq - other) <= tol * max(abs(mq), abs(other)):
        return Verdict.TIE
    return Verdict.MQ_FASTER if mq > other else other_wins


def _rates_cross(family, theta0, lam, delta=None) -> bool | None:
    """Whether ``I - J`` takes opposite signs just left and right of theta0."""
    if delta is None:
        delta = 1e-2 * max(1.0, abs(theta0))
    qctx, mctx = MqRateContext(family, theta0, lam), MmRateContext(family, theta0)
    try:
        signs = [np.sign(mq_rate(qctx, t) - mm_rate(mctx, t)) for t in (theta0 - delta, theta0 + delta)]
    except (DomainError, MMUndefinedError, MMInapplicableError):
        return None
    return bool(signs[0] * signs[1] < 0)


def compare_mq_mm(family: FamilySpec, theta0: float, lam: float) -> ComparisonVerdict:
    qctx = MqRateContext(family, theta0, lam)
    i2 = mq_curvature(qctx)
    app, tail = family.mm_applicability, family.tail_class
    base = dict(family=family.label, theta0=qctx.theta0, lam=qctx.lam, mq_curvature=i2,
                other="mm", applicability=app.value, tail_class=tail.value)
    if app is MMApplicability.UNDEFINED:
        return ComparisonVerdict(**base, other_curvature=None, verdict=Verdict.MM_UNDEFINED,
                                 rationale="no usable moment-matching estimator for this family")
    if isinstance(family, ParetoFamily):
        return ComparisonVerdict(**base, other_curvature=None, verdict=Verdict.MM_LDP_INAPPLICABLE,
                                 rationale="heavy tail: the sample-mean transform is not a good "
                                           "rate function, no LDP for the moment estimator")
    j2 = mm_curvature(MmRateContext(family, theta0))
    if tail is TailClass.HEAVY:
        # right of theta0 the moment rate is identically zero, so MQ wins there;
        # on the left compare I'' with the left second derivative of J
        if curvature_verdict(i2, j2) is Verdict.MQ_FASTER:
            return ComparisonVerdict(**base, other_curvature=j2, verdict=Verdict.MQ_FASTER,
                                     rationale="heavy tail: J = 0 right of theta0 and I'' exceeds "
                                               "the left second derivative of J")
        return ComparisonVerdict(**base, other_curvature=j2, verdict=Verdict.INCOMPARABLE,
                                 rationale="heavy tail: MQ larger right of theta0, MM larger or "
                                           "equal on the left")
    v = curvature_verdict(i2, j2)
    rationale = "curvature comparison at theta0"
    if v is Verdict.TIE:
        crossing = _rates_cross(family, theta0, lam)
        if crossing:
            v = Verdict.INCOMPARABLE
            rationale = "equal curvatures and the rate functions cross at theta0"
        else:
            rationale = "equal curvatures; higher-order comparison out of scope"
    return ComparisonVerdict(**base, other_curvature=j2, verdict=v, rationale=rationale)


# -- Weibull scale ----------------------------------------------------------

def weibull_mm_curvature(rho: float, theta0: float = 1.0) -> float:
    """``1 / (theta0^2 [Gamma(1+2/rho) / Gamma(1+1/rho)^2 - 1])``.

    For rho < 1 this is the left second derivative of the moment rate.
    """
    ratio_m1 = math.expm1(math.lgamma(1.0 + 2.0 / rho) - 2.0 * math.lgamma(1.0 + 1.0 / rho))
    return 1.0 / (theta0 ** 2 * ratio_m1)


def weibull_rho0(tol: float = 1e-10) -> float:
    """Root in (0, 1) of ``4 lt1 (1 - lt1) = 1 / (Gamma(1+2/rho)/Gamma(1+1/rho)^2 - 1)``.

    The defining equation compares the moment curvature with ``4 lt1 (1 - lt1)``,
    i.e. the MQ curvature without its ``rho^2`` factor; see
    :func:`weibull_rho0_corrected` for the crossover of the true curvatures.
    """
    lt = lambda_tilde_1()
    c = 4.0 * lt * (1.0 - lt)
    return bisect(lambda r: c - weibull_mm_curvature(r), 0.05, 1.0, tol=tol)


def weibull_rho0_corrected(tol: float = 1e-10) -> float:
    """Heavy-tail crossover of ``rho^2 4 lt1 (1 - lt1)`` and the moment curvature."""
    lt = lambda_tilde_1()
    c = 4.0 * lt * (1.0 - lt)
    return bisect(lambda r: r * r * c - weibull_mm_curvature(r), 0.05, 1.0, tol=tol)


# -- right-endpoint family --------------------------------------------------

def right_endpoint_lambda0(family: FamilySpec, theta0: float) -> float:
    """Level above which the MQ curvature exceeds the MM curvature."""
    if not isinstance(family, RightEndpointFamily):
        raise DomainError("threshold level is defined for right-endpoint families")
    theta0 = family.check_theta(theta0)
    g = family.g
    a = (family.mean_prime(theta0) * float(g.g(theta0))) ** 2
    b = family.variance(theta0) * float(g.g_prime(theta0)) ** 2
    return a / (a + b)


def right_endpoint_flip_check(family: FamilySpec, theta0: float, lams=None, gap: float = 1e-6) -> dict:
    """Verdicts on a level grid; MM must win below lambda0 and MQ above it."""
    lam0 = right_endpoint_lambda0(family, theta0)
    if lams is None:
        lams = np.concatenate([np.linspace(0.01, 0.99, 99), [lam0 - gap, lam0 + gap]])
    lams = np.sort(np.asarray(lams, dtype=float))
    # the threshold itself is a tie by construction
    lams = lams[np.abs(lams - lam0) >= 0.5 * gap]
    j2 = mm_curvature(MmRateContext(family, theta0))
    bad = []
    for lam in lams:
        i2 = float(curvature_levels(family, theta0, lam))
        v = curvature_verdict(i2, j2)
        want = Verdict.MM_FASTER if lam < lam0 else Verdict.MQ_FASTER
        if v is not want:
            bad.append(float(lam))
    return {"lambda0": lam0, "mm_curvature": j2, "levels": len(lams), "mismatches": bad}


def compare_mq_ml(family: FamilySpec, theta0: float, lam: float) -> ComparisonVerdict:
    """MQ against the maximum-likelihood estimator where its rate is available.

    Right-endpoint families: the ML estimator is the sample maximum, whose rate
    ``log(G(theta0)/G(theta))`` is linear (not quadratic) left of theta0 and
    infinite right of it, so it dominates every MQ level locally.  Families
    whose ML estimator is the sample mean (exponential, normal location) reuse
    the moment comparison.
    """
    qctx = MqRateContext(family, theta0, lam)
    i2 = mq_curvature(qctx)
    base = dict(family=family.label, theta0=qctx.theta0, lam=qctx.lam, mq_curvature=i2,
                other="ml", applicability=None, tail_class=family.tail_class.value)
    if isinstance(family, RightEndpointFamily):
        return ComparisonVerdict(**base, other_curvature=INF_CURV, verdict=Verdict.ML_FASTER,
                                 rationale="sample maximum: rate linear left of theta0, infinite right")
    if (family.id is FamilyId.WEIBULL_SCALE and family.fixed_params["rho"] == 1.0) \
            or family.id is FamilyId.NORMAL_LOC:
        res = compare_mq_mm(family, theta0, lam)
        v = Verdict.ML_FASTER if res.verdict is Verdict.MM_FASTER else res.verdict
        return ComparisonVerdict(**base, other_curvature=res.other_curvature, verdict=v,
                                 rationale="ML estimator equals the sample-mean estimator; " + res.rationale)
    raise DomainError(f"no maximum-likelihood rate available for {family.label}")



# -- normal scale: variance matching ----------------------------------------

def compare_mq_gmm_normal_scale(eta: float, theta0: float = 1.0) -> ComparisonVerdict:
    fam = make_family("normal-scale", eta=eta)
    rep = optimal_lambda(fam, theta0)
    lam = rep.maximizers[0]
    i2 = rep.curvature_at_max
    j2 = gmm_normal_scale_curvature(theta0)
    v = curvature_verdict(i2, j2, other_wins=Verdict.GMM_FASTER)
    return ComparisonVerdict(family=fam.label, theta0=float(theta0), lam=lam, mq_curvature=i2,
                             other_curvature=j2, other="gmm", verdict=v,
                             rationale="MQ at its optimal level against variance matching",
                             applicability=fam.mm_applicability.value,
                             tail_class=fam.tail_class.value)


def gmm_flip_eta(theta0: float = 1.0, eta_max: float = 50.0, step: float = 0.25,
                 tol: float = 1e-6) -> float | None:
    """Smallest eta >= 0 where MQ at its optimal level overtakes variance matching.

    Found numerically (scan then bisection); None if no flip up to ``eta_max``.
    """
    def gap(eta):
        return compare_mq_gmm_normal_scale(eta, theta0).mq_curvature - 2.0 / theta0 ** 2
    prev = 0.0
    for eta in np.arange(step, eta_max + step / 2, step):
        if gap(eta) > 0:
            return bisect(gap, prev, float(eta), tol=tol)
        prev = float(eta)
    return None


# -- figure datasets --------------------------------------------------------

def figure1_data(eta_grid=None, theta0: float = 1.0) -> Table:
    """Gumbel-scale curvatures at both universal levels against the MM value."""
    if eta_grid is None:
        eta_grid = np.round(np.linspace(-3.0, 3.0, 121), 12)
    l2, l1 = lambda_tilde_2(), lambda_tilde_1()
    j2 = 6.0 * EULER_GAMMA ** 2 / (theta0 ** 2 * math.pi ** 2)
    rows = []
    for eta in np.asarray(eta_grid, dtype=float):
        fam = make_family("gumbel-scale", eta=float(eta))
        i_l2, i_l1 = curvature_levels(fam, theta0, np.array([l2, l1]))
        exact = mm_curvature(MmRateContext(fam, theta0))
        rows.append((float(eta), float(i_l2), float(i_l1), j2, exact))
    meta = {"figure": 1, "family": "gumbel-scale", "theta0": theta0,
            "lambda_tilde_2": l2, "lambda_tilde_1": l1,
            "j2": "6 euler^2 / (pi^2 theta0^2)",
            "j2_exact_mean": "mu'^2 / sigma^2 with mu(theta) = theta (eta + euler)"}
    return Table(["eta", "i2_lambda_tilde_2", "i2_lambda_tilde_1", "j2", "j2_exact_mean"], rows, meta)


def figure2_data(theta_grid=None, theta0: float = 1.0, lam: float = 0.75) -> Table:
    """Uniform(0, theta) MQ rate at ``lam`` and MM rate near theta0."""
    if theta_grid is None:
        theta_grid = np.round(np.linspace(0.85, 1.15, 301), 12)
    fam = make_family("right-endpoint", g="identity")
    qctx, mctx = MqRateContext(fam, theta0, lam), MmRateContext(fam, theta0)
    rows = []
    for t in np.asarray(theta_grid, dtype=float):
        rows.append((float(t), mq_rate(qctx, t), mm_rate(mctx, t)))
    meta = {"figure": 2, "family": fam.label, "theta0": theta0, "lambda": lam}
    return Table(["theta", "mq_rate", "mm_rate"], rows, meta)
