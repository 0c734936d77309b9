"""Choice of the quantile level: maximise the curvature ``lam -> I''_{lam,theta0}(theta0)``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import bisect_newton, golden_max, second_derivative
from .distributions import (FamilyId, FamilySpec, RightEndpointFamily, make_family,
                            make_gtilde)
from .errors import DomainError
from .mq_rate import MqRateContext, curvature_levels, mq_rate

GRID_POINTS = 4096
GRID_MARGIN = 1e-6
REFINE_TOL = 1e-8
TIE_TOL = 1e-9
DEDUPE_TOL = 1e-7


def f1(lam):
    """``(1 - lam) log(1 - lam)^2 / lam``; maximised at lambda_tilde_1."""
    lam = np.asarray(lam, dtype=float)
    return (1.0 - lam) * np.log1p(-lam) ** 2 / lam


def f2(lam):
    """``lam log(lam)^2 / (1 - lam)``; maximised at lambda_tilde_2."""
    lam = np.asarray(lam, dtype=float)
    return lam * np.log(lam) ** 2 / (1.0 - lam)


def lambda_tilde_1() -> float:
    """Root in (1/2, 1) of ``-2 lam - log(1 - lam) = 0`` (about 0.7968)."""
    return bisect_newton(lambda x: -2.0 * x - math.log1p(-x),
                         lambda x: -2.0 + 1.0 / (1.0 - x), 0.5, 1.0 - 1e-12)


def lambda_tilde_2() -> float:
    """Root in (0, 1/2) of ``log lam + 2 - 2 lam = 0`` (about 0.2032)."""
    return bisect_newton(lambda x: math.log(x) + 2.0 - 2.0 * x,
                         lambda x: 1.0 / x - 2.0, 1e-12, 0.5)


@dataclass
class OptimalLambdaReport:
    family: str
    family_id: str
    fixed_params: dict
    theta0: float
    maximizers: list[float]
    curvature_at_max: float | None
    method: str
    symmetric_pair: bool = False
    at_window_edge: bool = False
    note: str = ""
    settings: dict = field(default_factory=dict)

    @property
    def lambda_max(self) -> float | None:
        return self.maximizers[0] if self.maximizers else None


def _closed_form_level(family: FamilySpec) -> float | None:
    if family.id in (FamilyId.WEIBULL_SCALE, FamilyId.PARETO):
        return lambda_tilde_1()
    if family.id is FamilyId.GUMBEL_LOC:
        return lambda_tilde_2()
    if family.id is FamilyId.LOGISTIC_LOC:
        return 0.5
    return None


def _reflection_symmetric(family, theta0, grid, vals) -> bool:
    mirror = curvature_levels(family, theta0, 1.0 - grid)
    scale = max(float(np.max(vals)), 1e-300)
    return bool(np.max(np.abs(mirror - vals)) <= 1e-12 * scale)


def grid_maximizers(family: FamilySpec, theta0: float, n_grid: int = GRID_POINTS,
                    margin: float = GRID_MARGIN):
    """Grid scan plus golden refinement.

    Returns ``(maximizers, sup, at_edge, grid, values)``.
    """
    grid = np.linspace(margin, 1.0 - margin, n_grid)
    vals = np.asarray(curvature_levels(family, theta0, grid), dtype=float)
    vals = np.where(np.isfinite(vals), vals, -np.inf)

    def curv(lam):
        return float(curvature_levels(family, theta0, lam))

    cand = []
    for i in range(n_grid):
        left = vals[i - 1] if i > 0 else -np.inf
        right = vals[i + 1] if i < n_grid - 1 else -np.inf
        if vals[i] >= left and vals[i] >= right and np.isfinite(vals[i]):
            if i == 0 or i == n_grid - 1:
                cand.append((float(grid[i]), float(vals[i]), True))
                continue
            x, fx = golden_max(curv, float(grid[i - 1]), float(grid[i + 1]), tol=REFINE_TOL)
            if fx < vals[i]:
                x, fx = float(grid[i]), float(vals[i])
            cand.append((x, fx, False))
    if not cand:
        return [], None, False, grid, vals
    sup = max(c[1] for c in cand)
    keep = sorted((c for c in cand if c[1] >= sup - TIE_TOL * max(1.0, abs(sup))),
                  key=lambda c: c[0])
    out = []
    for c in keep:
        if out and abs(c[0] - out[-1][0]) <= DEDUPE_TOL:
            if c[1] > out[-1][1]:
                out[-1] = c
            continue
        out.append(c)
    at_edge = any(c[2] for c in out)
    return [c[0] for c in out], sup, at_edge, grid, vals


def optimal_lambda(family: FamilySpec, theta0: float, n_grid: int = GRID_POINTS,
                   margin: float = GRID_MARGIN) -> OptimalLambdaReport:
    """All levels maximising ``lam -> I''_{lam,theta0}(theta0)`` on (0, 1)."""
    theta0 = family.check_theta(theta0)
    settings = {"grid_points": n_grid, "grid_margin": margin, "refine_tol": REFINE_TOL,
                "tie_tol": TIE_TOL}
    base = dict(family=family.label, family_id=family.id.value,
                fixed_params=dict(family.fixed_params), theta0=theta0, settings=settings)
    if isinstance(family, RightEndpointFamily):
        return OptimalLambdaReport(**base, maximizers=[], curvature_at_max=None, method="none",
                                   note="no interior maximizer: curvature increases in the level")

    closed = _closed_form_level(family)
    if closed is not None:
        return OptimalLambdaReport(**base, maximizers=[closed],
                                   curvature_at_max=float(curvature_levels(family, theta0, closed)),
                                   method="closed_form")

    lams, sup, at_edge, grid, vals = grid_maximizers(family, theta0, n_grid, margin)
    if not lams:
        raise DomainError(f"curvature is not finite anywhere for {family.label}")
    sym = False
    if len(lams) == 2 and abs(lams[0] + lams[1] - 1.0) <= 1e-6 \
            and _reflection_symmetric(family, theta0, grid, vals):
        a = 0.5 * (lams[0] + 1.0 - lams[1])
        lams, sym = [a, 1.0 - a], True
    note = ""
    if at_edge:
        note = "supremum at the edge of the search window; no interior maximizer confirmed"
    curv = max(float(curvature_levels(family, theta0, x)) for x in lams)
    return OptimalLambdaReport(**base, maximizers=lams, curvature_at_max=curv,
                               method="grid_plus_golden", symmetric_pair=sym,
                               at_window_edge=at_edge, note=note)


@dataclass
class CounterexampleReport:
    base: str
    slope: float
    window: tuple[float, float]
    max_rel_error: float
    max_rel_error_fd: float
    curvature_at_half: float
    curvature_near_edges: tuple[float, float]
    strict_local_min: bool
    base_derivative_at_half: dict


def counterexample_check(base: FamilySpec | str = "normal-loc", s: float = 1.0,
                         n_window: int = 201) -> CounterexampleReport:
    """Curvature of the three-piece location family on its linear window.

    On ``(G~(-1), G~(1))`` the curvature is ``slope^2 / (lam (1 - lam))`` with
    ``slope = G'(0) / (2 G'(0) + 1)``, so ``lam = 1/2`` is a local minimum.
    """
    if isinstance(base, str):
        base = make_family(base, s=s)
    fam = make_gtilde(base)
    shape = fam.shape
    lo, hi = shape.lower_break, shape.upper_break
    width = hi - lo
    lams = np.linspace(lo, hi, n_window + 2)[1:-1]
    got = np.asarray(curvature_levels(fam, 0.0, lams))
    slope = shape.slope
    want = slope ** 2 / (lams * (1.0 - lams))
    err = float(np.max(np.abs(got / want - 1.0)))
    # independent route: second difference of the rate itself
    fd_lams = lams[:: max(1, n_window // 20)]
    fd = np.array([second_derivative(lambda t, c=MqRateContext(fam, 0.0, float(x)): mq_rate(c, t),
                                     0.0) for x in fd_lams])
    err_fd = float(np.max(np.abs(fd * fd_lams * (1.0 - fd_lams) / slope ** 2 - 1.0)))
    delta = 1e-3 * width
    c_half = float(curvature_levels(fam, 0.0, 0.5))
    edges = (float(curvature_levels(fam, 0.0, lo + delta)),
             float(curvature_levels(fam, 0.0, hi - delta)))
    near = [float(curvature_levels(fam, 0.0, 0.5 + sgn * delta)) for sgn in (-1, 1)]
    strict = c_half < min(near) and c_half < min(edges)

    derivs = {}
    for fid in ("normal-loc", "cauchy-loc", "logistic-loc"):
        b = make_family(fid, s=base.fixed_params.get("s", 1.0))
        h = 1e-4
        derivs[fid] = float((curvature_levels(b, 0.0, 0.5 + h)
                             - curvature_levels(b, 0.0, 0.5 - h)) / (2 * h))
    return CounterexampleReport(base=base.label, slope=slope, window=(lo, hi), max_rel_error=err,
                                max_rel_error_fd=err_fd,
                                curvature_at_half=c_half, curvature_near_edges=edges,
                                strict_local_min=bool(strict), base_derivative_at_half=derivs)


@dataclass
class LimitRow:
    eta: float
    lambda_max: float
    maximizers: list[float]
    target: float
    distance: float


def lambda_max_limit(eta_grid, family_id: str = "gumbel-scale", theta0: float = 1.0):
    """Optimal level as a function of eta for a scale family.

    The reference value is lambda_tilde_2 for gumbel-scale and 1/2 for
    normal-scale; ``distance`` is measured from the maximiser closest to it.
    """
    targets = {"gumbel-scale": lambda_tilde_2(), "normal-scale": 0.5}
    if family_id not in targets:
        raise DomainError("level limit is tabulated for gumbel-scale and normal-scale only")
    target = targets[family_id]
    rows = []
    for eta in np.asarray(eta_grid, dtype=float):
        rep = optimal_lambda(make_family(family_id, eta=float(eta)), theta0)
        best = min(rep.maximizers, key=lambda x: abs(x - target))
        rows.append(LimitRow(float(eta), best, rep.maximizers, target, abs(best - target)))
    return rows


def gumbel_scale_lambda_limit(eta_grid, theta0: float = 1.0):
    return lambda_max_limit(eta_grid, "gumbel-scale", theta0)
