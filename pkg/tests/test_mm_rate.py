import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qldp import DomainError, MMInapplicableError, MMUndefinedError, make_family
from qldp._numerics import second_derivative
from qldp.distributions import EULER_GAMMA
from qldp.mm_rate import (MmRateContext, cgf, gmm_normal_scale_curvature, gmm_normal_scale_rate,
                          legendre, mm_curvature, mm_rate, mm_rate_curve)

from conftest import CASES, LIGHT


def light_cases():
    out = []
    for fid, p, t0s in CASES:
        if fid in LIGHT and not (fid == "weibull-scale" and p["rho"] < 1):
            out += [pytest.param(fid, p, t0, id=f"{fid}-{p}-{t0}") for t0 in t0s]
    return out


def test_cgf_examples():
    for fid, p, t0s in CASES:
        fam = make_family(fid, **p)
        if fam.tail_class.value == "undefined":
            with pytest.raises(MMUndefinedError):
                cgf(MmRateContext(fam, t0s[0]), 0.1)
            continue
        assert cgf(MmRateContext(fam, t0s[0]), 0.0) == 0.0
    ctx = MmRateContext(make_family("weibull-scale"), 2.0)
    for g in (-3.0, -0.2, 0.1, 0.45):
        assert cgf(ctx, g) == pytest.approx(-math.log1p(-2.0 * g), rel=1e-12)
    assert cgf(ctx, 0.5) == math.inf
    par = MmRateContext(make_family("pareto"), 0.5, exploratory=True)
    assert cgf(par, 1e-6) == math.inf and cgf(par, 3.0) == math.inf
    uni = MmRateContext(make_family("right-endpoint"), 1.5)
    for g in (-2.0, 1e-9, 0.7):
        assert cgf(uni, g) == pytest.approx(math.log(math.expm1(g * 1.5) / (g * 1.5)), rel=1e-9)


@pytest.mark.parametrize("fid,params,t0", light_cases())
def test_cgf_convex(fid, params, t0):
    fam = make_family(fid, **params)
    ctx = MmRateContext(fam, t0)
    sd = math.sqrt(fam.variance(t0))
    lo, hi = fam.cgf_domain(t0)
    gs = np.linspace(max(lo, -3 / sd) * 0.99, min(hi, 3 / sd) * 0.99, 41)
    v = np.array([cgf(ctx, g) for g in gs])
    assert np.all(v[:-2] - 2 * v[1:-1] + v[2:] >= -1e-10)


@pytest.mark.parametrize("fid,params,t0", light_cases())
def test_legendre_zero_at_mean_and_nonnegative(fid, params, t0):
    fam = make_family(fid, **params)
    ctx = MmRateContext(fam, t0)
    m, sd = fam.mean(t0), math.sqrt(fam.variance(t0))
    assert legendre(ctx, m) == 0.0
    lo, hi = fam.support(t0)
    for k in (-2.0, -0.5, 0.3, 1.5):
        x = m + k * sd
        if lo < x < hi:
            assert legendre(ctx, x) > 0.0


def test_numeric_legendre_matches_closed_forms():
    ctx = MmRateContext(make_family("weibull-scale"), 1.3)
    for x in np.linspace(0.2, 5.0, 25):
        u = x / 1.3
        assert legendre(ctx, x) == pytest.approx(u - 1 - math.log(u), rel=1e-7, abs=1e-12)
    ctx = MmRateContext(make_family("normal-loc", s=0.7), -0.4)
    for x in np.linspace(-3, 3, 25):
        assert legendre(ctx, x) == pytest.approx((x + 0.4) ** 2 / (2 * 0.49), rel=1e-7, abs=1e-12)


def test_uniform_legendre_brute_force():
    ctx = MmRateContext(make_family("right-endpoint"), 1.0)
    gs = np.arange(-60.0, 60.0, 1e-4)
    lam = np.log(np.expm1(gs) / gs)
    for x in (0.3, 0.5, 0.62, 0.8):
        brute = float(np.max(gs * x - lam))
        assert legendre(ctx, x) == pytest.approx(brute, abs=1e-6)


def test_mm_rate_examples():
    ctx = MmRateContext(make_family("weibull-scale"), 2.0)
    assert mm_rate(ctx, 2.0) == 0.0
    for t in (0.5, 1.7, 3.0, 9.0):
        assert mm_rate(ctx, t) == pytest.approx(t / 2 - 1 - math.log(t / 2), rel=1e-13)
    heavy = MmRateContext(make_family("weibull-scale", rho=0.5), 1.0)
    for t in (1.01, 1.5, 4.0):
        assert mm_rate(heavy, t) == 0.0
    assert mm_rate(heavy, 0.8) > 0.0


def test_mm_errors():
    with pytest.raises(MMUndefinedError):
        mm_rate(MmRateContext(make_family("cauchy-loc"), 0.0), 0.2)
    with pytest.raises(MMUndefinedError):
        mm_rate(MmRateContext(make_family("normal-scale"), 1.0), 1.2)
    with pytest.raises(MMInapplicableError):
        mm_rate(MmRateContext(make_family("pareto"), 0.5), 0.6)
    v = mm_rate(MmRateContext(make_family("pareto"), 0.3, exploratory=True), 0.2)
    assert v > 0.0
    with pytest.raises(DomainError):
        gmm_normal_scale_rate(1.0, 1.2, make_family("weibull-scale"))


def test_mm_curvature_examples():
    for rho in (1.0, 2.0, 3.5):
        fam = make_family("weibull-scale", rho=rho)
        g1, g2 = math.gamma(1 + 1 / rho), math.gamma(1 + 2 / rho)
        want = g1 ** 2 / (1.5 ** 2 * (g2 - g1 ** 2))
        assert mm_curvature(MmRateContext(fam, 1.5)) == pytest.approx(want, rel=1e-12)
    assert mm_curvature(MmRateContext(make_family("gumbel-loc", s=1.4), 0.3)) == \
        pytest.approx(6 / (math.pi ** 2 * 1.4 ** 2), rel=1e-12)
    assert mm_curvature(MmRateContext(make_family("gumbel-scale", eta=0.0), 2.0)) == \
        pytest.approx(6 * EULER_GAMMA ** 2 / (4 * math.pi ** 2), rel=1e-12)


@pytest.mark.parametrize("fid,params,t0", light_cases())
def test_mm_curvature_matches_fd(fid, params, t0):
    ctx = MmRateContext(make_family(fid, **params), t0)
    fd = second_derivative(lambda t: mm_rate(ctx, t), t0)
    assert mm_curvature(ctx) == pytest.approx(fd, rel=1e-5)


def test_weibull_curvature_increasing_in_rho():
    rhos = np.linspace(0.2, 5.0, 49)
    j = [mm_curvature(MmRateContext(make_family("weibull-scale", rho=r), 1.0)) for r in rhos]
    assert np.all(np.diff(j) > 0)


def test_gmm():
    assert gmm_normal_scale_rate(1.3, 1.3) == 0.0
    assert gmm_normal_scale_rate(1.0, -0.1) == math.inf
    assert gmm_normal_scale_curvature(1.0) == 2.0
    for t0 in (0.5, 1.0, 3.0):
        fd = second_derivative(lambda t: gmm_normal_scale_rate(t0, t), t0)
        assert fd == pytest.approx(2 / t0 ** 2, rel=1e-6)


@given(st.floats(0.05, 20.0), st.floats(0.05, 20.0))
@settings(max_examples=200, deadline=None)
def test_gmm_rate_formula(t0, t):
    r = (t / t0) ** 2
    assert gmm_normal_scale_rate(t0, t) == pytest.approx(0.5 * (r - 1 - math.log(r)), rel=1e-9, abs=1e-15)


def test_curve_meta():
    c = mm_rate_curve(MmRateContext(make_family("gumbel-loc"), 0.0), np.linspace(-1, 1, 11))
    assert c.meta["estimator"] == "mm" and len(c.rows()) == 11
    assert c.values[5] == 0.0
