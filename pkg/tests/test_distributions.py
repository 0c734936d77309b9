import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from qldp import DomainError, FamilyId, MMUndefinedError, make_family, make_gtilde, skew_quantile
from qldp.distributions import EULER_GAMMA

from conftest import family_theta_cases

LAMS = np.linspace(0.01, 0.99, 99)


@pytest.mark.parametrize("fid,params,t0", family_theta_cases())
def test_roundtrip_and_monotone(fid, params, t0):
    fam = make_family(fid, **params)
    q = fam.quantile(t0, LAMS)
    assert np.all(np.diff(q) > 0)
    assert np.max(np.abs(fam.cdf(t0, q) - LAMS)) <= 1e-10


@pytest.mark.parametrize("fid,params,t0", family_theta_cases())
def test_pdf_is_derivative_of_cdf(fid, params, t0):
    fam = make_family(fid, **params)
    for x in fam.quantile(t0, np.array([0.1, 0.3, 0.62, 0.9])):
        h = 1e-5 * max(1.0, abs(x))
        fd = (fam.cdf(t0, x + h) - fam.cdf(t0, x - h)) / (2 * h)
        assert fd == pytest.approx(float(fam.pdf(t0, x)), rel=1e-6)


@pytest.mark.parametrize("fid,params,t0", family_theta_cases())
def test_moments_match_quadrature(fid, params, t0):
    fam = make_family(fid, **params)
    try:
        m, v = fam.mean(t0), fam.variance(t0)
    except MMUndefinedError:
        return
    lo, hi = fam.support(t0)
    pts = [float(x) for x in fam.quantile(t0, np.array([0.001, 0.25, 0.5, 0.75, 0.999]))]
    f = lambda x: float(fam.pdf(t0, x))  # noqa: E731
    edges = [lo] + pts + [hi]
    m_num = sum(integrate.quad(lambda x: x * f(x), a, b, limit=200)[0] for a, b in zip(edges, edges[1:]))
    v_num = sum(integrate.quad(lambda x: (x - m_num) ** 2 * f(x), a, b, limit=200)[0]
                for a, b in zip(edges, edges[1:]))
    assert m_num == pytest.approx(m, rel=1e-6, abs=1e-9)
    assert v_num == pytest.approx(v, rel=1e-6)


def test_examples():
    assert make_family("weibull-scale", rho=1).cdf(1.0, 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-15)
    assert make_family("pareto").quantile(1.0, 0.75) == pytest.approx(4.0, rel=1e-15)
    assert make_family("right-endpoint", g="identity").cdf(2.0, 1.0) == pytest.approx(0.5)


def test_against_scipy():
    # independent implementations as oracles
    x = np.linspace(-4, 4, 41)
    assert np.allclose(make_family("normal-loc", s=2).cdf(0.5, x), stats.norm.cdf(x, 0.5, 2), atol=1e-14)
    assert np.allclose(make_family("cauchy-loc").cdf(0.0, x), stats.cauchy.cdf(x), atol=1e-14)
    assert np.allclose(make_family("logistic-loc").pdf(0.0, x), stats.logistic.pdf(x), atol=1e-14)
    assert np.allclose(make_family("gumbel-loc").cdf(0.0, x), stats.gumbel_r.cdf(x), atol=1e-14)
    xp = np.linspace(0.1, 5, 30)
    assert np.allclose(make_family("weibull-scale", rho=2.5).cdf(1.3, xp),
                       stats.weibull_min.cdf(xp, 2.5, scale=1.3), atol=1e-14)


def test_scale_and_location_identities():
    for fid, p in [("weibull-scale", {"rho": 0.7}), ("normal-scale", {"eta": 0.4}),
                   ("gumbel-scale", {"eta": -1.0}), ("cauchy-scale", {"eta": 0.0})]:
        fam = make_family(fid, **p)
        assert np.allclose(fam.quantile(2.5, LAMS), 2.5 * fam.quantile(1.0, LAMS), rtol=1e-14, atol=1e-14)
    for fid in ("normal-loc", "cauchy-loc", "logistic-loc", "gumbel-loc", "gtilde"):
        fam = make_family(fid)
        assert np.allclose(fam.quantile(-1.25, LAMS), -1.25 + fam.quantile(0.0, LAMS), atol=1e-13)


@pytest.mark.parametrize("fid", ["skew-normal", "skew-cauchy", "skew-logistic"])
def test_skew_reduces_to_base(fid):
    base = make_family(fid.replace("skew-", "") + "-loc")
    fam = make_family(fid)
    x = np.linspace(-8, 8, 161)
    assert np.max(np.abs(fam.cdf(0.0, x) - base.cdf(0.0, x))) <= 1e-12


@pytest.mark.parametrize("fid", ["normal-loc", "cauchy-loc", "logistic-loc", "gtilde"])
def test_symmetry(fid):
    fam = make_family(fid)
    x = np.linspace(-6, 6, 121)
    assert np.max(np.abs(fam.cdf(0.0, x) - (1 - fam.cdf(0.0, -x)))) <= 1e-14


def test_skew_quantile_examples():
    base = make_family("logistic-loc")
    assert skew_quantile(0.0, 0.5, base) == pytest.approx(0.0, abs=1e-15)
    assert skew_quantile(0.5, 0.75, make_family("normal-loc")) == pytest.approx(0.0, abs=1e-15)
    # invert the piecewise cdf numerically
    fam = make_family("skew-logistic")
    from scipy.optimize import brentq
    x = brentq(lambda z: fam.cdf(0.5, z) - 0.9, -50, 50, xtol=1e-14)
    assert skew_quantile(0.5, 0.9, base) == pytest.approx(x, rel=1e-10)
    assert skew_quantile(0.5, 0.9, base) == pytest.approx(0.5 * math.log(0.8 / 0.2), rel=1e-14)


@given(st.floats(-0.95, 0.95), st.floats(0.001, 0.999))
@settings(max_examples=200, deadline=None)
def test_skew_quantile_continuous_and_consistent(theta, lam):
    fam = make_family("skew-normal")
    x = float(skew_quantile(theta, lam, fam.shape))
    assert fam.cdf(theta, x) == pytest.approx(lam, abs=1e-10)
    brk = 0.5 * (1 + theta)
    a, b = skew_quantile(theta, brk, fam.shape), skew_quantile(theta, np.nextafter(brk, 1), fam.shape)
    assert abs(float(a) - float(b)) < 1e-9


def test_gtilde_examples():
    fam = make_gtilde(make_family("normal-loc"))
    g = fam.shape
    assert float(g.cdf(0.0)) == pytest.approx(0.5, abs=1e-15)
    assert float(fam.quantile(0.0, fam.cdf(0.0, 0.5))) == pytest.approx(0.5, abs=1e-10)
    d = 2 * stats.norm.pdf(0) + 1
    assert g.lower_break == pytest.approx(1 / (2 * d), rel=1e-14)


@pytest.mark.parametrize("base", ["normal-loc", "logistic-loc", "cauchy-loc"])
def test_gtilde_c2_at_seams(base):
    g = make_gtilde(make_family(base)).shape
    for x0 in (-1.0, 1.0):
        h = 1e-3
        left = (g.cdf(x0) - 2 * g.cdf(x0 - h) + g.cdf(x0 - 2 * h)) / h ** 2
        right = (g.cdf(x0 + 2 * h) - 2 * g.cdf(x0 + h) + g.cdf(x0)) / h ** 2
        assert abs(left - right) <= 1e-5 + 3 * h * 1.0
        assert abs(float(g.cdf(x0 + 1e-12)) - float(g.cdf(x0 - 1e-12))) < 1e-11


def test_gtilde_rejects_bad_bases():
    with pytest.raises(DomainError):
        make_gtilde(make_family("gumbel-loc"))
    with pytest.raises(DomainError):
        make_gtilde(make_family("weibull-scale"))


def test_validation():
    with pytest.raises(DomainError):
        make_family("weibull-scale", rho=0)
    with pytest.raises(DomainError):
        make_family("normal-loc", s=-1)
    with pytest.raises(DomainError):
        make_family("right-endpoint", g="power", y=0)
    with pytest.raises(DomainError):
        make_family("nope")
    with pytest.raises(DomainError):
        make_family("pareto", rho=2)
    fam = make_family("weibull-scale")
    with pytest.raises(DomainError):
        fam.cdf(-1.0, 1.0)
    with pytest.raises(DomainError):
        fam.quantile(1.0, 1.0)
    with pytest.raises(DomainError):
        make_family("skew-normal").check_theta(1.0)


def test_open_support_endpoints_are_errors():
    with pytest.raises(DomainError):
        make_family("pareto").pdf(1.0, 1.0)
    with pytest.raises(DomainError):
        make_family("right-endpoint").cdf(1.0, 1.0)


def test_moment_flags():
    with pytest.raises(MMUndefinedError):
        make_family("cauchy-loc").mean(0.0)
    p = make_family("pareto")
    assert p.mean(0.5) == pytest.approx(2.0)
    with pytest.raises(MMUndefinedError):
        p.mean(1.0)
    with pytest.raises(MMUndefinedError):
        p.variance(0.6)
    g = make_family("gumbel-scale", eta=0.0)
    assert g.mean(2.0) == pytest.approx(2.0 * EULER_GAMMA)


def test_family_ids_complete():
    assert len(FamilyId) == 15


@given(st.floats(0.2, 5.0), st.floats(0.01, 0.99), st.floats(0.1, 10.0))
@settings(max_examples=100, deadline=None)
def test_weibull_quantile_closed_form(rho, lam, theta):
    fam = make_family("weibull-scale", rho=rho)
    assert float(fam.quantile(theta, lam)) == pytest.approx(theta * (-math.log1p(-lam)) ** (1 / rho), rel=1e-13)


@pytest.mark.parametrize("fid,params,t0", family_theta_cases())
def test_cgf_matches_quadrature(fid, params, t0):
    fam = make_family(fid, **params)
    if fam.mm_applicability.value == "undefined" or fid == "pareto":
        return
    m = fam.mean(t0)
    sd = math.sqrt(fam.variance(t0))
    lo, hi = fam.cgf_domain(t0)
    for g in (-0.7 / sd, 0.3 / sd):
        if not lo < g < hi:
            continue
        a, b = fam.support(t0)

        def f(x):
            if not a < x < b:
                return 0.0
            lp = float(fam.logpdf(t0, x))
            return math.exp(min(g * (x - m) + lp, 700.0)) if lp > -np.inf else 0.0
        val = sum(integrate.quad(f, u, v, limit=400, epsabs=0, epsrel=1e-12)[0]
                  for u, v in ((a, m), (m, b)))
        assert fam.cgf_centered_value(t0, g) == pytest.approx(math.log(val), abs=1e-8)
