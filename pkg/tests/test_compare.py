import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qldp import DomainError, make_family
from qldp.compare import (Verdict, compare_mq_gmm_normal_scale, compare_mq_ml, compare_mq_mm,
                          curvature_verdict, figure1_data, figure2_data, gmm_flip_eta,
                          right_endpoint_flip_check, right_endpoint_lambda0, weibull_mm_curvature,
                          weibull_rho0, weibull_rho0_corrected)
from qldp.distributions import EULER_GAMMA
from qldp.lambda_opt import lambda_tilde_1, lambda_tilde_2

C = 4 * lambda_tilde_1() * (1 - lambda_tilde_1())


def test_exponential_mm_faster():
    for t0 in (0.5, 2.0):
        v = compare_mq_mm(make_family("weibull-scale"), t0, lambda_tilde_1())
        assert v.verdict is Verdict.MM_FASTER
        assert v.other_curvature == pytest.approx(1 / t0 ** 2, rel=1e-12)
        assert v.mq_curvature == pytest.approx(C / t0 ** 2, rel=1e-12)


def test_gumbel_loc_mq_faster():
    v = compare_mq_mm(make_family("gumbel-loc"), 0.0, lambda_tilde_2())
    assert v.verdict is Verdict.MQ_FASTER
    assert v.mq_curvature == pytest.approx(C, rel=1e-12)
    assert v.other_curvature == pytest.approx(6 / math.pi ** 2, rel=1e-12)


def test_heavy_weibull_verdicts():
    # true curvatures carry rho^2; the crossover sits at the corrected threshold
    assert compare_mq_mm(make_family("weibull-scale", rho=0.3), 1.0, lambda_tilde_1()).verdict \
        is Verdict.MQ_FASTER
    assert compare_mq_mm(make_family("weibull-scale", rho=0.5), 1.0, lambda_tilde_1()).verdict \
        is Verdict.INCOMPARABLE
    r0 = weibull_rho0_corrected()
    below = compare_mq_mm(make_family("weibull-scale", rho=r0 - 1e-3), 1.0, lambda_tilde_1())
    above = compare_mq_mm(make_family("weibull-scale", rho=r0 + 1e-3), 1.0, lambda_tilde_1())
    assert below.verdict is Verdict.MQ_FASTER and above.verdict is Verdict.INCOMPARABLE


def test_rho0():
    r0 = weibull_rho0()
    assert abs(r0 - 0.81068) <= 1e-3
    assert abs(C - weibull_mm_curvature(r0)) / weibull_mm_curvature(r0) <= 1e-6
    assert weibull_mm_curvature(0.05) < 1e-3
    rc = weibull_rho0_corrected()
    assert rc == pytest.approx(0.4068230768, abs=1e-8)
    assert rc ** 2 * C == pytest.approx(weibull_mm_curvature(rc), rel=1e-8)


def test_weibull_mm_curvature_gamma_form():
    for rho in (0.3, 1.0, 2.2):
        g1, g2 = math.gamma(1 + 1 / rho), math.gamma(1 + 2 / rho)
        assert weibull_mm_curvature(rho, 2.0) == pytest.approx(g1 ** 2 / (4 * (g2 - g1 ** 2)), rel=1e-12)


def test_mm_undefined_and_inapplicable():
    for fid in ("cauchy-loc", "cauchy-scale", "skew-cauchy", "normal-scale", "logistic-scale"):
        v = compare_mq_mm(make_family(fid), 0.2 if "skew" in fid else 1.0, 0.3)
        assert v.verdict is Verdict.MM_UNDEFINED and v.other_curvature is None
    v = compare_mq_mm(make_family("pareto"), 0.4, 0.7)
    assert v.verdict is Verdict.MM_LDP_INAPPLICABLE


@pytest.mark.parametrize("g,params", [("identity", {}), ("power", {"y": 0.5}), ("power", {"y": 2.0}),
                                      ("power", {"y": 5.0}), ("exp-minus-one", {})])
def test_right_endpoint_threshold(g, params):
    fam = make_family("right-endpoint", g=g, **params)
    for t0 in (0.5, 1.0, 2.0):
        lam0 = right_endpoint_lambda0(fam, t0)
        assert 0 < lam0 < 1
        if g == "power":
            y = params["y"]
            assert abs(lam0 - (y + 2) / (2 * y + 2)) <= 1e-12
        chk = right_endpoint_flip_check(fam, t0)
        assert chk["mismatches"] == []


def test_right_endpoint_threshold_exp_closed_form():
    fam = make_family("right-endpoint", g="exp-minus-one")
    for t in (0.3, 1.0, 2.0):
        e = math.exp(t)
        want = (e * e - 2 * e * (1 + t) + (1 + t) ** 2) / (2 * e * e - e * (4 + 2 * t + t * t) + 2 + 2 * t + t * t)
        assert right_endpoint_lambda0(fam, t) == pytest.approx(want, rel=1e-10)


def test_uniform_at_threshold_is_incomparable():
    v = compare_mq_mm(make_family("right-endpoint"), 1.0, 0.75)
    assert v.verdict is Verdict.INCOMPARABLE


def test_ml_comparison():
    v = compare_mq_ml(make_family("right-endpoint"), 1.0, 0.9)
    assert v.verdict is Verdict.ML_FASTER and v.other_curvature == math.inf
    assert compare_mq_ml(make_family("normal-loc"), 0.0, 0.5).verdict is Verdict.ML_FASTER
    with pytest.raises(DomainError):
        compare_mq_ml(make_family("gumbel-loc"), 0.0, 0.5)


def test_gmm_normal_scale():
    v = compare_mq_gmm_normal_scale(0.0, 1.0)
    assert v.verdict is Verdict.GMM_FASTER
    assert abs(v.mq_curvature - 0.6085) <= 0.002
    for t0 in (0.5, 4.0):
        w = compare_mq_gmm_normal_scale(0.0, t0)
        assert w.verdict is Verdict.GMM_FASTER
        assert w.mq_curvature * t0 ** 2 == pytest.approx(v.mq_curvature, rel=1e-9)
    for eta in (-50.0, 50.0):
        assert compare_mq_gmm_normal_scale(eta, 1.0).verdict is Verdict.MQ_FASTER


def test_gmm_flip_point():
    eta = gmm_flip_eta(1.0)
    assert eta is not None and 0 < eta < 50
    assert compare_mq_gmm_normal_scale(eta - 1e-3).verdict is Verdict.GMM_FASTER
    assert compare_mq_gmm_normal_scale(eta + 1e-3).verdict is Verdict.MQ_FASTER


@given(st.floats(1e-6, 1e6), st.floats(1e-6, 1e6))
@settings(max_examples=300, deadline=None)
def test_verdict_antisymmetry(a, b):
    v1, v2 = curvature_verdict(a, b), curvature_verdict(b, a)
    flip = {Verdict.MQ_FASTER: Verdict.MM_FASTER, Verdict.MM_FASTER: Verdict.MQ_FASTER,
            Verdict.TIE: Verdict.TIE}
    assert flip[v1] is v2


@given(st.floats(0.2, 5.0), st.floats(0.05, 0.95), st.floats(0.1, 10.0))
@settings(max_examples=60, deadline=None)
def test_scale_verdict_theta0_invariant(rho, lam, t0):
    fam = make_family("weibull-scale", rho=rho)
    assert compare_mq_mm(fam, t0, lam).verdict is compare_mq_mm(fam, 1.0, lam).verdict


def test_figure1():
    t = figure1_data()
    j = t.column("j2")
    assert len(t) == 121
    assert np.all(j == j[0]) and j[0] == pytest.approx(6 * EULER_GAMMA ** 2 / math.pi ** 2, rel=1e-14)
    assert np.all(np.maximum(t.column("i2_lambda_tilde_1"), t.column("i2_lambda_tilde_2")) > j)


def test_figure2():
    t = figure2_data()
    th, d = t.column("theta"), t.column("mq_rate") - t.column("mm_rate")
    assert len(t) == 301
    left, right = d[th < 1 - 1e-9], d[th > 1 + 1e-9]
    assert np.all(left < 0) and np.all(right > 0)
