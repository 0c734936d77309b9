import pytest

from qldp import make_family

# (family id, fixed params, theta0 values)
CASES = [
    ("weibull-scale", {"rho": 1.0}, (0.5, 1.0, 3.0)),
    ("weibull-scale", {"rho": 0.5}, (1.0, 2.0)),
    ("weibull-scale", {"rho": 2.5}, (0.7, 1.0)),
    ("normal-scale", {"eta": 0.0}, (1.0, 2.0)),
    ("normal-scale", {"eta": 0.8}, (1.0,)),
    ("cauchy-scale", {"eta": 1.0}, (1.0, 0.5)),
    ("logistic-scale", {"eta": -0.5}, (1.0,)),
    ("gumbel-scale", {"eta": 0.3}, (1.0, 2.0)),
    ("normal-loc", {"s": 1.0}, (0.0, 1.5)),
    ("cauchy-loc", {"s": 2.0}, (-1.0,)),
    ("logistic-loc", {"s": 0.7}, (0.0,)),
    ("gumbel-loc", {"s": 1.3}, (0.4,)),
    ("skew-normal", {"s": 1.0}, (0.0, 0.5, -0.3)),
    ("skew-cauchy", {"s": 1.0}, (0.0, 0.4)),
    ("skew-logistic", {"s": 2.0}, (0.0, -0.6)),
    ("pareto", {}, (0.4, 1.0)),
    ("right-endpoint", {"g": "identity"}, (1.0, 2.0)),
    ("right-endpoint", {"g": "exp-minus-one"}, (1.0, 0.5)),
    ("right-endpoint", {"g": "power", "y": 2.0}, (1.0, 3.0)),
    ("gtilde", {"base": "normal-loc"}, (0.0, 0.7)),
    ("gtilde", {"base": "logistic-loc"}, (0.0,)),
]

LIGHT = {"weibull-scale", "gumbel-scale", "normal-loc", "logistic-loc", "gumbel-loc",
         "skew-normal", "skew-logistic", "right-endpoint"}


def case_id(case):
    fid, params, _ = case
    return fid + "".join(f"-{k}{v}" for k, v in params.items())


def family_theta_cases():
    out = []
    for case in CASES:
        for t0 in case[2]:
            out.append(pytest.param(case[0], case[1], t0, id=f"{case_id(case)}-t{t0}"))
    return out


@pytest.fixture
def fam_factory():
    return make_family


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
