import math

import numpy as np
import pytest
from scipy import stats

from doseforge.copulas import (
    EPS,
    CopulaFamily,
    CopulaSpec,
    empirical_kendall_tau,
    kendall_tau,
    sample_copula,
)
from doseforge.errors import ConfigError

N = 100_000

ALL_SPECS = [
    CopulaSpec(CopulaFamily.INDEPENDENCE),
    CopulaSpec(CopulaFamily.GAUSSIAN, 0.8),
    CopulaSpec(CopulaFamily.GAUSSIAN, -0.5),
    CopulaSpec(CopulaFamily.CLAYTON, 6.0),
    CopulaSpec(CopulaFamily.CLAYTON, 0.5),
    CopulaSpec(CopulaFamily.GUMBEL, 2.0),
    CopulaSpec(CopulaFamily.GUMBEL, 1.0),
    CopulaSpec(CopulaFamily.FRANK, 5.0),
    CopulaSpec(CopulaFamily.FRANK, -3.0),
    CopulaSpec(CopulaFamily.JOE, 6.0),
    CopulaSpec(CopulaFamily.JOE, 1.5),
]


@pytest.fixture(scope="module", params=ALL_SPECS, ids=lambda s: s.label)
def big_sample(request):
    spec = request.param
    return spec, sample_copula(spec, N, seed=11)


def test_marginals_uniform(big_sample):
    _, s = big_sample
    for x in (s.u, s.v):
        assert stats.kstest(x, "uniform").pvalue > 0.001


def test_kendall_tau_matches_analytic(big_sample):
    spec, s = big_sample
    # kendalltau on 1e5 points is O(n log n); fine
    assert empirical_kendall_tau(s) == pytest.approx(kendall_tau(spec), abs=0.02)


def test_strictly_inside_unit_square(big_sample):
    _, s = big_sample
    assert s.u.min() >= EPS and s.u.max() <= 1 - EPS
    assert s.v.min() >= EPS and s.v.max() <= 1 - EPS


@pytest.mark.parametrize("spec,tau", [
    (CopulaSpec(CopulaFamily.CLAYTON, 6.0), 0.75),
    (CopulaSpec(CopulaFamily.GUMBEL, 2.0), 0.5),
    (CopulaSpec(CopulaFamily.GAUSSIAN, 0.8), 0.5903344),
    (CopulaSpec(CopulaFamily.INDEPENDENCE), 0.0),
])
def test_analytic_tau_values(spec, tau):
    assert kendall_tau(spec) == pytest.approx(tau, abs=1e-6)


def test_joe_tau_against_quadrature():
    # tau = 1 + 4 * int_0^1 phi(t) / phi'(t) dt, phi(t) = -log(1 - (1 - t)^theta)
    theta = 6.0

    def ratio(t):
        a = (1 - t) ** theta
        return -math.log1p(-a) * (1 - a) / (theta * (1 - t) ** (theta - 1))

    from scipy import integrate
    val, _ = integrate.quad(lambda t: -ratio(t), 0, 1, limit=200)
    assert kendall_tau(CopulaSpec(CopulaFamily.JOE, theta)) == pytest.approx(1 + 4 * val, abs=1e-5)


def test_frank_tau_against_quadrature():
    theta = 5.0
    from scipy import integrate
    debye, _ = integrate.quad(lambda t: t / math.expm1(t), 0, theta)
    tau = 1 - 4 / theta * (1 - debye / theta)
    assert kendall_tau(CopulaSpec(CopulaFamily.FRANK, theta)) == pytest.approx(tau, abs=1e-9)
    assert kendall_tau(CopulaSpec(CopulaFamily.FRANK, -theta)) == pytest.approx(-tau, abs=1e-9)


@pytest.mark.parametrize("family,param", [
    ("gaussian", 1.0), ("gaussian", -1.2), ("clayton", 0.0), ("clayton", -1.0),
    ("gumbel", 0.9), ("joe", 0.5), ("frank", 0.0), ("gaussian", math.nan),
])
def test_invalid_parameters_name_family_and_range(family, param):
    with pytest.raises(ConfigError, match=family):
        CopulaSpec(family, param)


def test_same_seed_same_pairs():
    spec = CopulaSpec(CopulaFamily.JOE, 6.0)
    a = sample_copula(spec, 500, seed=3)
    b = sample_copula(spec, 500, seed=3)
    c = sample_copula(spec, 500, seed=4)
    np.testing.assert_array_equal(a.pairs, b.pairs)
    assert not np.array_equal(a.pairs, c.pairs)


def test_round_trip_dict():
    spec = CopulaSpec(CopulaFamily.CLAYTON, 6.0)
    assert CopulaSpec.from_dict(spec.to_dict()) == spec
    assert CopulaSpec.from_dict({"family": "Gaussian", "param": 0.3}).family is CopulaFamily.GAUSSIAN


def test_positive_n_required():
    with pytest.raises(ConfigError):
        sample_copula(CopulaSpec(CopulaFamily.INDEPENDENCE), 0)


def test_clayton_lower_tail_dependence():
    # lambda_L = 2^(-1/theta); check the empirical conditional probability
    s = sample_copula(CopulaSpec(CopulaFamily.CLAYTON, 2.0), N, seed=5)
    q = 0.01
    emp = np.mean((s.u < q) & (s.v < q)) / q
    assert emp == pytest.approx(2 ** -0.5, abs=0.08)
