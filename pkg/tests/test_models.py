import math

import numpy as np
import pytest
from scipy import special, stats

from doseforge.data import Dataset
from doseforge.errors import ConfigError, IdentifiabilityError
from doseforge.models import (
    DEFAULT_SHAPES,
    DoseResponseShape,
    Likelihood,
    LikelihoodKind,
    Link,
    LogNormal,
    ModelSpec,
    ShapeKind,
    StudentT,
    HalfStudentT,
    UnderflowCounter,
    apply_inverse_link,
    default_candidate_set,
    default_priors,
    eval_mean,
    log_likelihood,
    ordinal_probs,
)

NORMAL = Likelihood(LikelihoodKind.NORMAL)
BERN = Likelihood(LikelihoodKind.BERNOULLI, Link.LOGIT)


def _spec(kind, lik=NORMAL, fixed=None, offset=0.0):
    shape = DoseResponseShape(kind, offset)
    fixed = fixed or {}
    names = [n for n in shape.param_names + lik.nuisance_names if n not in fixed]
    priors = {n: (HalfStudentT(3, 5) if n == "sigma" else StudentT(3, 0, 5)) for n in names}
    for n in shape.positive_params:
        if n in priors:
            priors[n] = LogNormal(0.0, 1.0)
    return ModelSpec(shape, lik, priors, fixed)


# --- mean functions ---------------------------------------------------------

def test_sigmoid_emax_values():
    s = DoseResponseShape(ShapeKind.SIGMOID_EMAX)
    b = (4, 15, 0.33, 2.8)
    assert eval_mean(s, b, 0.0) == 4.0
    assert eval_mean(s, b, 1.0) == pytest.approx(4 + 15 / 1.33, abs=5e-4)
    assert eval_mean(s, b, 1.0) == pytest.approx(15.278, abs=5e-4)


def test_emax_difference_at_4():
    s = DoseResponseShape(ShapeKind.EMAX)
    b = (-150, 150, 0.5)
    assert eval_mean(s, b, 4.0) == pytest.approx(-16.6667, abs=1e-4)
    assert eval_mean(s, b, 4.0) - eval_mean(s, b, 0.0) == pytest.approx(133.333, abs=1e-3)


@pytest.mark.parametrize("kind,params,expected", [
    (ShapeKind.LINEAR, (1.0, 2.0), lambda d: 1 + 2 * d),
    (ShapeKind.EMAX, (1.0, 2.0, 0.3), lambda d: 1 + 2 * d / (0.3 + d)),
    (ShapeKind.EXPONENTIAL, (1.0, 2.0, 0.7), lambda d: 1 + 2 * np.exp(0.7 * d)),
    (ShapeKind.LOGISTIC, (1.0, 2.0, 0.5, 0.1), lambda d: 1 + 2 / (1 + np.exp((0.5 - d) / 0.1))),
])
def test_shapes_match_formulas(kind, params, expected):
    d = np.linspace(0, 2, 17)
    np.testing.assert_allclose(eval_mean(DoseResponseShape(kind), params, d), expected(d), rtol=1e-13)


def test_log_linear_uses_offset():
    s = DoseResponseShape(ShapeKind.LOG_LINEAR, 0.02)
    assert eval_mean(s, (1.0, 2.0), 0.0) == pytest.approx(1 + 2 * math.log(0.02))
    with pytest.raises(ConfigError):
        DoseResponseShape(ShapeKind.LOG_LINEAR, 0.0)


def test_mean_broadcasts_over_draws():
    s = DoseResponseShape(ShapeKind.EMAX)
    params = np.array([[0, 1, 0.5], [1, 2, 0.5]])
    out = s.mean(params, np.array([0.0, 0.5, 1.0]))
    assert out.shape == (2, 3)
    np.testing.assert_allclose(out[1], [1, 2, 1 + 4 / 3])


# --- links --------------------------------------------------------------------

def test_inverse_links():
    assert apply_inverse_link("logit", 0.0) == 0.5
    assert apply_inverse_link("probit", -1.28) == pytest.approx(0.1003, abs=1e-4)
    eta = -10 + 5 * math.exp(0.7 * 0.6)
    assert eta == pytest.approx(-2.390, abs=1e-3)
    assert apply_inverse_link("logit", eta) == pytest.approx(0.0840, abs=1e-4)
    p = apply_inverse_link("logit", np.array([-800.0, 800.0]))
    assert 0 < p[0] < p[1] < 1


# --- likelihoods ----------------------------------------------------------------

def test_normal_row_at_mean():
    spec = _spec(ShapeKind.LINEAR)
    data = Dataset([0.3], [1.0 + 2.0 * 0.3], NORMAL)
    total, per_row = log_likelihood(spec, [1.0, 2.0, 1.7], data)
    assert per_row[0] == pytest.approx(-math.log(1.7 * math.sqrt(2 * math.pi)))
    assert total == per_row[0]


def test_normal_summary_uses_se():
    lik = Likelihood(LikelihoodKind.NORMAL_SUMMARY)
    spec = _spec(ShapeKind.LINEAR, lik)
    data = Dataset([16.0, 32.0], [2.3, 3.5], lik, se=[0.4, 0.5], trials=[41, 43])
    _, per_row = log_likelihood(spec, [1.0, 0.08], data)
    mu = np.array([1 + 0.08 * 16, 1 + 0.08 * 32])
    np.testing.assert_allclose(per_row, stats.norm.logpdf([2.3, 3.5], mu, [0.4, 0.5]))


def test_binomial_row_table_counts():
    lik = Likelihood(LikelihoodKind.BINOMIAL, Link.LOGIT)
    spec = _spec(ShapeKind.LINEAR, lik)
    data = Dataset([0.0], [13], lik, trials=[42])
    p = 13 / 42
    _, per_row = log_likelihood(spec, [special.logit(p), 0.0], data)
    expected = math.log(math.comb(42, 13)) + 13 * math.log(13 / 42) + 29 * math.log(29 / 42)
    assert per_row[0] == pytest.approx(expected, rel=1e-12)


def test_poisson_row():
    lik = Likelihood(LikelihoodKind.POISSON)
    spec = _spec(ShapeKind.LINEAR, lik)
    data = Dataset([0.0, 1.0], [3, 0], lik)
    _, per_row = log_likelihood(spec, [0.5, 0.1], data)
    np.testing.assert_allclose(per_row, stats.poisson.logpmf([3, 0], np.exp([0.5, 0.6])))


def test_ordinal_two_categories_is_bernoulli():
    rng = np.random.default_rng(0)
    dose = rng.uniform(0, 1, 40)
    y = rng.integers(0, 2, 40)
    ordl = Likelihood(LikelihoodKind.ORDINAL, n_categories=2)
    o_spec = _spec(ShapeKind.EMAX, ordl, fixed={"b1": 0.0})
    b_spec = _spec(ShapeKind.EMAX, BERN)
    b2, b3, cut = 1.3, 0.4, 0.7
    # P(C = 2) = 1 - expit(cut - eta) = expit(eta - cut)
    lo, _ = log_likelihood(o_spec, [0.0, b2, b3, cut], Dataset(dose, y + 1, ordl))
    lb, _ = log_likelihood(b_spec, [-cut, b2, b3], Dataset(dose, y, BERN))
    assert lo == pytest.approx(lb, rel=1e-12)


def test_ordinal_underflow_floor_counts():
    ordl = Likelihood(LikelihoodKind.ORDINAL, n_categories=3)
    spec = _spec(ShapeKind.LINEAR, ordl, fixed={"b1": 0.0})
    data = Dataset([0.0, 0.0], [1, 3], ordl)
    counter = UnderflowCounter()
    total, per_row = log_likelihood(spec, [0.0, 0.0, -400.0, -399.0], data, counter)
    assert counter.count == 1
    assert np.isfinite(total)
    assert per_row[0] == pytest.approx(math.log(2.0 ** -43), rel=1e-12)


def test_per_row_sums_to_total():
    rng = np.random.default_rng(1)
    spec = _spec(ShapeKind.SIGMOID_EMAX)
    data = Dataset(rng.uniform(0, 1, 50), rng.normal(5, 2, 50), NORMAL)
    params = np.array([[4, 15, 0.33, 2.8, 2.0], [3, 10, 0.5, 1.0, 3.0]])
    total, per_row = log_likelihood(spec, params, data)
    assert total.shape == (2,) and per_row.shape == (2, 50)
    np.testing.assert_allclose(total, per_row.sum(axis=-1), rtol=1e-10)


def test_ordinal_probs_sum_to_one():
    rng = np.random.default_rng(2)
    cuts = np.sort(rng.normal(0, 3, (100, 4)), axis=-1)
    eta = rng.normal(0, 5, (100, 7))
    p = ordinal_probs(cuts, eta)
    assert p.shape == (100, 7, 5)
    np.testing.assert_allclose(p.sum(axis=-1), 1.0, atol=1e-12)
    assert np.all(p >= 0)


# --- candidate set and priors ----------------------------------------------------

def _normal_data(doses=(0, 0.2, 0.4, 0.6, 0.8, 1.0), sd=2.0):
    rng = np.random.default_rng(3)
    d = np.repeat(doses, 10)
    y = rng.normal(0, 1, len(d))
    y = (y - y.mean()) / y.std(ddof=1) * sd
    return Dataset(d, y, NORMAL)


def test_candidate_set_six_shapes():
    specs = default_candidate_set(NORMAL, _normal_data())
    assert [s.shape.kind for s in specs] == list(DEFAULT_SHAPES)
    assert len(specs) == 6
    ll = [s for s in specs if s.shape.kind is ShapeKind.LOG_LINEAR][0]
    assert ll.shape.offset == pytest.approx(0.02)


def test_candidate_set_ordinal():
    ordl = Likelihood(LikelihoodKind.ORDINAL, n_categories=4)
    data = Dataset(np.repeat([0, 0.5, 1.0], 4), np.tile([1, 2, 3, 4], 3), ordl)
    specs = default_candidate_set(ordl, data)
    assert len(specs) == 6
    for s in specs:
        assert s.fixed == {"b1": 0.0}
        assert [n for n in s.param_names if n.startswith("cut")] == ["cut1", "cut2", "cut3"]


def test_candidate_set_needs_three_doses():
    data = Dataset([0.0, 0.6, 0.6, 0.0], [1.0, 2.0, 3.0, 1.5], NORMAL)
    with pytest.raises(IdentifiabilityError):
        default_candidate_set(NORMAL, data)


def test_default_priors_bernoulli():
    data = Dataset(np.repeat([0, 0.5, 1.0], 4), np.tile([0, 1], 6), BERN)
    for kind in (ShapeKind.LINEAR, ShapeKind.LOG_LINEAR):
        pri = default_priors(DoseResponseShape(kind, 0.05), BERN, data)
        for name in ("b1", "b2"):
            assert pri[name] == StudentT(3, 0, 5)


def test_default_priors_scaled_by_response_sd():
    pri = default_priors(DoseResponseShape(ShapeKind.LINEAR), NORMAL, _normal_data(sd=2.0))
    assert pri["b2"].scale == pytest.approx(10.0)
    assert pri["b2"].df == 3 and pri["b2"].loc == 0
    assert pri["sigma"] == HalfStudentT(3, pri["b2"].scale)


def test_default_priors_emax_scale_parameter():
    data = _normal_data(doses=(0.0, 0.25, 0.5, 0.75, 1.0))
    pri = default_priors(DoseResponseShape(ShapeKind.SIGMOID_EMAX), NORMAL, data)
    assert pri["b3"] == LogNormal(math.log(0.5), 1.0)
    assert pri["b4"] == LogNormal(0.0, 0.5)


def test_model_spec_checks_priors():
    shape = DoseResponseShape(ShapeKind.LINEAR)
    with pytest.raises(ConfigError):
        ModelSpec(shape, BERN, {"b1": StudentT(3, 0, 5)})
    with pytest.raises(ConfigError):
        ModelSpec(shape, BERN, {"b1": StudentT(3, 0, 5), "b2": StudentT(3, 0, 5)}, {"b9": 1.0})


def test_model_spec_round_trip():
    spec = default_candidate_set(NORMAL, _normal_data())[3]
    again = ModelSpec.from_dict(spec.to_dict())
    assert again.to_dict() == spec.to_dict()


def test_prior_logpdf_matches_scipy():
    x = np.linspace(-20, 20, 41)
    np.testing.assert_allclose(StudentT(3, 1, 5).logpdf(x), stats.t.logpdf(x, 3, 1, 5), rtol=1e-12)
    xp = np.linspace(0.01, 20, 41)
    np.testing.assert_allclose(HalfStudentT(3, 5).logpdf(xp),
                               stats.t.logpdf(xp, 3, 0, 5) + math.log(2), rtol=1e-12)
    np.testing.assert_allclose(LogNormal(0.5, 1).logpdf(xp),
                               stats.lognorm.logpdf(xp, 1, scale=math.exp(0.5)), rtol=1e-12)
    assert HalfStudentT(3, 5).logpdf(-1.0) == -np.inf


def test_likelihood_validation():
    with pytest.raises(ConfigError):
        Likelihood(LikelihoodKind.ORDINAL, n_categories=1)
    with pytest.raises(ConfigError):
        Likelihood(LikelihoodKind.BERNOULLI, Link.LOG)
    assert Likelihood(LikelihoodKind.BINOMIAL).link is Link.LOGIT
