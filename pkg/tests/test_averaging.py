import math

import numpy as np
import pytest

from doseforge.averaging import (
    WaicResult,
    apportion,
    compute_weights,
    from_params,
    pool_draws,
    waic,
    waic_from_loglik,
)
from doseforge.data import Dataset
from doseforge.errors import ConfigError
from doseforge.inference import PosteriorDraws
from doseforge.models import (
    DoseResponseShape,
    Likelihood,
    LikelihoodKind,
    ModelSpec,
    ShapeKind,
    StudentT,
    HalfStudentT,
)

NORMAL = Likelihood(LikelihoodKind.NORMAL)


def _linear_spec():
    p = StudentT(3, 0, 5)
    return ModelSpec(DoseResponseShape(ShapeKind.LINEAR), NORMAL,
                     {"b1": p, "b2": p, "sigma": HalfStudentT(3, 5)})


def _waic_naive(ll):
    """Plain-sum WAIC, no log-sum-exp."""
    S, n = ll.shape
    elpd = 0.0
    for i in range(n):
        col = [float(v) for v in ll[:, i]]
        lppd = math.log(sum(math.exp(v) for v in col) / S)
        mu = sum(col) / S
        var = sum((v - mu) ** 2 for v in col) / (S - 1)
        elpd += lppd - var
    return elpd


def _wr(elpd):
    return WaicResult(elpd, 0.0, 0.0)


# --- WAIC --------------------------------------------------------------------------

def test_waic_degenerate_draws():
    ll = np.tile([-1.0, -2.5, -0.3], (10, 1))
    r = waic_from_loglik(ll)
    assert r.p_waic == pytest.approx(0.0, abs=1e-24)
    assert r.elpd_waic == pytest.approx(-3.8)


def test_waic_two_draw_arithmetic():
    ll = np.log([[1.0], [3.0]])
    r = waic_from_loglik(ll)
    var = np.var(ll, ddof=1)
    assert r.p_waic == pytest.approx(var)
    assert r.elpd_waic == pytest.approx(math.log(2.0) - var)


def test_waic_matches_naive_oracle():
    rng = np.random.default_rng(0)
    ll = rng.normal(-1.5, 0.4, (400, 5))
    assert waic_from_loglik(ll).elpd_waic == pytest.approx(_waic_naive(ll), abs=1e-8)


def test_waic_stable_for_very_negative_loglik():
    rng = np.random.default_rng(1)
    ll = rng.normal(-2000.0, 0.5, (200, 3))
    r = waic_from_loglik(ll)
    assert np.isfinite(r.elpd_waic)
    shifted = waic_from_loglik(ll + 2000.0)
    assert r.elpd_waic == pytest.approx(shifted.elpd_waic - 6000.0, abs=1e-8)


def test_waic_from_draws():
    spec = _linear_spec()
    data = Dataset([0.0, 1.0], [0.1, 2.1], NORMAL)
    draws = np.array([[[0.0, 2.0, 1.0], [0.2, 1.8, 1.1]]])
    r = waic(PosteriorDraws(spec.param_names, draws, spec), data)
    assert r.pointwise.shape == (2,)
    assert r.elpd_waic == pytest.approx(r.pointwise.sum())


# --- weights --------------------------------------------------------------------

def test_single_model_weight_one():
    assert compute_weights([_wr(-10.0)]).weights.tolist() == [1.0]


def test_softmax_weights():
    w = compute_weights([_wr(0.0), _wr(math.log(3))]).weights
    np.testing.assert_allclose(w, [0.25, 0.75], rtol=1e-14)


def test_equal_elpd_equal_weights():
    w = compute_weights([_wr(-5.0)] * 6).weights
    np.testing.assert_allclose(w, 1 / 6)
    assert abs(w.sum() - 1) < 1e-12


def test_weights_handle_large_elpd_gaps():
    w = compute_weights([_wr(-1e6), _wr(0.0)]).weights
    assert w.tolist() == [0.0, 1.0]


def test_weight_set_round_trip():
    ws = compute_weights([_wr(0.0), _wr(1.0)], ids=["a", "b"])
    assert ws.ids == ["a", "b"]
    again = type(ws).from_dict(ws.to_dict())
    assert again.weights.tolist() == ws.weights.tolist()
    assert "a" in ws.table() and "pseudo-BMA" in ws.formula
    with pytest.raises(ConfigError):
        compute_weights([])


# --- apportionment and pooling -----------------------------------------------------

@pytest.mark.parametrize("w,N,expected", [
    ([1.0], 4000, [4000]),
    ([0.25, 0.75], 4000, [1000, 3000]),
    ([1 / 3, 1 / 3, 1 / 3], 4000, [1334, 1333, 1333]),
    ([0.5, 0.5], 3, [2, 1]),
    ([0.0, 1.0], 10, [0, 10]),
])
def test_apportion(w, N, expected):
    assert apportion(w, N).tolist() == expected


def test_apportion_rejects_nonpositive():
    with pytest.raises(ConfigError):
        apportion([1.0], 0)


def _fake_draws(spec, value, n=500):
    d = np.zeros((2, n // 2, len(spec.param_names)))
    d[..., 0] = value
    d[..., -1] = 1.0
    return PosteriorDraws(spec.param_names, d, spec)


def test_pool_counts_and_sources():
    spec = _linear_spec()
    models = [_fake_draws(spec, 1.0), _fake_draws(spec, 2.0)]
    ws = compute_weights([_wr(0.0), _wr(math.log(3))], ["m1", "m2"])
    pooled = pool_draws(models, ws, 4000, seed=1)
    assert pooled.N == 4000
    assert pooled.counts().tolist() == [1000, 3000]
    # m2 needs 3000 of its 500 draws: sampled with replacement, still all from m2
    b1 = pooled.param("b1")
    assert np.all(b1[pooled.source == 0] == 1.0) and np.all(b1[pooled.source == 1] == 2.0)


def test_pool_without_replacement_when_possible():
    spec = _linear_spec()
    d = np.zeros((2, 250, 3))
    d[..., 0] = np.arange(500).reshape(2, 250)
    dr = PosteriorDraws(spec.param_names, d, spec)
    pooled = pool_draws([dr], compute_weights([_wr(0.0)]), 400, seed=0)
    assert len(np.unique(pooled.param("b1"))) == 400


def test_pool_deterministic():
    spec = _linear_spec()
    models = [_fake_draws(spec, 1.0), _fake_draws(spec, 2.0)]
    ws = compute_weights([_wr(0.0), _wr(0.0)])
    a, b = pool_draws(models, ws, 300, seed=9), pool_draws(models, ws, 300, seed=9)
    assert a.source.tolist() == b.source.tolist() and a.row.tolist() == b.row.tolist()


def test_pooled_mean_is_weighted_average():
    # two-model toy: the pooled predictive mean matches sum_m w_m * mean_m
    spec = _linear_spec()
    rng = np.random.default_rng(2)
    d1 = np.zeros((4, 5000, 3))
    d1[..., 0] = rng.normal(1.0, 0.5, (4, 5000))
    d1[..., 1] = rng.normal(2.0, 0.5, (4, 5000))
    d2 = np.zeros((4, 5000, 3))
    d2[..., 0] = rng.normal(-1.0, 0.5, (4, 5000))
    d2[..., 1] = rng.normal(0.5, 0.5, (4, 5000))
    m1, m2 = (PosteriorDraws(spec.param_names, d, spec) for d in (d1, d2))
    ws = compute_weights([_wr(0.0), _wr(math.log(0.4 / 0.6))])
    pooled = pool_draws([m1, m2], ws, 100_000, seed=3)
    dose = np.array([0.0, 1.0])
    got = pooled.expected(dose).mean(axis=0)
    want = 0.6 * spec.response_mean(m1.flat, dose).mean(axis=0) + 0.4 * spec.response_mean(m2.flat, dose).mean(axis=0)
    se = pooled.expected(dose).std(axis=0) / math.sqrt(100_000)
    assert np.all(np.abs(got - want) < 4 * se)


def test_pool_rejects_mismatched_weights():
    spec = _linear_spec()
    with pytest.raises(ConfigError):
        pool_draws([_fake_draws(spec, 1.0)], compute_weights([_wr(0.0), _wr(0.0)]), 10)


def test_from_params_keeps_order():
    spec = _linear_spec()
    p = np.array([[0.0, 1.0, 1.0], [1.0, 1.0, 1.0]])
    pooled = from_params(spec, p)
    np.testing.assert_allclose(pooled.expected([2.0])[:, 0], [2.0, 3.0])
    np.testing.assert_allclose(pooled.nuisance("sigma"), [1.0, 1.0])
