"""Property-based checks (hypothesis)."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from doseforge.averaging import WaicResult, apportion, compute_weights, from_params, waic_from_loglik
from doseforge.categorical import Metric, assign_category, category_distance
from doseforge.copulas import EPS, CopulaFamily, CopulaSpec, sample_copula
from doseforge.data import Dataset
from doseforge.models import (
    DoseResponseShape,
    HalfStudentT,
    Likelihood,
    LikelihoodKind,
    ModelSpec,
    ShapeKind,
    StudentT,
    default_candidate_set,
)
from doseforge.selection import DoseGrid, DoseInterval, diff_from_control_curve, intersect

finite = st.floats(-50, 50, allow_nan=False)


@st.composite
def dist4(draw):
    w = draw(arrays(float, 4, elements=st.floats(0.0, 1.0)))
    assume(w.sum() > 1e-3)
    return w / w.sum()


@pytest.mark.parametrize("metric", list(Metric))
@settings(max_examples=1000, deadline=None)
@given(p=dist4(), q=dist4(), r=dist4())
def test_metric_axioms(metric, p, q, r):
    dpq = category_distance(p, q, metric)
    assert dpq == pytest.approx(category_distance(q, p, metric), abs=1e-12)
    assert 0.0 <= dpq <= 1.0
    assert category_distance(p, p, metric) <= 1e-7
    assert dpq <= category_distance(p, r, metric) + category_distance(r, q, metric) + 1e-9


@given(p=dist4(), q=dist4())
def test_zero_distance_only_for_equal(p, q):
    assume(np.abs(p - q).max() > 1e-3)
    assert category_distance(p, q) > 0


@given(elpd=st.lists(st.floats(-1e4, 1e4), min_size=1, max_size=8), shift=st.floats(-1e5, 1e5))
def test_weights_shift_invariant(elpd, shift):
    w0 = compute_weights([WaicResult(e, 0, 0) for e in elpd]).weights
    w1 = compute_weights([WaicResult(e + shift, 0, 0) for e in elpd]).weights
    np.testing.assert_allclose(w0, w1, atol=1e-9)
    assert w0.sum() == pytest.approx(1.0, abs=1e-12)


@given(ll=arrays(float, st.tuples(st.integers(2, 60), st.just(5)), elements=st.floats(-30, 5)))
def test_waic_matches_naive_sum(ll):
    S = ll.shape[0]
    naive = 0.0
    for i in range(5):
        col = [float(v) for v in ll[:, i]]
        mu = sum(col) / S
        naive += math.log(sum(math.exp(v) for v in col) / S) - sum((v - mu) ** 2 for v in col) / (S - 1)
    assert waic_from_loglik(ll).elpd_waic == pytest.approx(naive, abs=1e-8)


@given(w=st.lists(st.floats(0.0, 1.0), min_size=1, max_size=8), N=st.integers(1, 10_000))
def test_apportion_totals(w, N):
    w = np.asarray(w)
    assume(w.sum() > 1e-6)
    w = w / w.sum()
    n = apportion(w, N)
    assert n.sum() == N and np.all(n >= 0)
    assert np.all(np.abs(n - w * N) < 1.0 + 1e-9)


@st.composite
def intervals(draw):
    if draw(st.booleans()):
        return DoseInterval.empty_set()
    a, b = sorted(draw(st.lists(st.integers(0, 20), min_size=2, max_size=2)))
    return DoseInterval(a / 20, b / 20)


@given(a=intervals(), b=intervals(), c=intervals())
def test_intersection_algebra(a, b, c):
    assert intersect(a, b) == intersect(b, a)
    assert intersect(intersect(a, b), c) == intersect(a, intersect(b, c))
    assert intersect(a, a) == a
    ab = intersect(a, b)
    for d in np.linspace(0, 1, 21):
        assert (d in ab) == ((d in a) and (d in b))


_LIN = ModelSpec(DoseResponseShape(ShapeKind.LINEAR), Likelihood(LikelihoodKind.NORMAL),
                 {"b1": StudentT(3, 0, 5), "b2": StudentT(3, 0, 5), "sigma": HalfStudentT(3, 5)})


@given(params=arrays(float, st.tuples(st.integers(1, 20), st.just(2)), elements=finite),
       doses=st.lists(st.floats(0, 10), min_size=1, max_size=6, unique=True),
       control=st.floats(0, 10))
def test_diff_zero_at_control(params, doses, control):
    p = np.column_stack([params, np.ones(len(params))])
    grid = DoseGrid(sorted(set(np.round(doses, 6))), control)
    c = diff_from_control_curve(from_params(_LIN, p), grid)
    assert np.all(c.realizations[:, grid.control_index] == 0.0)
    assert np.all(c.quantiles[:, grid.control_index] == 0.0)


@given(eff=st.floats(-20, 20), sev=st.floats(0, 1))
def test_assign_category_total(eff, sev):
    assert assign_category(eff, sev) in (1, 2, 3, 4)


_ORD = Likelihood(LikelihoodKind.ORDINAL, n_categories=4)
_ORD_SPEC = default_candidate_set(_ORD, Dataset([0, 0.5, 1, 1], [1, 2, 3, 4], _ORD))[0]


@given(slope=finite, cuts=arrays(float, 3, elements=st.floats(-20, 20)),
       dose=st.floats(0, 1))
def test_ordinal_probs_sum_to_one(slope, cuts, dose):
    p = np.concatenate([[0.0, slope], np.sort(cuts)])
    probs = from_params(_ORD_SPEC, p).category_probs([dose])
    assert np.all(probs >= 0)
    assert abs(probs.sum() - 1.0) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(family=st.sampled_from([CopulaFamily.CLAYTON, CopulaFamily.GUMBEL, CopulaFamily.JOE,
                               CopulaFamily.FRANK]),
       theta=st.floats(1.05, 30), seed=st.integers(0, 2**32 - 1))
def test_copula_uniforms_in_open_unit_square(family, theta, seed):
    s = sample_copula(CopulaSpec(family, theta), 500, seed)
    uv = s.pairs
    assert np.all(uv >= EPS) and np.all(uv <= 1 - EPS)
