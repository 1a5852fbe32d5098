"""WAIC model weights and the pooled (model-averaged) realization set."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import ConfigError
from .inference import PosteriorDraws
from .models import LikelihoodKind, ModelSpec, log_likelihood

WEIGHT_FORMULA = "pseudo-BMA: w_i = exp(elpd_i - max elpd) / sum_j exp(elpd_j - max elpd), elpd from WAIC"


@dataclass(frozen=True)
class WaicResult:
    elpd_waic: float
    p_waic: float
    se_elpd: float
    pointwise: np.ndarray = field(repr=False, compare=False, default=None)


def waic_from_loglik(ll) -> WaicResult:
    """WAIC from a ``(draws, rows)`` matrix of per-row log-likelihoods.

    ``var`` uses ``ddof=1``; a single draw has no variance and gives
    ``p_waic = 0``.
    """
    ll = np.atleast_2d(np.asarray(ll, dtype=float))
    S, n = ll.shape
    lppd = special.logsumexp(ll, axis=0) - math.log(S)
    pw = ll.var(axis=0, ddof=1) if S > 1 else np.zeros(n)
    elpd_i = lppd - pw
    se = math.sqrt(n * elpd_i.var(ddof=1)) if n > 1 else 0.0
    return WaicResult(float(elpd_i.sum()), float(pw.sum()), se, elpd_i)


def waic(draws: PosteriorDraws, data) -> WaicResult:
    _, ll = log_likelihood(draws.spec, draws.flat, data)
    return waic_from_loglik(ll)


@dataclass(frozen=True)
class WeightEntry:
    spec_id: str
    elpd_waic: float
    p_waic: float
    se_elpd: float
    weight: float


@dataclass(frozen=True)
class ModelWeightSet:
    entries: tuple[WeightEntry, ...]
    formula: str = WEIGHT_FORMULA

    @property
    def weights(self) -> np.ndarray:
        return np.array([e.weight for e in self.entries])

    @property
    def ids(self) -> list[str]:
        return [e.spec_id for e in self.entries]

    def to_dict(self) -> dict:
        return {
            "formula": self.formula,
            "models": [
                {"id": e.spec_id, "elpd_waic": e.elpd_waic, "p_waic": e.p_waic,
                 "se_elpd": e.se_elpd, "weight": e.weight}
                for e in self.entries
            ],
        }

    @classmethod
    def from_dict(cls, d) -> "ModelWeightSet":
        return cls(tuple(WeightEntry(m["id"], m["elpd_waic"], m["p_waic"], m["se_elpd"], m["weight"])
                         for m in d["models"]), d.get("formula", WEIGHT_FORMULA))

    def table(self) -> str:
        lines = [f"{'model':<14} {'elpd_waic':>10} {'p_waic':>8} {'se':>8} {'weight':>8}"]
        for e in self.entries:
            lines.append(f"{e.spec_id:<14} {e.elpd_waic:10.2f} {e.p_waic:8.2f} "
                         f"{e.se_elpd:8.2f} {e.weight:8.4f}")
        return "\n".join(lines)


def compute_weights(waics, ids=None) -> ModelWeightSet:
    """Pseudo-BMA weights: a softmax of the WAIC elpd values."""
    waics = list(waics)
    if not waics:
        raise ConfigError("need at least one model to weight")
    ids = list(ids) if ids is not None else [f"model{i}" for i in range(len(waics))]
    elpd = np.array([w.elpd_waic for w in waics])
    w = np.exp(elpd - elpd.max())
    w /= w.sum()
    return ModelWeightSet(tuple(
        WeightEntry(i, r.elpd_waic, r.p_waic, r.se_elpd, float(x)) for i, r, x in zip(ids, waics, w)))


def apportion(weights, N: int) -> np.ndarray:
    """Largest-remainder counts summing exactly to ``N``.

    Ties in the remainder go to the earlier entry.
    """
    if N <= 0:
        raise ConfigError(f"number of pooled draws must be positive, got {N}")
    w = np.asarray(weights, dtype=float)
    quota = N * w / w.sum()
    base = np.floor(quota).astype(int)
    rem = np.round(quota - base, 12)
    left = N - int(base.sum())
    order = sorted(range(len(w)), key=lambda i: (-rem[i], i))
    for i in order[:left]:
        base[i] += 1
    return base


@dataclass(frozen=True, eq=False)
class PooledDraws:
    """The model-averaged realization set.

    ``members`` holds one ``(spec, params)`` block per contributing model;
    ``source`` and ``row`` locate each pooled realization in those blocks,
    in pooled (shuffled) order.
    """

    members: tuple
    source: np.ndarray
    row: np.ndarray
    spec_ids: tuple[str, ...]

    @property
    def N(self) -> int:  # noqa: N802
        return len(self.source)

    @property
    def likelihood(self):
        return self.members[0][0].likelihood

    def counts(self) -> np.ndarray:
        return np.bincount(self.source, minlength=len(self.members))

    def _gather(self, fn, dose, trailing=()):
        dose = np.atleast_1d(np.asarray(dose, dtype=float))
        out = np.empty((self.N, len(dose)) + tuple(trailing))
        for m, (spec, params) in enumerate(self.members):
            sel = self.source == m
            if np.any(sel):
                out[sel] = fn(spec, params[self.row[sel]], dose)
        return out

    def eta(self, dose) -> np.ndarray:
        """Linear predictor per realization and dose, ``(N, M)``."""
        return self._gather(lambda s, p, d: s.eta(p, d), dose)

    def expected(self, dose) -> np.ndarray:
        """Expected response per realization and dose, ``(N, M)``."""
        return self._gather(lambda s, p, d: s.response_mean(p, d), dose)

    def category_probs(self, dose) -> np.ndarray:
        """Ordinal category probabilities, ``(N, M, K)``."""
        K = self.likelihood.n_categories
        return self._gather(lambda s, p, d: s.category_probs(p, d), dose, (K,))

    def nuisance(self, name: str) -> np.ndarray:
        out = np.empty(self.N)
        for m, (spec, params) in enumerate(self.members):
            sel = self.source == m
            if np.any(sel):
                out[sel] = params[self.row[sel], spec.param_names.index(name)]
        return out

    def param(self, name: str) -> np.ndarray:
        """A named parameter per realization (NaN for models without it)."""
        out = np.full(self.N, np.nan)
        for m, (spec, params) in enumerate(self.members):
            sel = self.source == m
            if np.any(sel) and name in spec.param_names:
                out[sel] = params[self.row[sel], spec.param_names.index(name)]
        return out


def pool_draws(per_model, weights: ModelWeightSet, N: int, seed=0) -> PooledDraws:
    """Apportion ``N`` realizations among models by weight.

    Each model's share is drawn without replacement from its posterior draws
    when it has enough of them, with replacement otherwise; the pooled set
    is then shuffled.
    """
    per_model = list(per_model)
    if len(per_model) != len(weights.entries):
        raise ConfigError("weights do not match the list of fitted models")
    counts = apportion(weights.weights, N)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    members, src, rows = [], [], []
    for m, (dr, n_m) in enumerate(zip(per_model, counts)):
        flat = dr.flat
        members.append((dr.spec, flat))
        if n_m == 0:
            continue
        idx = rng.choice(len(flat), size=n_m, replace=n_m > len(flat))
        src.append(np.full(n_m, m))
        rows.append(idx)
    src = np.concatenate(src)
    rows = np.concatenate(rows)
    perm = rng.permutation(N)
    return PooledDraws(tuple(members), src[perm], rows[perm], tuple(weights.ids))


def single_model_pool(dr: PosteriorDraws, N: int | None = None, seed=0) -> PooledDraws:
    """Treat one model's draws as a pooled set (weight 1)."""
    ws = ModelWeightSet((WeightEntry(dr.spec.name, math.nan, math.nan, math.nan, 1.0),))
    return pool_draws([dr], ws, N or len(dr.flat), seed)


def is_ordinal(pooled: PooledDraws) -> bool:
    return pooled.likelihood.kind is LikelihoodKind.ORDINAL


def from_params(spec: ModelSpec, params) -> PooledDraws:
    """A pooled set made directly from a parameter matrix, in order."""
    params = np.atleast_2d(np.asarray(params, dtype=float))
    n = len(params)
    return PooledDraws(((spec, params),), np.zeros(n, dtype=int), np.arange(n), (spec.name,))
