"""Adaptive random-walk Metropolis for a single candidate model.

The sampler works on an unconstrained parameterization: positive
parameters on the log scale and ordinal cutpoints as a first cutpoint plus
log increments.  Each chain adapts its own multivariate normal proposal
(covariance of its warmup history times 2.38**2 / dim, with a Robbins-Monro
scale factor steering toward the target acceptance rate) and freezes it
when warmup ends.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special, stats

from .errors import AdaptationError, ConfigError, DiagnosticsUnavailable, InitializationError
from .models import (
    LOG_EPS,
    LikelihoodKind,
    Link,
    ModelSpec,
    ShapeKind,
    UnderflowCounter,
    _log_p_and_q,
    _ordinal_logprobs,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class McmcConfig:
    chains: int = 4
    warmup: int = 4000
    post_warmup: int = 5000
    thin: int = 5
    seed: int = 0
    target_accept: float = 0.3

    def __post_init__(self):
        if min(self.chains, self.warmup, self.post_warmup, self.thin) < 1:
            raise ConfigError("chains, warmup, post_warmup and thin must be positive")
        if not 0.0 < self.target_accept < 1.0:
            raise ConfigError("target_accept must lie in (0, 1)")

    @property
    def kept(self) -> int:
        return self.post_warmup // self.thin

    def to_dict(self) -> dict:
        return {"chains": self.chains, "warmup": self.warmup, "post_warmup": self.post_warmup,
                "thin": self.thin, "seed": self.seed, "target_accept": self.target_accept}

    @classmethod
    def from_dict(cls, d) -> "McmcConfig":
        return cls(**{k: d[k] for k in ("chains", "warmup", "post_warmup", "thin", "seed",
                                        "target_accept") if k in d})


@dataclass(frozen=True, eq=False)
class PosteriorDraws:
    """Posterior draws on the natural scale, shape (chains, kept, params)."""

    param_names: tuple[str, ...]
    draws: np.ndarray
    spec: ModelSpec
    diagnostics: dict = field(default_factory=dict)

    @property
    def flat(self) -> np.ndarray:
        c, s, p = self.draws.shape
        return self.draws.reshape(c * s, p)

    def param(self, name: str) -> np.ndarray:
        return self.draws[..., self.param_names.index(name)]

    @property
    def max_rhat(self) -> float:
        r = self.diagnostics.get("rhat", {})
        return max(r.values()) if r else float("nan")


# --- unconstrained parameterization ---------------------------------------

_ANCHOR_SOFT = 0.02


class _Transform:
    """Map between the sampler's unconstrained space and natural parameters.

    For shapes of the form ``b1 + b2 * g(d; theta)`` with a nonlinear ``g``,
    the free coefficients are replaced by the curve level at the lowest
    observed dose and its change across the observed dose range.  This
    removes the long ridge between ``b2`` and the nonlinear parameters that
    a random walk otherwise crawls along.  The change is measured as
    ``b2 * hypot(g(hi) - g(lo), soft)``, signed like ``g(hi) - g(lo)``; the softening keeps the map smooth
    when ``g`` is flat over the data.
    """

    _ANCHORED = (ShapeKind.EMAX, ShapeKind.SIGMOID_EMAX, ShapeKind.EXPONENTIAL,
                 ShapeKind.LOGISTIC)

    def __init__(self, spec: ModelSpec, dose_range=(0.0, 1.0)):
        self.spec = spec
        self.free = spec.free_names
        pos = spec.positive_params()
        self.log_idx = [i for i, n in enumerate(self.free) if n in pos]
        cut = [i for i, n in enumerate(self.free) if n.startswith("cut")]
        self.cut_first = cut[0] if cut else None
        self.cut_inc = cut[1:]
        self.full_names = spec.param_names
        self.free_pos = [self.full_names.index(n) for n in self.free]
        self.fixed = [(self.full_names.index(n), v) for n, v in spec.fixed.items()]
        lo, hi = float(dose_range[0]), float(dose_range[1])
        self.anchor = None
        if spec.shape.kind in self._ANCHORED and "b2" in self.free and hi > lo:
            self.anchor = np.array([lo, hi])
            self.i1 = self.free.index("b1") if "b1" in self.free else None
            self.i2 = self.free.index("b2")

    def _g(self, x):
        """g at the two anchor doses, with b1 = 0 and b2 = 1."""
        shp = self.full(x)[..., : self.spec.n_shape]
        shp[..., 0] = 0.0
        shp[..., 1] = 1.0
        g = self.spec.shape.mean(shp, self.anchor)
        # softened so that curves flat over the data range keep a bounded
        # Jacobian; the sign is kept so that the change is the curve's actual
        # rise, whichever way g runs (the exponential can run either way)
        raw = g[..., 1] - g[..., 0]
        dg = np.where(raw < 0, -1.0, 1.0) * np.hypot(raw, _ANCHOR_SOFT)
        return g[..., 0], dg

    def natural(self, z):
        """Natural-scale free parameters and the log Jacobian."""
        z = np.asarray(z, dtype=float)
        x = np.array(z, copy=True)
        jac = np.zeros(z.shape[:-1])
        if self.log_idx:
            x[..., self.log_idx] = np.exp(np.clip(z[..., self.log_idx], -700, 700))
            jac = jac + z[..., self.log_idx].sum(axis=-1)
        if self.cut_inc:
            inc = np.exp(np.clip(z[..., self.cut_inc], -700, 700))
            x[..., self.cut_inc] = z[..., [self.cut_first]] + np.cumsum(inc, axis=-1)
            jac = jac + z[..., self.cut_inc].sum(axis=-1)
        if self.anchor is not None:
            with np.errstate(all="ignore"):
                g0, dg = self._g(x)
                b2 = z[..., self.i2] / dg
                x[..., self.i2] = b2
                if self.i1 is not None:
                    x[..., self.i1] = z[..., self.i1] - b2 * g0
                jac = jac - np.log(np.abs(dg))
        return x, jac

    def to_natural(self, z):
        return self.natural(z)[0]

    def log_jacobian(self, z):
        return self.natural(z)[1]

    def from_natural(self, x):
        x = np.asarray(x, dtype=float)
        z = np.array(x, copy=True)
        if self.anchor is not None:
            g0, dg = self._g(x)
            b2 = x[..., self.i2]
            z[..., self.i2] = b2 * dg
            if self.i1 is not None:
                z[..., self.i1] = x[..., self.i1] + b2 * g0
        if self.log_idx:
            z[..., self.log_idx] = np.log(x[..., self.log_idx])
        if self.cut_inc:
            cuts = x[..., [self.cut_first] + self.cut_inc]
            z[..., self.cut_inc] = np.log(np.diff(cuts, axis=-1))
        return z

    def full(self, x):
        out = np.empty(x.shape[:-1] + (len(self.full_names),))
        out[..., self.free_pos] = x
        for i, v in self.fixed:
            out[..., i] = v
        return out


# --- sufficient-statistic log-likelihood used inside the sampler -----------

class _Aggregate:
    """Dose-grouped likelihood; equal to the per-row sum up to a constant."""

    def __init__(self, spec: ModelSpec, data):
        self.spec = spec
        self.kind = spec.likelihood.kind
        self.link = spec.likelihood.link
        self.counter = UnderflowCounter()
        y = np.asarray(data.response, dtype=float)
        dose = np.asarray(data.dose, dtype=float)
        self.empty = len(y) == 0
        if self.kind in (LikelihoodKind.NORMAL_SUMMARY, LikelihoodKind.BINOMIAL):
            self.doses = dose
            self.y = y
            self.se = data.se
            self.n = data.trials
            return
        self.doses, inv = np.unique(dose, return_inverse=True)
        m = len(self.doses)
        self.count = np.bincount(inv, minlength=m).astype(float)
        if self.kind is LikelihoodKind.ORDINAL:
            K = spec.likelihood.n_categories
            self.table = np.zeros((m, K))
            np.add.at(self.table, (inv, y.astype(int) - 1), 1.0)
            return
        self.total = np.bincount(inv, weights=y, minlength=m)
        if self.kind is LikelihoodKind.NORMAL:
            ybar = self.total / np.maximum(self.count, 1)
            self.ybar = ybar
            self.ss = np.bincount(inv, weights=(y - ybar[inv]) ** 2, minlength=m)

    def __call__(self, params):
        if self.empty:
            return np.zeros(params.shape[:-1])
        spec = self.spec
        eta = spec.eta(params, self.doses)
        kind = self.kind
        if kind is LikelihoodKind.NORMAL:
            sigma = params[..., -1]
            n = self.count
            quad = (self.ss + n * (self.ybar - eta) ** 2).sum(axis=-1)
            return -n.sum() * np.log(sigma) - 0.5 * quad / sigma**2
        if kind is LikelihoodKind.NORMAL_SUMMARY:
            z = (self.y - eta) / self.se
            return -0.5 * (z * z).sum(axis=-1)
        if kind is LikelihoodKind.BERNOULLI:
            lp, lq = _log_p_and_q(self.link, eta)
            return (self.total * lp + (self.count - self.total) * lq).sum(axis=-1)
        if kind is LikelihoodKind.BINOMIAL:
            lp, lq = _log_p_and_q(self.link, eta)
            return (self.y * lp + (self.n - self.y) * lq).sum(axis=-1)
        if kind is LikelihoodKind.POISSON:
            log_mu = np.minimum(eta, 700.0)
            return (self.total * log_mu - self.count * np.exp(log_mu)).sum(axis=-1)
        _, cuts = spec.split(params)
        lps = _ordinal_logprobs(cuts, eta)
        low = (lps < LOG_EPS) & (self.table > 0)
        if np.any(low):
            self.counter.count += int(np.count_nonzero(low))
        lps = np.maximum(lps, LOG_EPS)
        return (self.table * lps).sum(axis=(-2, -1))


class _LogPosterior:
    def __init__(self, spec: ModelSpec, data):
        self.spec = spec
        dose = np.asarray(data.dose, dtype=float)
        rng = (dose.min(), dose.max()) if len(dose) else (0.0, 1.0)
        self.tf = _Transform(spec, rng)
        self.lik = _Aggregate(spec, data)
        self.priors = [spec.priors[n] for n in self.tf.free]

    def __call__(self, z):
        z = np.atleast_2d(z)
        x, lp = self.tf.natural(z)
        with np.errstate(all="ignore"):
            for i, pr in enumerate(self.priors):
                lp = lp + pr.logpdf(x[:, i])
            lp = lp + self.lik(self.tf.full(x))
        return np.where(np.isfinite(lp), lp, -np.inf)


# --- initialization ----------------------------------------------------------

def _group_link_means(spec: ModelSpec, data):
    """Observed responses per dose on the link scale."""
    kind = spec.likelihood.kind
    dose = np.asarray(data.dose, dtype=float)
    y = np.asarray(data.response, dtype=float)
    if kind in (LikelihoodKind.NORMAL_SUMMARY,):
        return dose, y, np.ones_like(y)
    if kind is LikelihoodKind.BINOMIAL:
        n = data.trials
        p = (y + 0.5) / (n + 1.0)
        return dose, _link(spec.likelihood.link, p), n
    ud, inv = np.unique(dose, return_inverse=True)
    cnt = np.bincount(inv, minlength=len(ud)).astype(float)
    mean = np.bincount(inv, weights=y, minlength=len(ud)) / cnt
    if kind is LikelihoodKind.NORMAL:
        return ud, mean, cnt
    if kind is LikelihoodKind.BERNOULLI:
        p = (mean * cnt + 0.5) / (cnt + 1.0)
        return ud, _link(spec.likelihood.link, p), cnt
    if kind is LikelihoodKind.POISSON:
        return ud, np.log((mean * cnt + 0.5) / cnt), cnt
    # ordinal: centred mean category
    K = spec.likelihood.n_categories
    return ud, (mean - (K + 1) / 2.0), cnt


def _link(link: Link, p):
    p = np.clip(p, 1e-6, 1 - 1e-6)
    return special.logit(p) if link is Link.LOGIT else special.ndtri(p)


def _wls(basis, g, w, intercept=True):
    cols = [np.ones_like(g)] if intercept else []
    X = np.column_stack(cols + list(basis))
    sw = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(X * sw[:, None], g * sw, rcond=None)
    resid = g - X @ coef
    return coef, float((w * resid**2).sum())


def _heuristic_start(spec: ModelSpec, data) -> np.ndarray:
    """Rough natural-scale starting values from per-dose link-scale means."""
    names = spec.param_names
    start = dict.fromkeys(names, 0.0)
    ordinal = spec.likelihood.kind is LikelihoodKind.ORDINAL
    if len(data) > 0:
        d, g, w = _group_link_means(spec, data)
        dmax = float(d.max()) if d.max() > 0 else 1.0
        pos = d[d > 0]
        med = float(np.median(np.unique(d))) or (float(np.median(pos)) if len(pos) else 1.0)
        kind = spec.shape.kind
        cands = []
        if kind is ShapeKind.LINEAR:
            cands.append(({}, [d]))
        elif kind is ShapeKind.LOG_LINEAR:
            cands.append(({}, [np.log(d + spec.shape.offset)]))
        elif kind is ShapeKind.EMAX:
            for b3 in (med / 4, med, 4 * med):
                cands.append(({"b3": b3}, [d / (b3 + d)]))
        elif kind is ShapeKind.SIGMOID_EMAX:
            for b3, b4 in ((med, 1.0), (med**2, 2.0), (med**3, 3.0)):
                dh = np.power(d, b4)
                cands.append(({"b3": b3, "b4": b4}, [dh / (b3 + dh)]))
        elif kind is ShapeKind.EXPONENTIAL:
            for r in (-3.0, -1.0, 1.0, 3.0):
                b3 = r / dmax
                cands.append(({"b3": b3}, [np.exp(b3 * d)]))
        elif kind is ShapeKind.LOGISTIC:
            for b3 in (med / 2, med, 1.5 * med):
                b4 = dmax / 8
                cands.append(({"b3": b3, "b4": b4}, [1.0 / (1.0 + np.exp((b3 - d) / b4))]))
        elif kind is ShapeKind.QUADRATIC:
            cands.append(({}, [d, d * d]))
        best = None
        for nl, basis in cands:
            try:
                coef, sse = _wls(basis, g, w, intercept=not ordinal)
            except np.linalg.LinAlgError:
                continue
            if best is None or sse < best[0]:
                best = (sse, nl, coef)
        if best is not None:
            _, nl, coef = best
            start.update(nl)
            lin = [n for n in spec.shape.param_names if n not in nl]
            if ordinal:
                lin = [n for n in lin if n != "b1"]
            for n, c in zip(lin, coef):
                start[n] = float(c)
            if ordinal:
                # the mean-category scale is not the logit scale
                for n in lin:
                    start[n] *= 1.5
    for n in spec.shape.positive_params:
        if not start[n] > 0:
            start[n] = 1.0
    if spec.likelihood.kind is LikelihoodKind.NORMAL:
        y = np.asarray(data.response, dtype=float)
        start["sigma"] = float(np.std(y)) if len(y) > 1 and np.std(y) > 0 else 1.0
    if ordinal:
        K = spec.likelihood.n_categories
        y = np.asarray(data.response, dtype=int)
        if len(y):
            props = np.cumsum(np.bincount(y - 1, minlength=K))[:-1] / len(y)
            cuts = special.logit(np.clip(props, 0.02, 0.98))
        else:
            cuts = np.linspace(-1.0, 1.0, K - 1)
        cuts = np.maximum.accumulate(cuts + np.arange(K - 1) * 1e-3)
        for k, c in enumerate(cuts, start=1):
            start[f"cut{k}"] = float(c)
    for n, v in spec.fixed.items():
        start[n] = v
    return np.array([start[n] for n in names])


def _numerical_hessian(f, z, h=1e-4):
    n = len(z)
    H = np.empty((n, n))
    step = h * (1.0 + np.abs(z))
    f0 = f(z)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = step[i]
        H[i, i] = (f(z + ei) - 2 * f0 + f(z - ei)) / step[i] ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = step[j]
            H[i, j] = H[j, i] = (
                f(z + ei + ej) - f(z + ei - ej) - f(z - ei + ej) + f(z - ei - ej)
            ) / (4 * step[i] * step[j])
    return H


def _find_mode(logpost: _LogPosterior, z_starts):
    def nlp(z):
        v = -logpost(z)[0]
        return v if np.isfinite(v) else 1e300

    best = None
    for z0 in z_starts:
        if not np.isfinite(logpost(z0)[0]):
            continue
        with np.errstate(all="ignore"):
            res = optimize.minimize(nlp, z0, method="BFGS", options={"gtol": 1e-6, "maxiter": 2000})
        if best is None or res.fun < best.fun:
            best = res
    if best is None:
        return None, None
    z = best.x
    cov = None
    with np.errstate(all="ignore"):
        H = _numerical_hessian(nlp, z)
    try:
        if np.all(np.isfinite(H)):
            cov = np.linalg.inv(H)
            np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        cov = None
    if cov is None:
        hinv = getattr(best, "hess_inv", None)
        try:
            np.linalg.cholesky(hinv)
            cov = np.asarray(hinv)
        except (np.linalg.LinAlgError, TypeError, ValueError):
            cov = np.eye(len(z)) * 0.1
    return z, cov


# --- the sampler -------------------------------------------------------------

_IND_DF = 5.0
_IND_PROB = 0.3
_IND_INFLATE = 1.3


def _t_logdens(z, mu, L):
    """Unnormalized multivariate-t log density, per chain (constants cancel)."""
    r = np.linalg.solve(L, (z - mu)[..., None])[..., 0]
    F = z.shape[-1]
    return -0.5 * (_IND_DF + F) * np.log1p((r * r).sum(axis=-1) / _IND_DF)


def _adapt_points(warmup: int):
    first = max(50, warmup // 20)
    stop = int(0.9 * warmup)
    step = max(25, warmup // 40)
    return set(range(first, stop + 1, step))


def run_mcmc(spec: ModelSpec, data, cfg: McmcConfig = McmcConfig()) -> PosteriorDraws:
    """Sample the posterior of ``spec`` given ``data``."""
    logpost = _LogPosterior(spec, data)
    tf = logpost.tf
    F = len(tf.free)
    C = cfg.chains
    ss = np.random.SeedSequence(int(cfg.seed))
    init_ss, *chain_ss = ss.spawn(C + 1)
    init_rng = np.random.default_rng(init_ss)
    rngs = [np.random.default_rng(s) for s in chain_ss]

    x0 = _heuristic_start(spec, data)[tf.free_pos]
    with np.errstate(all="ignore"):
        z_h = tf.from_natural(x0[None, :])[0]
    starts = [z_h]
    for _ in range(3):
        xp = np.array([spec.priors[n].rvs(None, init_rng) for n in tf.free])
        if tf.cut_inc:
            xp[[tf.cut_first] + tf.cut_inc] = np.sort(xp[[tf.cut_first] + tf.cut_inc])
        with np.errstate(all="ignore"):
            starts.append(tf.from_natural(xp[None, :])[0])
    starts = [s for s in starts if np.all(np.isfinite(s))]
    mode, cov = _find_mode(logpost, starts)

    z = np.empty((C, F))
    for c in range(C):
        for attempt in range(100):
            if mode is not None and attempt < 50:
                L0 = np.linalg.cholesky(cov)
                cand = mode + L0 @ rngs[c].standard_normal(F)
            else:
                xp = np.array([spec.priors[n].rvs(None, rngs[c]) for n in tf.free])
                if tf.cut_inc:
                    xp[[tf.cut_first] + tf.cut_inc] = np.sort(xp[[tf.cut_first] + tf.cut_inc])
                with np.errstate(all="ignore"):
                    cand = tf.from_natural(xp[None, :])[0]
            if np.all(np.isfinite(cand)) and np.isfinite(logpost(cand)[0]):
                z[c] = cand
                break
        else:
            raise InitializationError(
                f"{spec.name}: no finite log-posterior after 100 initialization attempts")
    if cov is None:
        cov = np.eye(F) * 0.1
    W, N = cfg.warmup, cfg.post_warmup
    total = W + N
    noise = np.stack([r.standard_normal((total, F)) for r in rngs], axis=1)
    chi = np.stack([r.chisquare(_IND_DF, size=total) for r in rngs], axis=1) / _IND_DF
    pick = np.stack([r.uniform(size=total) for r in rngs], axis=1) < _IND_PROB
    log_u = np.log(np.stack([r.uniform(size=total) for r in rngs], axis=1))

    L = np.broadcast_to(np.linalg.cholesky(cov), (C, F, F)).copy()
    log_scale = np.full(C, math.log(2.38 / math.sqrt(F)))
    # heavy-tailed independence proposal, refitted with the random-walk covariance
    ind_mu = z.copy()
    ind_L = L.copy()
    ind_on = False
    lp = logpost(z)
    hist = np.empty((W, C, F))
    n_acc_warm = np.zeros(C)
    n_acc_post = np.zeros(C)
    kept = np.empty((C, cfg.kept, F))
    k = 0
    points = _adapt_points(W)
    target = cfg.target_accept
    for t in range(total):
        rw = np.einsum("cij,cj->ci", L, noise[t]) * np.exp(log_scale)[:, None]
        use_ind = pick[t] & ind_on
        if ind_on:
            ind = ind_mu + np.einsum("cij,cj->ci", ind_L, noise[t]) / np.sqrt(chi[t])[:, None]
            prop = np.where(use_ind[:, None], ind, z + rw)
        else:
            prop = z + rw
        lp_prop = logpost(prop)
        with np.errstate(invalid="ignore"):
            ratio = lp_prop - lp
            if np.any(use_ind):
                corr = _t_logdens(z, ind_mu, ind_L) - _t_logdens(prop, ind_mu, ind_L)
                ratio = ratio + np.where(use_ind, corr, 0.0)
        ratio = np.where(np.isnan(ratio), -np.inf, ratio)
        acc = log_u[t] < ratio
        z = np.where(acc[:, None], prop, z)
        lp = np.where(acc, lp_prop, lp)
        if t < W:
            n_acc_warm += acc
            alpha = np.exp(np.minimum(ratio, 0.0))
            rw_mask = ~use_ind
            log_scale += rw_mask * (t + 1.0) ** -0.6 * (alpha - target)
            hist[t] = z
            if t + 1 in points:
                seg = hist[(t + 1) // 2: t + 1]
                for c in range(C):
                    sc = np.cov(seg[:, c, :], rowvar=False).reshape(F, F)
                    sc = sc + 1e-10 * np.eye(F) * max(1.0, float(np.trace(sc)) / F)
                    try:
                        L[c] = np.linalg.cholesky(sc)
                    except np.linalg.LinAlgError:
                        continue
                    ind_mu[c] = seg[:, c, :].mean(axis=0)
                    ind_L[c] = _IND_INFLATE * L[c]
                ind_on = True
        else:
            n_acc_post += acc
            if (t - W) % cfg.thin == cfg.thin - 1 and k < cfg.kept:
                kept[:, k] = z
                k += 1
    if np.any(n_acc_warm == 0):
        raise AdaptationError(f"{spec.name}: a chain rejected every warmup proposal")
    x = tf.to_natural(kept)
    params = tf.full(x)
    draws = PosteriorDraws(spec.param_names, params, spec)
    diag = {}
    if C >= 2 and cfg.kept >= 10:
        diag = diagnostics(draws)
    diag["acceptance"] = [float(a) for a in n_acc_post / N]
    diag["underflow"] = logpost.lik.counter.count
    object.__setattr__(draws, "diagnostics", diag)
    return draws


# --- convergence diagnostics -------------------------------------------------

def _split_chains(x):
    n = x.shape[1] // 2
    return np.concatenate([x[:, :n], x[:, x.shape[1] - n:]], axis=0)


def _z_scale(x):
    r = stats.rankdata(x, method="average").reshape(x.shape)
    return special.ndtri((r - 0.375) / (x.size + 0.25))


def _rhat_basic(x):
    m, n = x.shape
    w = x.var(axis=1, ddof=1).mean()
    b = n * x.mean(axis=1).var(ddof=1)
    var_hat = (n - 1) / n * w + b / n
    return math.sqrt(var_hat / w) if w > 0 else math.inf


def _autocov(x):
    n = x.shape[-1]
    xc = x - x.mean(axis=-1, keepdims=True)
    size = 2 ** int(math.ceil(math.log2(2 * n)))
    f = np.fft.rfft(xc, size)
    return np.fft.irfft(f * np.conj(f), size)[..., :n] / n


def _ess(x):
    m, n = x.shape
    acov = _autocov(x)
    chain_mean = x.mean(axis=1)
    mean_var = acov[:, 0].mean() * n / (n - 1.0)
    var_plus = mean_var * (n - 1.0) / n
    if m > 1:
        var_plus += chain_mean.var(ddof=1)
    rho = np.zeros(n)
    rho_even = 1.0
    rho[0] = rho_even
    rho_odd = 1.0 - (mean_var - acov[:, 1].mean()) / var_plus
    rho[1] = rho_odd
    t = 1
    while t < n - 3 and rho_even + rho_odd > 0.0:
        rho_even = 1.0 - (mean_var - acov[:, t + 1].mean()) / var_plus
        rho_odd = 1.0 - (mean_var - acov[:, t + 2].mean()) / var_plus
        if rho_even + rho_odd >= 0:
            rho[t + 1] = rho_even
            rho[t + 2] = rho_odd
        t += 2
    max_t = t - 2
    if rho_even > 0:
        rho[max_t + 1] = rho_even
    # Geyer's initial monotone sequence
    t = 1
    while t <= max_t - 2:
        if rho[t + 1] + rho[t + 2] > rho[t - 1] + rho[t]:
            rho[t + 1] = (rho[t - 1] + rho[t]) / 2.0
            rho[t + 2] = rho[t + 1]
        t += 2
    tau = -1.0 + 2.0 * rho[: max_t + 1].sum() + rho[max_t + 1: max_t + 2].sum()
    tau = max(tau, 1.0 / math.log10(m * n))
    return m * n / tau


def rhat(x) -> tuple[float, bool]:
    """Rank-normalized split R-hat of a (chains, draws) array.

    Returns ``(rhat, zero_variance)``; constant input gives ``(1.0, True)``.
    """
    x = np.asarray(x, dtype=float)
    if np.ptp(x) == 0:
        return 1.0, True
    split = _split_chains(x)
    bulk = _rhat_basic(_z_scale(split))
    folded = np.abs(split - np.median(split))
    tail = _rhat_basic(_z_scale(folded)) if np.ptp(folded) > 0 else 1.0
    return float(max(bulk, tail)), False


def ess_bulk(x) -> float:
    x = np.asarray(x, dtype=float)
    if np.ptp(x) == 0:
        return float(x.size)
    return float(_ess(_z_scale(_split_chains(x))))


def diagnostics(draws: PosteriorDraws) -> dict:
    """Per-parameter R-hat and bulk ESS for the free parameters."""
    c, s, _ = draws.draws.shape
    if c < 2:
        raise DiagnosticsUnavailable("R-hat needs at least two chains")
    if s < 10:
        raise DiagnosticsUnavailable("diagnostics need at least 10 kept draws per chain")
    out = {"rhat": {}, "ess": {}, "zero_variance": []}
    for i, name in enumerate(draws.param_names):
        if name in draws.spec.fixed:
            continue
        x = draws.draws[..., i]
        r, zv = rhat(x)
        out["rhat"][name] = r
        out["ess"][name] = ess_bulk(x)
        if zv:
            out["zero_variance"].append(name)
    return out
