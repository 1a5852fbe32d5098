"""Candidate dose-response shapes, likelihoods, priors and log-likelihoods.

Parameter vectors are laid out as the shape parameters (``b1``, ``b2``, ...)
followed by the likelihood's nuisance parameters (``sigma`` or the ordered
cutpoints ``cut1 < cut2 < ...``).  Every function that takes parameters
accepts a leading batch dimension, so a whole set of posterior draws can be
evaluated at once.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import special, stats

from .copulas import EPS
from .errors import ConfigError, IdentifiabilityError

LOG_EPS = math.log(EPS)
_EXP_CAP = 700.0


class ShapeKind(str, enum.Enum):
    LINEAR = "linear"
    LOG_LINEAR = "log_linear"
    EMAX = "emax"
    SIGMOID_EMAX = "sigmoid_emax"
    EXPONENTIAL = "exponential"
    LOGISTIC = "logistic"
    QUADRATIC = "quadratic"


_SHAPE_PARAMS = {
    ShapeKind.LINEAR: ("b1", "b2"),
    ShapeKind.LOG_LINEAR: ("b1", "b2"),
    ShapeKind.EMAX: ("b1", "b2", "b3"),
    ShapeKind.SIGMOID_EMAX: ("b1", "b2", "b3", "b4"),
    ShapeKind.EXPONENTIAL: ("b1", "b2", "b3"),
    ShapeKind.LOGISTIC: ("b1", "b2", "b3", "b4"),
    ShapeKind.QUADRATIC: ("b1", "b2", "b3"),
}

_POSITIVE = {
    ShapeKind.EMAX: {"b3"},
    ShapeKind.SIGMOID_EMAX: {"b3", "b4"},
    ShapeKind.LOGISTIC: {"b4"},
}

#: The default candidate family, all monotone in dose.
DEFAULT_SHAPES = (
    ShapeKind.LINEAR,
    ShapeKind.LOG_LINEAR,
    ShapeKind.EMAX,
    ShapeKind.SIGMOID_EMAX,
    ShapeKind.EXPONENTIAL,
    ShapeKind.LOGISTIC,
)


@dataclass(frozen=True)
class DoseResponseShape:
    """Mean function of dose.

    ``offset`` is the constant ``c0`` added to dose inside the logarithm of
    the log-linear shape and is ignored by every other shape.
    """

    kind: ShapeKind
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ShapeKind(self.kind))
        if self.kind is ShapeKind.LOG_LINEAR and not self.offset > 0:
            raise ConfigError("log-linear shape needs a positive dose offset")

    @property
    def param_names(self) -> tuple[str, ...]:
        return _SHAPE_PARAMS[self.kind]

    @property
    def positive_params(self) -> set[str]:
        return _POSITIVE.get(self.kind, set())

    def mean(self, params, dose):
        """Evaluate the mean function.

        ``params`` has shape ``(..., n_params)`` and ``dose`` shape ``(M,)``;
        the result has shape ``(..., M)``.
        """
        p = np.asarray(params, dtype=float)
        d = np.asarray(dose, dtype=float)
        b = [p[..., i, None] for i in range(p.shape[-1])]
        k = self.kind
        if k is ShapeKind.LINEAR:
            return b[0] + b[1] * d
        if k is ShapeKind.LOG_LINEAR:
            return b[0] + b[1] * np.log(d + self.offset)
        if k is ShapeKind.EMAX:
            return b[0] + b[1] * d / (b[2] + d)
        if k is ShapeKind.SIGMOID_EMAX:
            dh = np.power(d, b[3])
            return b[0] + b[1] * dh / (b[2] + dh)
        if k is ShapeKind.EXPONENTIAL:
            return b[0] + b[1] * np.exp(np.minimum(b[2] * d, _EXP_CAP))
        if k is ShapeKind.LOGISTIC:
            z = np.minimum((b[2] - d) / b[3], _EXP_CAP)
            return b[0] + b[1] / (1.0 + np.exp(z))
        if k is ShapeKind.QUADRATIC:
            return b[0] + b[1] * d + b[2] * d * d
        raise AssertionError(k)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.kind is ShapeKind.LOG_LINEAR:
            d["offset"] = self.offset
        return d

    @classmethod
    def from_dict(cls, d) -> "DoseResponseShape":
        if isinstance(d, str):
            d = {"kind": d}
        return cls(ShapeKind(d["kind"]), float(d.get("offset", 0.0)))


def eval_mean(shape: DoseResponseShape, params, dose):
    """Mean response of ``shape`` with parameters ``params`` at ``dose``."""
    scalar = np.ndim(dose) == 0
    out = shape.mean(params, np.atleast_1d(dose))
    return out[..., 0] if scalar else out


# --- links -----------------------------------------------------------------

class Link(str, enum.Enum):
    IDENTITY = "identity"
    LOGIT = "logit"
    PROBIT = "probit"
    LOG = "log"


def apply_inverse_link(link, eta):
    """Map a linear predictor onto the response scale.

    Probabilities are clamped to ``(EPS, 1 - EPS)``.
    """
    link = Link(link)
    eta = np.asarray(eta, dtype=float)
    if link is Link.IDENTITY:
        return eta
    if link is Link.LOG:
        return np.exp(np.minimum(eta, _EXP_CAP))
    p = special.expit(eta) if link is Link.LOGIT else special.ndtr(eta)
    return np.clip(p, EPS, 1.0 - EPS)


def _log_p_and_q(link: Link, eta):
    """log(p) and log(1 - p) under a binary link, clamped at log(EPS)."""
    if link is Link.LOGIT:
        lp, lq = -np.logaddexp(0.0, -eta), -np.logaddexp(0.0, eta)
    else:
        lp, lq = special.log_ndtr(eta), special.log_ndtr(-eta)
    return np.maximum(lp, LOG_EPS), np.maximum(lq, LOG_EPS)


# --- likelihoods -----------------------------------------------------------

class LikelihoodKind(str, enum.Enum):
    NORMAL = "normal"
    NORMAL_SUMMARY = "normal_summary"
    BERNOULLI = "bernoulli"
    BINOMIAL = "binomial"
    POISSON = "poisson"
    ORDINAL = "ordinal"


@dataclass(frozen=True)
class Likelihood:
    """Response distribution.

    ``link`` applies to the binary families; ``n_categories`` to the
    ordered-categorical (cumulative logit) family.
    """

    kind: LikelihoodKind
    link: Link = Link.IDENTITY
    n_categories: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", LikelihoodKind(self.kind))
        kind = self.kind
        if kind in (LikelihoodKind.BERNOULLI, LikelihoodKind.BINOMIAL):
            link = Link(self.link) if self.link != Link.IDENTITY else Link.LOGIT
            if link not in (Link.LOGIT, Link.PROBIT):
                raise ConfigError(f"{kind.value} needs a logit or probit link, got {link.value}")
        elif kind is LikelihoodKind.POISSON:
            link = Link.LOG
        elif kind is LikelihoodKind.ORDINAL:
            link = Link.LOGIT
            if self.n_categories is None or self.n_categories < 2:
                raise ConfigError("ordered-categorical likelihood needs K >= 2 categories")
        else:
            link = Link.IDENTITY
        object.__setattr__(self, "link", link)

    @property
    def nuisance_names(self) -> tuple[str, ...]:
        if self.kind is LikelihoodKind.NORMAL:
            return ("sigma",)
        if self.kind is LikelihoodKind.ORDINAL:
            return tuple(f"cut{k}" for k in range(1, self.n_categories))
        return ()

    @property
    def is_binary(self) -> bool:
        return self.kind in (LikelihoodKind.BERNOULLI, LikelihoodKind.BINOMIAL)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.is_binary:
            d["link"] = self.link.value
        if self.kind is LikelihoodKind.ORDINAL:
            d["n_categories"] = self.n_categories
        return d

    @classmethod
    def from_dict(cls, d) -> "Likelihood":
        if isinstance(d, str):
            d = {"kind": d}
        try:
            return cls(LikelihoodKind(d["kind"]), Link(d.get("link", "identity")),
                       d.get("n_categories"))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad likelihood specification {d!r}: {exc}") from exc


# --- priors ----------------------------------------------------------------

class PriorFamily(str, enum.Enum):
    STUDENT_T = "student_t"
    HALF_STUDENT_T = "half_student_t"
    LOGNORMAL = "lognormal"
    NORMAL = "normal"


@dataclass(frozen=True)
class Prior:
    family: PriorFamily
    loc: float = 0.0
    scale: float = 1.0
    df: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "family", PriorFamily(self.family))
        if not self.scale > 0 or not self.df > 0:
            raise ConfigError(f"prior scale and df must be positive: {self}")

    def logpdf(self, x):
        # closed forms; this sits in the sampler's inner loop
        x = np.asarray(x, dtype=float)
        f = self.family
        if f in (PriorFamily.STUDENT_T, PriorFamily.HALF_STUDENT_T):
            nu = self.df
            c = (math.lgamma((nu + 1) / 2) - math.lgamma(nu / 2)
                 - 0.5 * math.log(nu * math.pi) - math.log(self.scale))
            z = (x - self.loc) / self.scale
            out = c - 0.5 * (nu + 1) * np.log1p(z * z / nu)
            if f is PriorFamily.HALF_STUDENT_T:
                out = np.where(x > 0, out + math.log(2.0), -np.inf)
            return out
        if f is PriorFamily.NORMAL:
            z = (x - self.loc) / self.scale
            return -0.5 * z * z - math.log(self.scale) - 0.5 * math.log(2 * math.pi)
        with np.errstate(divide="ignore", invalid="ignore"):
            lx = np.log(x)
            z = (lx - self.loc) / self.scale
            out = -0.5 * z * z - math.log(self.scale) - 0.5 * math.log(2 * math.pi) - lx
        return np.where(x > 0, out, -np.inf)

    def rvs(self, size, rng: np.random.Generator):
        f = self.family
        if f is PriorFamily.STUDENT_T:
            return self.loc + self.scale * rng.standard_t(self.df, size)
        if f is PriorFamily.NORMAL:
            return rng.normal(self.loc, self.scale, size)
        if f is PriorFamily.HALF_STUDENT_T:
            return np.abs(self.scale * rng.standard_t(self.df, size))
        return np.exp(rng.normal(self.loc, self.scale, size))

    def ppf(self, q):
        f = self.family
        if f is PriorFamily.STUDENT_T:
            return stats.t.ppf(q, self.df, self.loc, self.scale)
        if f is PriorFamily.NORMAL:
            return stats.norm.ppf(q, self.loc, self.scale)
        if f is PriorFamily.HALF_STUDENT_T:
            return stats.t.ppf(0.5 + 0.5 * np.asarray(q), self.df, 0.0, self.scale)
        return np.exp(stats.norm.ppf(q, self.loc, self.scale))

    def to_dict(self) -> dict:
        d = {"family": self.family.value, "loc": self.loc, "scale": self.scale}
        if self.family in (PriorFamily.STUDENT_T, PriorFamily.HALF_STUDENT_T):
            d["df"] = self.df
        return d

    @classmethod
    def from_dict(cls, d) -> "Prior":
        return cls(PriorFamily(d["family"]), float(d.get("loc", 0.0)),
                   float(d.get("scale", 1.0)), float(d.get("df", 3.0)))


def StudentT(df, loc, scale) -> Prior:  # noqa: N802
    return Prior(PriorFamily.STUDENT_T, loc, scale, df)


def HalfStudentT(df, scale) -> Prior:  # noqa: N802
    return Prior(PriorFamily.HALF_STUDENT_T, 0.0, scale, df)


def LogNormal(loc, scale) -> Prior:  # noqa: N802
    return Prior(PriorFamily.LOGNORMAL, loc, scale)


def Normal(loc, scale) -> Prior:  # noqa: N802
    return Prior(PriorFamily.NORMAL, loc, scale)


PriorSet = Mapping[str, Prior]


# --- model specification ---------------------------------------------------

@dataclass(frozen=True)
class ModelSpec:
    """One candidate model: a mean shape, a likelihood and priors.

    ``fixed`` pins parameters to constants (the ordinal intercept, or a known
    residual SD); priors cover exactly the remaining free parameters.
    """

    shape: DoseResponseShape
    likelihood: Likelihood
    priors: Mapping[str, Prior]
    fixed: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        names = self.param_names
        unknown = set(self.fixed) - set(names)
        if unknown:
            raise ConfigError(f"fixed parameters {sorted(unknown)} not in model {names}")
        free = set(self.free_names)
        if set(self.priors) != free:
            raise ConfigError(
                f"priors given for {sorted(self.priors)} but free parameters are {sorted(free)}")

    @property
    def name(self) -> str:
        return self.shape.kind.value

    @property
    def param_names(self) -> tuple[str, ...]:
        return self.shape.param_names + self.likelihood.nuisance_names

    @property
    def free_names(self) -> tuple[str, ...]:
        return tuple(n for n in self.param_names if n not in self.fixed)

    @property
    def n_shape(self) -> int:
        return len(self.shape.param_names)

    def positive_params(self) -> set[str]:
        pos = set(self.shape.positive_params)
        if self.likelihood.kind is LikelihoodKind.NORMAL:
            pos.add("sigma")
        return pos

    def split(self, params):
        """Shape parameters and nuisance parameters of a full vector."""
        params = np.asarray(params, dtype=float)
        return params[..., : self.n_shape], params[..., self.n_shape:]

    def eta(self, params, dose):
        """Linear predictor (mean on the link scale) at ``dose``."""
        sp, _ = self.split(params)
        return self.shape.mean(sp, np.atleast_1d(dose))

    def response_mean(self, params, dose):
        """Expected response on the natural scale."""
        eta = self.eta(params, dose)
        if self.likelihood.kind is LikelihoodKind.ORDINAL:
            raise ConfigError("ordinal models have category probabilities, not a mean")
        return apply_inverse_link(self.likelihood.link, eta)

    def category_probs(self, params, dose):
        """Category probabilities, shape ``(..., M, K)``."""
        _, cuts = self.split(params)
        return ordinal_probs(cuts, self.eta(params, dose))

    def to_dict(self) -> dict:
        return {
            "shape": self.shape.to_dict(),
            "likelihood": self.likelihood.to_dict(),
            "priors": {k: v.to_dict() for k, v in self.priors.items()},
            "fixed": dict(self.fixed),
        }

    @classmethod
    def from_dict(cls, d) -> "ModelSpec":
        return cls(
            DoseResponseShape.from_dict(d["shape"]),
            Likelihood.from_dict(d["likelihood"]),
            {k: Prior.from_dict(v) for k, v in d["priors"].items()},
            {k: float(v) for k, v in d.get("fixed", {}).items()},
        )


def ordinal_probs(cuts, eta):
    """Cumulative-logit category probabilities.

    ``cuts`` has shape ``(..., K-1)`` and ``eta`` shape ``(..., M)``; returns
    ``(..., M, K)`` with P(C = k) = expit(cut_k - eta) - expit(cut_{k-1} - eta).
    """
    cuts = np.asarray(cuts, dtype=float)
    eta = np.asarray(eta, dtype=float)
    cum = special.expit(cuts[..., None, :] - eta[..., :, None])
    zeros = np.zeros(cum.shape[:-1] + (1,))
    ones = np.ones(cum.shape[:-1] + (1,))
    cum = np.concatenate([zeros, cum, ones], axis=-1)
    return np.diff(cum, axis=-1)


def _ordinal_logprobs(cuts, eta):
    """Log category probabilities computed stably, before flooring."""
    cuts = np.asarray(cuts, dtype=float)
    eta = np.asarray(eta, dtype=float)
    a = cuts[..., None, :] - eta[..., :, None]  # (..., M, K-1)
    # log(expit(a_k) - expit(a_{k-1})) for interior categories
    lo = a[..., :-1]
    hi = a[..., 1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        interior = (
            -np.logaddexp(0.0, -hi) + np.log(-np.expm1(lo - hi)) - np.logaddexp(0.0, lo)
        )
    first = -np.logaddexp(0.0, -a[..., :1])
    last = -np.logaddexp(0.0, a[..., -1:])
    out = np.concatenate([first, interior, last], axis=-1)
    return np.where(np.isnan(out), -np.inf, out)


class UnderflowCounter:
    """Counts floored category log-probabilities during a fit."""

    def __init__(self):
        self.count = 0

    def __repr__(self):
        return f"UnderflowCounter({self.count})"


def _row_loglik(spec: ModelSpec, params, data, counter: UnderflowCounter | None = None):
    params = np.asarray(params, dtype=float)
    kind = spec.likelihood.kind
    y = data.response
    eta = spec.eta(params, data.dose)
    if kind is LikelihoodKind.NORMAL:
        sigma = params[..., spec.param_names.index("sigma"), None]
        z = (y - eta) / sigma
        return -0.5 * z * z - np.log(sigma) - 0.5 * math.log(2.0 * math.pi)
    if kind is LikelihoodKind.NORMAL_SUMMARY:
        se = data.se
        z = (y - eta) / se
        return -0.5 * z * z - np.log(se) - 0.5 * math.log(2.0 * math.pi)
    if kind is LikelihoodKind.BERNOULLI:
        lp, lq = _log_p_and_q(spec.likelihood.link, eta)
        return np.where(y > 0.5, lp, lq)
    if kind is LikelihoodKind.BINOMIAL:
        n = data.trials
        lp, lq = _log_p_and_q(spec.likelihood.link, eta)
        logc = special.gammaln(n + 1) - special.gammaln(y + 1) - special.gammaln(n - y + 1)
        return logc + y * lp + (n - y) * lq
    if kind is LikelihoodKind.POISSON:
        log_mu = np.minimum(eta, _EXP_CAP)
        return y * log_mu - np.exp(log_mu) - special.gammaln(y + 1)
    if kind is LikelihoodKind.ORDINAL:
        _, cuts = spec.split(params)
        lps = _ordinal_logprobs(cuts, eta)  # (..., N, K)
        idx = data.response.astype(int) - 1
        row = np.take_along_axis(lps, np.broadcast_to(idx[:, None], lps.shape[:-1] + (1,)), axis=-1)[..., 0]
        low = row < LOG_EPS
        if counter is not None:
            counter.count += int(np.count_nonzero(low))
        return np.where(low, LOG_EPS, row)
    raise AssertionError(kind)


def log_likelihood(spec: ModelSpec, params, data, counter: UnderflowCounter | None = None):
    """Total and per-row log-likelihood.

    Returns ``(total, per_row)`` with shapes ``(...)`` and ``(..., N)``.
    """
    per_row = _row_loglik(spec, params, data, counter)
    return per_row.sum(axis=-1), per_row


# --- defaults --------------------------------------------------------------

def _response_scale(likelihood: Likelihood, data) -> float:
    if likelihood.kind in (LikelihoodKind.NORMAL, LikelihoodKind.NORMAL_SUMMARY):
        y = np.asarray(data.response, dtype=float)
        if len(y) >= 2:
            s = float(np.std(y, ddof=1))
            if s > 0:
                return s
    return 1.0


def _dose_scales(data) -> tuple[float, float]:
    """Median and maximum of the distinct doses (1.0 when unavailable)."""
    doses = np.unique(np.asarray(data.dose, dtype=float))
    if len(doses) == 0 or doses.max() <= 0:
        return 1.0, 1.0
    med = float(np.median(doses))
    if med <= 0:
        med = float(np.median(doses[doses > 0]))
    return med, float(doses.max())


def default_priors(shape: DoseResponseShape, likelihood: Likelihood, data,
                   fixed: Mapping[str, float] = ()) -> dict[str, Prior]:
    """Weakly informative t(3) priors scaled to the response and dose range."""
    s_y = _response_scale(likelihood, data)
    med, dmax = _dose_scales(data)
    k = shape.kind
    priors: dict[str, Prior] = {}
    for name in shape.param_names:
        if k in (ShapeKind.EMAX, ShapeKind.SIGMOID_EMAX) and name == "b3":
            priors[name] = LogNormal(math.log(med), 1.0)
        elif k is ShapeKind.SIGMOID_EMAX and name == "b4":
            priors[name] = LogNormal(0.0, 0.5)
        elif k is ShapeKind.EXPONENTIAL and name == "b3":
            priors[name] = StudentT(3, 0.0, 5.0 / dmax)
        elif k is ShapeKind.LOGISTIC and name == "b3":
            priors[name] = StudentT(3, med, dmax)
        elif k is ShapeKind.LOGISTIC and name == "b4":
            priors[name] = LogNormal(math.log(dmax / 8.0), 1.0)
        elif k is ShapeKind.QUADRATIC and name == "b3":
            priors[name] = StudentT(3, 0.0, 5.0 * s_y / dmax)
        else:
            priors[name] = StudentT(3, 0.0, 5.0 * s_y)
    if likelihood.kind is LikelihoodKind.NORMAL:
        priors["sigma"] = HalfStudentT(3, 5.0 * s_y)
    for name in likelihood.nuisance_names:
        if name.startswith("cut"):
            priors[name] = StudentT(3, 0.0, 5.0)
    for name in dict(fixed):
        priors.pop(name, None)
    return priors


def loglinear_offset(data) -> float:
    doses = np.asarray(data.dose, dtype=float)
    pos = doses[doses > 0]
    return float(pos.min()) / 10.0 if len(pos) else 0.1


def default_candidate_set(likelihood: Likelihood, data,
                          shapes: Sequence[ShapeKind | str] | None = None) -> list[ModelSpec]:
    """One model per candidate shape, each with default priors.

    Ordinal models fix the shape intercept ``b1`` at zero so that the
    cutpoints carry the location.
    """
    n_doses = len(np.unique(np.asarray(data.dose, dtype=float)))
    if n_doses < 3:
        raise IdentifiabilityError(
            f"need at least 3 distinct doses to fit the candidate family, got {n_doses}")
    kinds = [ShapeKind(s) for s in (shapes or DEFAULT_SHAPES)]
    out = []
    for kind in kinds:
        offset = loglinear_offset(data) if kind is ShapeKind.LOG_LINEAR else 0.0
        shape = DoseResponseShape(kind, offset)
        fixed = {"b1": 0.0} if likelihood.kind is LikelihoodKind.ORDINAL else {}
        out.append(ModelSpec(shape, likelihood, default_priors(shape, likelihood, data, fixed), fixed))
    return out
