"""Ordered outcome categories from paired efficacy/severity data.

A :class:`CategoryRule` maps each subject's (efficacy change, adverse-event
severity) pair to one of ``K`` ordered categories, 1 being the most
favourable.  Ordinal fits of the resulting data give category-probability
curves and distances between dose-specific category distributions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .averaging import PooledDraws
from .data import Dataset, PairedDataset
from .errors import ConfigError, DataError
from .models import Likelihood, LikelihoodKind
from .selection import CurveKind, CurveSummary, DoseGrid

#: AE severity bands; a boundary value belongs to the more severe band.
MILD_MAX = 0.05
MODERATE_MAX = 0.25


@dataclass(frozen=True)
class RuleClause:
    """``eff_min <= eff <= eff_max`` and ``sev_min <= severity < sev_max``."""

    category: int
    eff_min: float = -math.inf
    eff_max: float = math.inf
    sev_min: float = 0.0
    sev_max: float = math.inf

    def matches(self, eff, sev):
        return ((eff >= self.eff_min) & (eff <= self.eff_max)
                & (sev >= self.sev_min) & (sev < self.sev_max))

    def to_dict(self) -> dict:
        d = {"category": self.category}
        for k in ("eff_min", "eff_max", "sev_min", "sev_max"):
            v = getattr(self, k)
            if math.isfinite(v) and not (k == "sev_min" and v == 0.0):
                d[k] = v
        return d

    @classmethod
    def from_dict(cls, d) -> "RuleClause":
        try:
            return cls(int(d["category"]), float(d.get("eff_min", -math.inf)),
                       float(d.get("eff_max", math.inf)), float(d.get("sev_min", 0.0)),
                       float(d.get("sev_max", math.inf)))
        except KeyError as exc:
            raise ConfigError(f"rule clause lacks {exc}") from exc


@dataclass(frozen=True)
class CategoryRule:
    """Ordered clauses; the first match wins, otherwise ``default``.

    A severity at or above ``severe`` maps to the worst category ``K``
    before any clause is consulted.
    """

    K: int
    clauses: tuple[RuleClause, ...]
    default: int
    severe: float | None = None
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        if self.K < 2:
            raise ConfigError("a category rule needs at least 2 categories")
        cats = [c.category for c in self.clauses] + [self.default]
        if any(not 1 <= c <= self.K for c in cats):
            raise ConfigError(f"rule categories must lie in 1..{self.K}")
        if self.labels and len(self.labels) != self.K:
            raise ConfigError(f"need {self.K} labels, got {len(self.labels)}")

    def to_dict(self) -> dict:
        d = {"K": self.K, "clauses": [c.to_dict() for c in self.clauses], "default": self.default}
        if self.severe is not None:
            d["severe"] = self.severe
        if self.labels:
            d["labels"] = list(self.labels)
        return d

    @classmethod
    def from_dict(cls, d) -> "CategoryRule":
        try:
            return cls(int(d["K"]), tuple(RuleClause.from_dict(c) for c in d["clauses"]),
                       int(d["default"]), d.get("severe"), tuple(d.get("labels", ())))
        except KeyError as exc:
            raise ConfigError(f"category rule lacks {exc}") from exc


def default_rule() -> CategoryRule:
    """Target reduction 5 to 10 without more than a mild AE is best; any
    reduction of at least 5 with at most a moderate AE is good; a severe AE
    is worst; everything else (including no benefit) is minimal."""
    return CategoryRule(
        K=4,
        clauses=(
            RuleClause(1, eff_min=5.0, eff_max=10.0, sev_max=MILD_MAX),
            RuleClause(2, eff_min=5.0, sev_max=MODERATE_MAX),
        ),
        default=3,
        severe=MODERATE_MAX,
        labels=("Best", "Good", "Minimal", "Worst"),
    )


NAMED_SETS = {
    "Best": (1,),
    "Best+Good": (1, 2),
    "Minimal+Worst": (3, 4),
    "Worst": (4,),
}


def assign_categories(eff, severity, rule: CategoryRule) -> np.ndarray:
    """Vectorized :func:`assign_category`."""
    eff = np.asarray(eff, dtype=float)
    sev = np.asarray(severity, dtype=float)
    if np.any(~np.isfinite(eff)):
        raise DataError("efficacy values must be finite")
    if np.any(~((sev >= 0.0) & (sev <= 1.0))):
        raise DataError("severity must lie in [0, 1]")
    eff, sev = np.broadcast_arrays(eff, sev)
    out = np.zeros(eff.shape, dtype=int)
    if rule.severe is not None:
        out[sev >= rule.severe] = rule.K
    for c in rule.clauses:
        hit = (out == 0) & c.matches(eff, sev)
        out[hit] = c.category
    out[out == 0] = rule.default
    return out


def assign_category(eff: float, severity: float, rule: CategoryRule | None = None) -> int:
    return int(assign_categories(eff, severity, rule or default_rule()))


def categorize(data: PairedDataset, rule: CategoryRule | None = None, name: str = "categories") -> Dataset:
    """Ordinal dataset of per-subject categories."""
    rule = rule or default_rule()
    if data.severity is None:
        raise DataError("categorizing needs a severity column")
    cats = assign_categories(data.y_eff, data.severity, rule)
    return Dataset(data.dose, cats, Likelihood(LikelihoodKind.ORDINAL, n_categories=rule.K), name=name)


# --- distributions and distances ---------------------------------------------

@dataclass(frozen=True, eq=False)
class CategoryDistribution:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise DataError("category probabilities must be non-negative and sum to 1")
        object.__setattr__(self, "probs", p)


class Metric(str, enum.Enum):
    HELLINGER = "hellinger"
    JENSEN_SHANNON = "jensen_shannon"


def _probs(p):
    return p.probs if isinstance(p, CategoryDistribution) else np.asarray(p, dtype=float)


def category_distance(p, q, metric: Metric | str = Metric.HELLINGER):
    """Hellinger or Jensen-Shannon distance along the last axis.

    Both are scaled to [0, 1]; Jensen-Shannon uses base-2 logs and the
    square root of the divergence.
    """
    p, q = _probs(p), _probs(q)
    if p.shape[-1] != q.shape[-1]:
        raise DataError("distributions have different numbers of categories")
    metric = Metric(metric)
    if metric is Metric.HELLINGER:
        h2 = 0.5 * ((np.sqrt(p) - np.sqrt(q)) ** 2).sum(axis=-1)
        return np.sqrt(np.clip(h2, 0.0, 1.0))
    m = 0.5 * (p + q)
    with np.errstate(divide="ignore", invalid="ignore"):
        tp = np.where(p > 0, p * np.log2(p / m), 0.0)
        tq = np.where(q > 0, q * np.log2(q / m), 0.0)
    js = 0.5 * (tp.sum(axis=-1) + tq.sum(axis=-1))
    return np.sqrt(np.clip(js, 0.0, 1.0))


def _require_ordinal(pooled: PooledDraws):
    if pooled.likelihood.kind is not LikelihoodKind.ORDINAL:
        raise ConfigError("category curves need an ordinal fit")


def category_prob_curve(pooled: PooledDraws, grid: DoseGrid, category_set,
                        label: str = "") -> CurveSummary:
    """Probability that the outcome falls in ``category_set`` (1-based)."""
    _require_ordinal(pooled)
    if isinstance(category_set, str):
        category_set = NAMED_SETS[category_set]
    cs = tuple(sorted({int(k) for k in category_set}))
    K = pooled.likelihood.n_categories
    if not cs:
        raise ConfigError("category set is empty")
    if cs[0] < 1 or cs[-1] > K:
        raise ConfigError(f"categories must lie in 1..{K}")
    p = pooled.category_probs(grid.doses)
    r = p[..., [k - 1 for k in cs]].sum(axis=-1)
    return CurveSummary(CurveKind.CATEGORY, grid, r, label, cs)


def distance_curve(pooled: PooledDraws, grid: DoseGrid, metric: Metric | str = Metric.HELLINGER,
                   label: str = "") -> CurveSummary:
    """Distance between each dose's category distribution and the control's,
    per realization."""
    _require_ordinal(pooled)
    p = pooled.category_probs(grid.doses)
    ref = p[:, [grid.control_index], :]
    d = category_distance(p, ref, metric)
    d[:, grid.control_index] = 0.0
    return CurveSummary(CurveKind.DISTANCE, grid, d, label or Metric(metric).value)


def empirical_distribution(data: Dataset, dose: float) -> CategoryDistribution:
    """Observed category frequencies at one dose."""
    K = data.likelihood.n_categories
    y = data.response[np.isclose(data.dose, dose)].astype(int)
    if len(y) == 0:
        raise DataError(f"no observations at dose {dose}")
    return CategoryDistribution(np.bincount(y - 1, minlength=K) / len(y))
