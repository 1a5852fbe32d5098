"""Dose-grid summaries of pooled draws and acceptable dose ranges."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .averaging import PooledDraws
from .data import Dataset, PairedDataset
from .errors import ConfigError, DataError, IdentifiabilityError
from .models import Likelihood, LikelihoodKind

QUANTILES = (0.025, 0.25, 0.5, 0.75, 0.975)
CSV_HEADER = ("dose", "mean", "sd", "q025", "q25", "q50", "q75", "q975")


@dataclass(frozen=True, eq=False)
class DoseGrid:
    """Sorted evaluation doses; the control dose is always on the grid."""

    doses: np.ndarray
    control: float = 0.0

    def __post_init__(self):
        d = np.asarray(self.doses, dtype=float).reshape(-1)
        if len(d) == 0:
            raise ConfigError("dose grid is empty")
        if np.any(d < 0) or np.any(~np.isfinite(d)):
            raise ConfigError("grid doses must be finite and non-negative")
        if np.any(np.diff(d) <= 0):
            raise ConfigError("grid doses must be strictly increasing")
        c = float(self.control)
        if not np.any(np.isclose(d, c, rtol=0, atol=1e-12)):
            d = np.sort(np.append(d, c))
        object.__setattr__(self, "doses", d)
        object.__setattr__(self, "control", c)

    def __len__(self):
        return len(self.doses)

    @classmethod
    def regular(cls, lo: float, hi: float, step: float, control: float = 0.0) -> "DoseGrid":
        n = int(round((hi - lo) / step))
        return cls(np.round(lo + step * np.arange(n + 1), 10), control)

    @classmethod
    def spanning(cls, data, n: int = 51, control: float = 0.0) -> "DoseGrid":
        """``n`` equally spaced doses over the observed dose range."""
        d = np.asarray(data.dose, dtype=float)
        return cls(np.linspace(d.min(), d.max(), n), control)

    @property
    def control_index(self) -> int:
        return int(np.argmin(np.abs(self.doses - self.control)))

    def index(self, dose: float) -> int:
        i = int(np.argmin(np.abs(self.doses - dose)))
        if abs(self.doses[i] - dose) > 1e-9:
            raise ConfigError(f"dose {dose} is not on the grid")
        return i

    def to_dict(self) -> dict:
        return {"doses": [float(x) for x in self.doses], "control": self.control}

    @classmethod
    def from_dict(cls, d) -> "DoseGrid":
        if "doses" in d:
            return cls(d["doses"], d.get("control", 0.0))
        try:
            return cls.regular(d["lo"], d["hi"], d["step"], d.get("control", 0.0))
        except KeyError as exc:
            raise ConfigError(f"grid needs 'doses' or 'lo'/'hi'/'step', missing {exc}") from exc


class CurveKind(str, enum.Enum):
    EXPECTED = "expected_response"
    INDIVIDUAL = "individual_prediction"
    DIFF = "diff_from_control"
    CATEGORY = "category_probability"
    DISTANCE = "distance"


@dataclass(frozen=True, eq=False)
class CurveSummary:
    """Per-dose summaries of an ``(N, M)`` matrix of realizations.

    The realizations are kept so that paired quantities (differences,
    intersections across curves) can be formed later.
    """

    kind: CurveKind
    grid: DoseGrid
    realizations: np.ndarray = field(repr=False)
    label: str = ""
    category_set: tuple[int, ...] | None = None

    def __post_init__(self):
        r = np.atleast_2d(np.asarray(self.realizations, dtype=float))
        if r.shape[1] != len(self.grid):
            raise ConfigError("realizations do not match the grid")
        object.__setattr__(self, "realizations", r)
        object.__setattr__(self, "kind", CurveKind(self.kind))

    @property
    def doses(self) -> np.ndarray:
        return self.grid.doses

    @property
    def mean(self) -> np.ndarray:
        return self.realizations.mean(axis=0)

    @property
    def sd(self) -> np.ndarray:
        r = self.realizations
        return r.std(axis=0, ddof=1) if len(r) > 1 else np.zeros(r.shape[1])

    @property
    def quantiles(self) -> np.ndarray:
        """``(5, M)`` array at :data:`QUANTILES`."""
        return np.quantile(self.realizations, QUANTILES, axis=0)

    def stat(self, q: float | None) -> np.ndarray:
        """Quantile ``q`` per dose, or the mean when ``q`` is None."""
        if q is None:
            return self.mean
        return np.quantile(self.realizations, q, axis=0)

    def at(self, dose: float) -> dict:
        i = self.grid.index(dose)
        qs = self.quantiles[:, i]
        return dict(zip(CSV_HEADER, (float(self.doses[i]), float(self.mean[i]), float(self.sd[i]),
                                     *map(float, qs))))

    def rows(self):
        qs = self.quantiles
        for i, d in enumerate(self.doses):
            yield (float(d), float(self.mean[i]), float(self.sd[i]), *map(float, qs[:, i]))

    def header(self) -> tuple[str, ...]:
        return CSV_HEADER + (("category_set",) if self.category_set is not None else ())

    def csv_rows(self):
        tag = None
        if self.category_set is not None:
            tag = "+".join(str(k) for k in self.category_set)
        for r in self.rows():
            yield r + ((tag,) if tag is not None else ())


def _require_mean(pooled: PooledDraws):
    if pooled.likelihood.kind is LikelihoodKind.ORDINAL:
        raise ConfigError("ordinal fits have category probabilities; use category_prob_curve")


def expected_curve(pooled: PooledDraws, grid: DoseGrid, label: str = "") -> CurveSummary:
    """Expected response (link-inverted) per realization at each grid dose."""
    _require_mean(pooled)
    return CurveSummary(CurveKind.EXPECTED, grid, pooled.expected(grid.doses), label)


def diff_from_control_curve(pooled: PooledDraws, grid: DoseGrid, label: str = "") -> CurveSummary:
    """Paired difference of each realization's mean from its control-dose mean."""
    _require_mean(pooled)
    m = pooled.expected(grid.doses)
    d = m - m[:, [grid.control_index]]
    d[:, grid.control_index] = 0.0
    return CurveSummary(CurveKind.DIFF, grid, d, label)


def individual_prediction_curve(pooled: PooledDraws, grid: DoseGrid, seed=0,
                                label: str = "") -> CurveSummary:
    """One simulated individual response per realization and dose."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    kind = pooled.likelihood.kind
    if kind is LikelihoodKind.NORMAL_SUMMARY:
        raise ConfigError("summary-level normal data have no individual-response model")
    if kind is LikelihoodKind.ORDINAL:
        p = pooled.category_probs(grid.doses)
        c = p.cumsum(axis=-1)
        u = rng.uniform(size=p.shape[:-1] + (1,))
        y = 1 + (u > c[..., :-1]).sum(axis=-1)
        return CurveSummary(CurveKind.INDIVIDUAL, grid, y.astype(float), label)
    m = pooled.expected(grid.doses)
    if kind is LikelihoodKind.NORMAL:
        sigma = pooled.nuisance("sigma")[:, None]
        y = m + sigma * rng.standard_normal(m.shape)
    elif kind is LikelihoodKind.POISSON:
        y = rng.poisson(m).astype(float)
    else:
        y = (rng.uniform(size=m.shape) < m).astype(float)
    return CurveSummary(CurveKind.INDIVIDUAL, grid, y, label)


def simultaneous_band(curve: CurveSummary, level: float = 0.95):
    """Sup-t band: mean +/- c * sd with c the ``level`` quantile of the
    per-realization maximum standardized deviation over the grid."""
    sd = curve.sd
    ok = sd > 0
    if not np.any(ok):
        return curve.mean.copy(), curve.mean.copy()
    t = np.abs(curve.realizations[:, ok] - curve.mean[ok]) / sd[ok]
    c = float(np.quantile(t.max(axis=1), level))
    return curve.mean - c * sd, curve.mean + c * sd


# --- acceptable ranges -------------------------------------------------------

@dataclass(frozen=True)
class EfficacyMin:
    threshold: float
    quantile: float | None = 0.025

    def describe(self) -> str:
        stat = "mean" if self.quantile is None else f"q{self.quantile:g}"
        return f"{stat} >= {self.threshold:g}"


@dataclass(frozen=True)
class ToxicityMax:
    threshold: float
    quantile: float | None = 0.975

    def describe(self) -> str:
        stat = "mean" if self.quantile is None else f"q{self.quantile:g}"
        return f"{stat} <= {self.threshold:g}"


@dataclass(frozen=True)
class DoseInterval:
    """A closed range of grid doses, or the empty set.

    Equality ignores the description and the multimodality flag.
    """

    lo: float | None
    hi: float | None
    criterion: str = field(default="", compare=False)
    multimodal: bool = field(default=False, compare=False)

    def __post_init__(self):
        if (self.lo is None) != (self.hi is None):
            raise ConfigError("interval endpoints must both be set or both be None")
        if self.lo is not None and self.lo > self.hi:
            raise ConfigError(f"interval lower end {self.lo} exceeds upper end {self.hi}")

    @classmethod
    def empty_set(cls, criterion: str = "") -> "DoseInterval":
        return cls(None, None, criterion)

    @property
    def empty(self) -> bool:
        return self.lo is None

    @property
    def midpoint(self) -> float:
        return math.nan if self.empty else 0.5 * (self.lo + self.hi)

    def __contains__(self, dose) -> bool:
        return not self.empty and self.lo <= dose <= self.hi

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "empty": self.empty,
                "criterion": self.criterion, "multimodal": self.multimodal}

    @classmethod
    def from_dict(cls, d) -> "DoseInterval":
        if d.get("empty"):
            return cls.empty_set(d.get("criterion", ""))
        return cls(d["lo"], d["hi"], d.get("criterion", ""), d.get("multimodal", False))


def _first_block(ok: np.ndarray, start: int | None = None):
    """Index range of the first run of True (from ``start`` if given)."""
    idx = np.flatnonzero(ok)
    if start is not None:
        if not ok[start]:
            return None, bool(idx.size)
        i0 = start
    else:
        if idx.size == 0:
            return None, False
        i0 = int(idx[0])
    i1 = i0
    while i1 + 1 < len(ok) and ok[i1 + 1]:
        i1 += 1
    rest = np.any(ok[i1 + 1:]) or (start is not None and np.any(ok[:i0]))
    return (i0, i1), bool(rest)


def acceptable_range(curve: CurveSummary, mode) -> DoseInterval:
    """Doses meeting an efficacy floor or a toxicity ceiling.

    ``EfficacyMin`` returns the first contiguous run of grid doses whose
    statistic is at least the threshold (its lower end is the MED).
    ``ToxicityMax`` returns the run starting at the control dose whose
    statistic stays at or below the threshold (its upper end is the MTD).
    Further qualifying doses outside the run set ``multimodal``.
    """
    if curve.kind not in (CurveKind.DIFF, CurveKind.EXPECTED, CurveKind.CATEGORY,
                          CurveKind.DISTANCE):
        raise ConfigError(f"acceptable ranges need an expected or difference curve, not {curve.kind.value}")
    if len(curve.doses) == 0:
        raise ConfigError("empty grid")
    s = curve.stat(mode.quantile)
    desc = f"{curve.label or curve.kind.value}: {mode.describe()}"
    if isinstance(mode, EfficacyMin):
        block, extra = _first_block(s >= mode.threshold - 1e-12)
    elif isinstance(mode, ToxicityMax):
        block, extra = _first_block(s <= mode.threshold + 1e-12, start=curve.grid.control_index)
    else:
        raise ConfigError(f"unknown acceptable-range mode {mode!r}")
    if block is None:
        return DoseInterval(None, None, desc, extra)
    d = curve.doses
    return DoseInterval(float(d[block[0]]), float(d[block[1]]), desc, extra)


def intersect(a: DoseInterval, b: DoseInterval) -> DoseInterval:
    desc = f"({a.criterion}) and ({b.criterion})" if a.criterion or b.criterion else ""
    if a.empty or b.empty:
        return DoseInterval.empty_set(desc)
    lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
    if lo > hi:
        return DoseInterval.empty_set(desc)
    return DoseInterval(lo, hi, desc, a.multimodal or b.multimodal)


# --- joint success and contours ----------------------------------------------

@dataclass(frozen=True, eq=False)
class SuccessTable:
    doses: np.ndarray
    p_eff: np.ndarray
    p_tox: np.ndarray
    success: np.ndarray
    min_prob: float

    def region(self) -> DoseInterval:
        """Span of the first contiguous run of successful doses."""
        block, extra = _first_block(self.success)
        desc = f"P(eff) >= {self.min_prob:g} and P(tox) >= {self.min_prob:g}"
        if block is None:
            return DoseInterval(None, None, desc, extra)
        return DoseInterval(float(self.doses[block[0]]), float(self.doses[block[1]]), desc, extra)

    def rows(self):
        for d, e, t, s in zip(self.doses, self.p_eff, self.p_tox, self.success):
            yield float(d), float(e), float(t), int(s)


def success_probability(eff: PooledDraws, tox: PooledDraws, grid: DoseGrid,
                        eff_threshold: float, risk_threshold: float,
                        min_prob: float = 0.7) -> SuccessTable:
    """Per-dose probability that the efficacy gain over control exceeds
    ``eff_threshold`` and that the risk increase stays below
    ``risk_threshold``; success where both reach ``min_prob``."""
    de = diff_from_control_curve(eff, grid).realizations
    dt = diff_from_control_curve(tox, grid).realizations
    p_eff = (de > eff_threshold).mean(axis=0)
    p_tox = (dt < risk_threshold).mean(axis=0)
    ok = (p_eff >= min_prob) & (p_tox >= min_prob)
    return SuccessTable(grid.doses.copy(), p_eff, p_tox, ok, min_prob)


@dataclass(frozen=True, eq=False)
class Contour:
    points: np.ndarray
    center: np.ndarray
    level: float
    degenerate: bool = False
    dose: float | None = None


def contour_from_samples(x, y, level: float = 0.95, n_points: int = 128) -> Contour:
    """Normal-theory ellipse covering ``level`` of the (x, y) samples."""
    xy = np.column_stack([np.asarray(x, float), np.asarray(y, float)])
    center = xy.mean(axis=0)
    cov = np.cov(xy, rowvar=False) if len(xy) > 1 else np.zeros((2, 2))
    lam, vec = np.linalg.eigh(cov)
    lam = np.clip(lam, 0.0, None)
    if lam.max() <= 0:
        return Contour(center[None, :], center, level, True)
    degenerate = bool(lam.min() <= 1e-12 * lam.max())
    r = math.sqrt(stats.chi2.ppf(level, 2))
    t = np.linspace(0.0, 2.0 * np.pi, n_points, endpoint=False)
    circle = np.column_stack([np.cos(t), np.sin(t)]) * np.sqrt(lam)
    return Contour(center + r * circle @ vec.T, center, level, degenerate)


def joint_contour(eff: PooledDraws, tox: PooledDraws, dose: float, level: float = 0.95,
                  control: float | None = 0.0, n_points: int = 128) -> Contour:
    """Ellipse for the paired (efficacy, toxicity) expected responses at ``dose``.

    Efficacy is taken as the difference from ``control`` unless ``control``
    is None.  Realizations are paired by index; the two outcomes are fit
    separately, so the pairing assumes posterior independence.
    """
    e = eff.expected([dose])[:, 0]
    if control is not None:
        e = e - eff.expected([control])[:, 0]
    t = tox.expected([dose])[:, 0]
    n = min(len(e), len(t))
    c = contour_from_samples(e[:n], t[:n], level, n_points)
    return Contour(c.points, c.center, c.level, c.degenerate, float(dose))


# --- subgroup analysis ------------------------------------------------------

def conditional_subset(data: PairedDataset, likelihood: Likelihood | None = None,
                       min_doses: int = 3) -> Dataset:
    """Efficacy data restricted to subjects with an adverse event."""
    mask = data.y_tox == 1
    if not np.any(mask):
        raise DataError("no subjects with an adverse event (y_tox == 1)")
    sub = data.subset(mask).efficacy(likelihood or Likelihood(LikelihoodKind.NORMAL),
                                     name="efficacy_given_event")
    n = len(sub.doses)
    if n < min_doses:
        raise IdentifiabilityError(
            f"only {n} distinct doses among subjects with an event; need at least {min_doses}")
    return sub
