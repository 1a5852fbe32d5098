"""Associated efficacy/toxicity data from a copula and two marginals.

Uniform pairs from :func:`~doseforge.copulas.sample_copula` are pushed
through the inverse CDFs of dose-dependent marginal distributions, one dose
at a time, so the association does not depend on dose.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .copulas import CopulaFamily, CopulaSpec, UVSample, sample_copula
from .data import PairedDataset
from .errors import ConfigError, DegenerateRateError
from .models import DoseResponseShape, Link, ShapeKind, apply_inverse_link


class MarginalKind(str, enum.Enum):
    NORMAL = "normal"
    BERNOULLI = "bernoulli"
    BETA_SEVERITY = "beta_severity"


@dataclass(frozen=True)
class MarginalSpec:
    """Dose-dependent marginal distribution of one outcome.

    ``NORMAL`` has mean ``shape(dose; params)`` and SD ``sigma``.
    ``BERNOULLI`` has rate ``invlink(shape(dose; params))``.
    ``BETA_SEVERITY`` has the same rate ``p`` under a logit link and yields
    both a Bernoulli indicator and a severity from Beta(1, (1 - p) / p),
    driven by the same uniform.
    """

    kind: MarginalKind
    shape: DoseResponseShape
    params: tuple[float, ...]
    sigma: float | None = None
    link: Link = Link.LOGIT

    def __post_init__(self):
        object.__setattr__(self, "kind", MarginalKind(self.kind))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "link", Link(self.link))
        if len(self.params) != len(self.shape.param_names):
            raise ConfigError(
                f"{self.shape.kind.value} shape takes {len(self.shape.param_names)} parameters, "
                f"got {len(self.params)}")
        if self.kind is MarginalKind.NORMAL and not (self.sigma is not None and self.sigma > 0):
            raise ConfigError("normal marginal needs sigma > 0")
        if self.kind is MarginalKind.BETA_SEVERITY and self.link is not Link.LOGIT:
            raise ConfigError("beta-severity marginal uses the logit link")
        if self.kind is not MarginalKind.NORMAL and self.link not in (Link.LOGIT, Link.PROBIT):
            raise ConfigError(f"binary marginal needs logit or probit link, got {self.link.value}")

    def location(self, dose):
        """Mean (normal) or event rate (binary) at ``dose``."""
        eta = self.shape.mean(np.asarray(self.params), np.atleast_1d(dose))
        if self.kind is MarginalKind.NORMAL:
            return eta
        return apply_inverse_link(self.link, eta)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "shape": self.shape.to_dict(), "params": list(self.params)}
        if self.sigma is not None:
            d["sigma"] = self.sigma
        if self.kind is not MarginalKind.NORMAL:
            d["link"] = self.link.value
        return d

    @classmethod
    def from_dict(cls, d) -> "MarginalSpec":
        try:
            return cls(MarginalKind(d["kind"]), DoseResponseShape.from_dict(d["shape"]),
                       tuple(d["params"]), d.get("sigma"), Link(d.get("link", "logit")))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad marginal specification {d!r}: {exc}") from exc


def _raw_rate(m: MarginalSpec, dose: float) -> float:
    eta = float(m.shape.mean(np.asarray(m.params), np.atleast_1d(dose))[0])
    return float(special.expit(eta) if m.link is Link.LOGIT else special.ndtr(eta))


def _transform(m: MarginalSpec, w: np.ndarray, dose: float):
    if m.kind is MarginalKind.NORMAL:
        mu = float(m.location(dose)[0])
        return m.sigma * special.ndtri(w) + mu, None
    if m.kind is MarginalKind.BETA_SEVERITY:
        p_raw = _raw_rate(m, dose)
        if p_raw <= 0.0 or p_raw >= 1.0:
            raise DegenerateRateError(f"severity rate is {p_raw} at dose {dose}; Beta(1, (1-p)/p) undefined")
    p = float(m.location(dose)[0])
    y = (w > 1.0 - p).astype(float)
    if m.kind is MarginalKind.BERNOULLI:
        return y, None
    # Beta(1, b) quantile: 1 - (1 - w)**(1/b), b = (1 - p) / p
    severity = -np.expm1(np.log1p(-w) * p / (1.0 - p))
    return y, severity


def inverse_marginal_transform(uv: UVSample, dose: float, eff: MarginalSpec,
                               tox: MarginalSpec) -> PairedDataset:
    """Map uniform pairs to outcomes at a single dose."""
    if dose < 0:
        raise ConfigError(f"dose must be non-negative, got {dose}")
    x, _ = _transform(eff, uv.u, dose)
    y, severity = _transform(tox, uv.v, dose)
    return PairedDataset(np.full(len(uv), float(dose)), x, y, severity)


@dataclass(frozen=True)
class SimConfig:
    doses: tuple[float, ...]
    n_per_dose: int
    copula: CopulaSpec
    efficacy: MarginalSpec
    toxicity: MarginalSpec
    seed: int = 0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        doses = tuple(float(d) for d in self.doses)
        object.__setattr__(self, "doses", doses)
        if any(d < 0 for d in doses) or list(doses) != sorted(set(doses)):
            raise ConfigError("simulation doses must be distinct, non-negative and ascending")
        if int(self.n_per_dose) < 1:
            raise ConfigError("n_per_dose must be at least 1")

    def to_dict(self) -> dict:
        return {
            "doses": list(self.doses),
            "n_per_dose": self.n_per_dose,
            "copula": self.copula.to_dict(),
            "efficacy": self.efficacy.to_dict(),
            "toxicity": self.toxicity.to_dict(),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d, seed: int | None = None) -> "SimConfig":
        try:
            return cls(
                tuple(d["doses"]), int(d["n_per_dose"]), CopulaSpec.from_dict(d["copula"]),
                MarginalSpec.from_dict(d["efficacy"]), MarginalSpec.from_dict(d["toxicity"]),
                int(d.get("seed", 0) if seed is None else seed),
            )
        except KeyError as exc:
            raise ConfigError(f"simulation config lacks {exc}") from exc


def dose_seed(seed: int, dose_index: int) -> np.random.SeedSequence:
    """Per-dose seed, so doses can be generated in any order."""
    return np.random.SeedSequence([int(seed), int(dose_index)])


def generate_example_dataset(cfg: SimConfig) -> PairedDataset:
    """Simulate ``n_per_dose`` subjects at every dose of ``cfg``."""
    parts = []
    for i, d in enumerate(cfg.doses):
        rng = np.random.default_rng(dose_seed(cfg.seed, i))
        uv = sample_copula(cfg.copula, cfg.n_per_dose, rng)
        parts.append(inverse_marginal_transform(uv, d, cfg.efficacy, cfg.toxicity))
    sev = None
    if parts[0].severity is not None:
        sev = np.concatenate([p.severity for p in parts])
    return PairedDataset(
        np.concatenate([p.dose for p in parts]),
        np.concatenate([p.y_eff for p in parts]),
        np.concatenate([p.y_tox for p in parts]),
        sev,
    )


# --- the four worked examples --------------------------------------------

EXAMPLE1_COPULAS = (
    CopulaSpec(CopulaFamily.GAUSSIAN, 0.0),
    CopulaSpec(CopulaFamily.GAUSSIAN, 0.8),
    CopulaSpec(CopulaFamily.CLAYTON, 6.0),
    CopulaSpec(CopulaFamily.JOE, 6.0),
)


def example1_config(copula: CopulaSpec = EXAMPLE1_COPULAS[0], seed: int = 0) -> SimConfig:
    """Antihypertensive example: sigmoid-Emax DBP reduction, exponential-logit AE rate."""
    eff = MarginalSpec(MarginalKind.NORMAL, DoseResponseShape(ShapeKind.SIGMOID_EMAX),
                       (4.0, 15.0, 0.33, 2.8), sigma=2.0)
    tox = MarginalSpec(MarginalKind.BETA_SEVERITY, DoseResponseShape(ShapeKind.EXPONENTIAL),
                       (-10.0, 5.0, 0.7), link=Link.LOGIT)
    return SimConfig((0.0, 0.2, 0.4, 0.6, 0.8, 1.0), 50, copula, eff, tox, seed,
                     label=f"example1_{copula.label}")


def example2_config(rho: float = 0.0, seed: int = 0) -> SimConfig:
    """Emax efficacy with SD 100, probit-linear toxicity."""
    eff = MarginalSpec(MarginalKind.NORMAL, DoseResponseShape(ShapeKind.EMAX),
                       (-150.0, 150.0, 0.5), sigma=100.0)
    tox = MarginalSpec(MarginalKind.BERNOULLI, DoseResponseShape(ShapeKind.LINEAR),
                       (-1.28, 0.26), link=Link.PROBIT)
    cop = CopulaSpec(CopulaFamily.GAUSSIAN, rho)
    return SimConfig((0.0, 0.3, 0.7, 1.0, 4.0, 6.0), 50, cop, eff, tox, seed,
                     label=f"example2_{cop.label}")


def example3_config(rho: float = 0.0, seed: int = 0) -> SimConfig:
    """Bivariate normal outcomes: Emax efficacy, exponential safety."""
    eff = MarginalSpec(MarginalKind.NORMAL, DoseResponseShape(ShapeKind.EMAX),
                       (1.4, 14.5, 0.2), sigma=7.0)
    tox = MarginalSpec(MarginalKind.NORMAL, DoseResponseShape(ShapeKind.EXPONENTIAL),
                       (0.163, 0.037, 5.912), sigma=8.0)
    cop = CopulaSpec(CopulaFamily.GAUSSIAN, rho)
    return SimConfig((0.05, 0.2, 0.4, 0.6, 0.8, 1.0), 50, cop, eff, tox, seed,
                     label=f"example3_{cop.label}")
