"""Declarative fit-and-select workflow.

A pipeline config names the input (simulated or CSV), the likelihood of
each outcome, the MCMC settings, the dose grid and the selection rules.
:func:`run_pipeline` fits every candidate model per outcome, forms WAIC
weights, pools the draws and writes curves, intervals and tables.  All
randomness derives from the config seed, so reruns are byte-identical.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .averaging import ModelWeightSet, PooledDraws, compute_weights, pool_draws, waic
from .categorical import (
    NAMED_SETS,
    CategoryRule,
    Metric,
    categorize,
    category_prob_curve,
    default_rule,
    distance_curve,
)
from .data import Dataset, PairedDataset, ingest_csv
from .errors import ConfigError, ConvergenceError, DataError
from .inference import McmcConfig, PosteriorDraws, run_mcmc
from .models import Likelihood, LikelihoodKind, ModelSpec, default_candidate_set
from .output import Provenance, config_hash, read_csv_table, svg_curves, write_csv, write_json
from .selection import (
    CurveSummary,
    DoseGrid,
    EfficacyMin,
    ToxicityMax,
    acceptable_range,
    conditional_subset,
    diff_from_control_curve,
    expected_curve,
    individual_prediction_curve,
    intersect,
    joint_contour,
    simultaneous_band,
    success_probability,
)
from .simulation import SimConfig, generate_example_dataset

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CONDITIONAL = "efficacy_given_event"


def _seed(*parts) -> int:
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


# --- configuration ------------------------------------------------------------

@dataclass(frozen=True)
class CriterionSpec:
    """One acceptable-range rule applied to an outcome's curve."""

    outcome: str
    kind: str  # "efficacy" (floor) or "toxicity" (ceiling)
    threshold: float
    quantile: float | None
    curve: str = "diff"  # "diff" or "expected"

    def __post_init__(self):
        if self.kind not in ("efficacy", "toxicity"):
            raise ConfigError(f"criterion kind must be 'efficacy' or 'toxicity', got {self.kind!r}")
        if self.curve not in ("diff", "expected"):
            raise ConfigError(f"criterion curve must be 'diff' or 'expected', got {self.curve!r}")
        if not np.isfinite(self.threshold):
            raise ConfigError("thresholds must be finite")

    def mode(self, quantile="default"):
        q = self.quantile if quantile == "default" else quantile
        return EfficacyMin(self.threshold, q) if self.kind == "efficacy" else ToxicityMax(self.threshold, q)

    def to_dict(self) -> dict:
        return {"outcome": self.outcome, "threshold": self.threshold,
                "quantile": self.quantile, "curve": self.curve}


@dataclass(frozen=True)
class SuccessSpec:
    efficacy: str
    toxicity: str
    eff_threshold: float
    risk_threshold: float
    min_prob: float = 0.7

    def to_dict(self) -> dict:
        return {"efficacy": self.efficacy, "toxicity": self.toxicity,
                "eff_threshold": self.eff_threshold, "risk_threshold": self.risk_threshold,
                "min_prob": self.min_prob}


@dataclass(frozen=True)
class PipelineConfig:
    """Parsed form of the JSON config (``"schema": 1``).

    ``input`` holds exactly one of ``simulate`` (a simulation config),
    ``csv`` (per-subject ``dose,y_eff,y_tox[,severity]`` file) or
    ``tables`` (one summary CSV per outcome).
    """

    input: dict
    likelihoods: dict
    mcmc: McmcConfig = McmcConfig()
    grid: DoseGrid | None = None
    criteria: tuple[CriterionSpec, ...] = ()
    success: SuccessSpec | None = None
    strategy: str = "marginal"
    rule: CategoryRule | None = None
    shapes: tuple | None = None
    pooled_draws: int = 4000
    exclude_doses: tuple[float, ...] = ()
    contour_doses: tuple[float, ...] = ()
    contour_levels: tuple[float, ...] = (0.95,)
    contour_control: float | None = 0.0
    table_doses: tuple[float, ...] | None = None
    conditional: bool = False
    max_rhat: float = 1.1
    save_draws: bool = True
    svg: bool = False
    seed: int = 0
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        sources = [k for k in ("simulate", "csv", "tables") if k in self.input]
        if len(sources) != 1:
            raise ConfigError(f"input must name exactly one of simulate/csv/tables, got {sources or 'none'}")
        if self.strategy not in ("marginal", "categorical"):
            raise ConfigError(f"strategy must be 'marginal' or 'categorical', got {self.strategy!r}")
        if self.pooled_draws < 1:
            raise ConfigError("pooled_draws must be positive")
        if not self.max_rhat > 1.0:
            raise ConfigError("max_rhat must exceed 1")

    @property
    def source(self) -> str:
        return next(k for k in ("simulate", "csv", "tables") if k in self.input)

    @classmethod
    def from_dict(cls, d: dict, seed: int | None = None) -> "PipelineConfig":
        if d.get("schema") != SCHEMA_VERSION:
            raise ConfigError(f"config schema must be {SCHEMA_VERSION}, got {d.get('schema')!r}")
        d = json.loads(json.dumps(d))
        if seed is not None:
            d["seed"] = int(seed)
        try:
            liks = {k: Likelihood.from_dict(v) for k, v in d.get("likelihoods", {}).items()}
            sel = d.get("selection", {})
            crit = tuple(
                CriterionSpec(c.get("outcome", name), name if name in ("efficacy", "toxicity") else c["kind"],
                              float(c["threshold"]), c.get("quantile", 0.025 if name == "efficacy" else 0.975),
                              c.get("curve", "diff"))
                for name, c in sel.items() if name != "success"
            )
            succ = None
            if "success" in sel:
                s = sel["success"]
                succ = SuccessSpec(s.get("efficacy", "efficacy"), s.get("toxicity", "toxicity"),
                                   float(s["eff_threshold"]), float(s["risk_threshold"]),
                                   float(s.get("min_prob", 0.7)))
            strategy = d.get("strategy", "marginal")
            rule = None
            if isinstance(strategy, dict):
                if "categorical" not in strategy:
                    raise ConfigError(f"unknown strategy {strategy!r}")
                rule_d = strategy["categorical"] or {}
                rule = CategoryRule.from_dict(rule_d) if rule_d else default_rule()
                strategy = "categorical"
            elif strategy == "categorical":
                rule = default_rule()
            cont = d.get("contours", {})
            return cls(
                input=d["input"],
                likelihoods=liks,
                mcmc=McmcConfig.from_dict({**d.get("mcmc", {}), "seed": d.get("seed", 0)}),
                grid=DoseGrid.from_dict(d["grid"]) if "grid" in d else None,
                criteria=crit,
                success=succ,
                strategy=strategy,
                rule=rule,
                shapes=tuple(d["shapes"]) if d.get("shapes") else None,
                pooled_draws=int(d.get("pooled_draws", 4000)),
                exclude_doses=tuple(float(x) for x in d.get("exclude_doses", ())),
                contour_doses=tuple(float(x) for x in cont.get("doses", ())),
                contour_levels=tuple(float(x) for x in cont.get("levels", (0.95,))),
                contour_control=cont.get("control", 0.0),
                table_doses=tuple(d["table_doses"]) if d.get("table_doses") else None,
                conditional=bool(d.get("conditional", False)),
                max_rhat=float(d.get("max_rhat", 1.1)),
                save_draws=bool(d.get("save_draws", True)),
                svg=bool(d.get("svg", False)),
                seed=int(d.get("seed", 0)),
                raw=d,
            )
        except KeyError as exc:
            raise ConfigError(f"config lacks required key {exc}") from exc
        except TypeError as exc:
            raise ConfigError(f"malformed config: {exc}") from exc

    def to_dict(self) -> dict:
        return self.raw

    @property
    def hash(self) -> str:
        return config_hash(self.raw)

    def provenance(self) -> Provenance:
        return Provenance(self.hash, self.seed)


def load_config(path, seed: int | None = None) -> PipelineConfig:
    try:
        d = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    base = Path(path).parent
    inp = d.get("input", {})
    # relative CSV paths are taken relative to the config file
    if "csv" in inp and not Path(inp["csv"]).is_absolute():
        inp["csv"] = str(base / inp["csv"])
    for t in inp.get("tables", {}).values():
        if not Path(t["path"]).is_absolute():
            t["path"] = str(base / t["path"])
    return PipelineConfig.from_dict(d, seed)


# --- data preparation ---------------------------------------------------------

_DEFAULT_LIKS = {
    "efficacy": Likelihood(LikelihoodKind.NORMAL),
    "toxicity": Likelihood(LikelihoodKind.BERNOULLI),
}


def simulation_config(cfg: PipelineConfig) -> SimConfig:
    sim = dict(cfg.input["simulate"])
    sim.setdefault("seed", cfg.seed)
    return SimConfig.from_dict(sim)


def load_inputs(cfg: PipelineConfig):
    """Return ``(datasets by outcome, paired data or None)``."""
    paired = None
    if cfg.source == "simulate":
        paired = generate_example_dataset(simulation_config(cfg))
    elif cfg.source == "csv":
        paired = ingest_csv(cfg.input["csv"], "individual")
    if paired is not None:
        if cfg.exclude_doses:
            paired = paired.subset(~np.isin(paired.dose, cfg.exclude_doses))
        out = {}
        if cfg.strategy == "categorical":
            out["categories"] = categorize(paired, cfg.rule)
        else:
            liks = {**_DEFAULT_LIKS, **cfg.likelihoods}
            out["efficacy"] = paired.efficacy(liks["efficacy"])
            out["toxicity"] = paired.toxicity(liks["toxicity"])
            if cfg.conditional:
                out[CONDITIONAL] = conditional_subset(paired, liks["efficacy"])
        return out, paired
    out = {}
    for name, t in cfg.input["tables"].items():
        lik = cfg.likelihoods.get(name)
        ds = ingest_csv(t["path"], t["schema"], likelihood=lik)
        if cfg.exclude_doses:
            ds = ds.exclude_doses(cfg.exclude_doses)
        out[name] = Dataset(ds.dose, ds.response, ds.likelihood, ds.se, ds.trials, name)
    return out, None


def write_dataset(path, data, prov: Provenance):
    if isinstance(data, PairedDataset):
        return write_csv(path, data.header(), data.rows(), prov)
    cols = [("dose", data.dose), ("response", data.response)]
    if data.se is not None:
        cols.append(("se", data.se))
    if data.trials is not None:
        cols.append(("n", data.trials))
    return write_csv(path, [c for c, _ in cols], zip(*[v for _, v in cols]), prov)


# --- fitting ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OutcomeFit:
    name: str
    data: Dataset
    draws: tuple[PosteriorDraws, ...]
    weights: ModelWeightSet
    pooled: PooledDraws

    def summary(self) -> dict:
        return {
            "weights": self.weights.to_dict(),
            "models": [
                {"id": d.spec.name, "spec": d.spec.to_dict(),
                 "max_rhat": d.max_rhat, "diagnostics": d.diagnostics}
                for d in self.draws
            ],
            "pooled_counts": dict(zip(self.weights.ids, map(int, self.pooled.counts()))),
        }


@dataclass(frozen=True, eq=False)
class FitResult:
    config: PipelineConfig
    outcomes: dict
    paired: PairedDataset | None = None

    @property
    def provenance(self) -> Provenance:
        return self.config.provenance()

    def __getitem__(self, name) -> OutcomeFit:
        return self.outcomes[name]

    def save(self, out_dir) -> None:
        out = Path(out_dir)
        prov = self.provenance
        summary = {"config": self.config.to_dict(), "outcomes": {}}
        for name, of in self.outcomes.items():
            write_dataset(out / "data" / f"{name}.csv", of.data, prov)
            write_json(out / f"weights_{name}.json", of.weights.to_dict(), prov)
            summary["outcomes"][name] = of.summary()
            if self.config.save_draws:
                for d in of.draws:
                    save_draws(out / "draws" / name / f"{d.spec.name}.csv", d, prov)
        if self.paired is not None:
            write_dataset(out / "data" / "paired.csv", self.paired, prov)
        write_json(out / "fit_result.json", summary, prov)

    @classmethod
    def load(cls, out_dir) -> "FitResult":
        """Rebuild a saved fit (draws must have been saved)."""
        out = Path(out_dir)
        meta = json.loads((out / "fit_result.json").read_text())
        cfg = PipelineConfig.from_dict(meta["config"])
        if meta["provenance"]["config_sha256"] != cfg.hash:
            raise ConfigError("stored config does not match its recorded hash")
        outcomes = {}
        for i, (name, o) in enumerate(meta["outcomes"].items()):
            data = _load_dataset(out / "data" / f"{name}.csv", o["models"][0]["spec"]["likelihood"])
            draws = []
            for m in o["models"]:
                path = out / "draws" / name / f"{m['id']}.csv"
                if not path.exists():
                    raise DataError(f"{path} missing; refit with save_draws enabled")
                draws.append(load_draws(path, ModelSpec.from_dict(m["spec"]), m["diagnostics"]))
            ws = ModelWeightSet.from_dict(o["weights"])
            pooled = pool_draws(draws, ws, cfg.pooled_draws, _seed(cfg.seed, i, 999))
            outcomes[name] = OutcomeFit(name, data, tuple(draws), ws, pooled)
        paired = None
        if (out / "data" / "paired.csv").exists():
            h, body = read_csv_table(out / "data" / "paired.csv")
            paired = PairedDataset(*[body[:, j] for j in range(len(h))])
        return cls(cfg, outcomes, paired)


def _load_dataset(path, lik_d) -> Dataset:
    lik = Likelihood.from_dict(lik_d)
    h, body = read_csv_table(path)
    col = dict(zip(h, body.T))
    return Dataset(col["dose"], col["response"], lik, col.get("se"), col.get("n"), Path(path).stem)


def save_draws(path, d: PosteriorDraws, prov: Provenance):
    C, S, P = d.draws.shape
    rows = ((c, s, *d.draws[c, s]) for c in range(C) for s in range(S))
    write_csv(path, ("chain", "iter") + tuple(d.param_names), rows, prov, digits=17)
    write_json(Path(path).with_suffix(".diagnostics.json"), d.diagnostics, prov)


def load_draws(path, spec: ModelSpec, diagnostics=None) -> PosteriorDraws:
    h, body = read_csv_table(path)
    C = int(body[:, 0].max()) + 1
    arr = body[:, 2:].reshape(C, -1, len(h) - 2)
    return PosteriorDraws(tuple(h[2:]), arr, spec, diagnostics or {})


def fit_outcome(name: str, data: Dataset, mcmc: McmcConfig, n_pooled: int, seed: int,
                index: int = 0, shapes=None) -> OutcomeFit:
    """Fit all candidate shapes to one outcome and pool by WAIC weight."""
    specs = default_candidate_set(data.likelihood, data, shapes)
    draws = []
    for j, spec in enumerate(specs):
        cfg_j = McmcConfig(mcmc.chains, mcmc.warmup, mcmc.post_warmup, mcmc.thin,
                           _seed(seed, index, j), mcmc.target_accept)
        log.info("fitting %s / %s", name, spec.name)
        draws.append(run_mcmc(spec, data, cfg_j))
    ws = compute_weights([waic(d, data) for d in draws], [s.name for s in specs])
    pooled = pool_draws(draws, ws, n_pooled, _seed(seed, index, 999))
    return OutcomeFit(name, data, tuple(draws), ws, pooled)


def fit_all(cfg: PipelineConfig) -> FitResult:
    datasets, paired = load_inputs(cfg)
    outcomes = {}
    offenders = []
    for i, (name, data) in enumerate(datasets.items()):
        shapes = cfg.shapes if cfg.shapes else None
        of = fit_outcome(name, data, cfg.mcmc, cfg.pooled_draws, cfg.seed, i, shapes)
        outcomes[name] = of
        offenders += [(name, d.spec.name, d.max_rhat) for d in of.draws if not d.max_rhat <= cfg.max_rhat]
    result = FitResult(cfg, outcomes, paired)
    if offenders:
        msg = ", ".join(f"{o}/{m} (R-hat {r:.3f})" for o, m, r in offenders)
        err = ConvergenceError(f"R-hat above {cfg.max_rhat} for: {msg}", offenders)
        err.result = result
        raise err
    return result


# --- reporting ------------------------------------------------------------------

def _grid_for(cfg: PipelineConfig, fit: FitResult) -> DoseGrid:
    if cfg.grid is not None:
        return cfg.grid
    first = next(iter(fit.outcomes.values())).data
    return DoseGrid.spanning(first, 51, float(first.dose.min()))


def _write_curve(path, curve: CurveSummary, prov):
    write_csv(path, curve.header(), curve.csv_rows(), prov)


def _table_doses(cfg, grid):
    return grid.doses if cfg.table_doses is None else np.asarray(cfg.table_doses, dtype=float)


def marginal_report(fit: FitResult, out_dir) -> dict:
    """Curves, acceptable ranges, success table and contours."""
    cfg = fit.config
    out = Path(out_dir)
    prov = fit.provenance
    grid = _grid_for(cfg, fit)
    curves = {}
    for i, (name, of) in enumerate(fit.outcomes.items()):
        if of.data.likelihood.kind is LikelihoodKind.ORDINAL:
            continue
        c_exp = expected_curve(of.pooled, grid, name)
        c_diff = diff_from_control_curve(of.pooled, grid, name)
        curves[name] = {"expected": c_exp, "diff": c_diff}
        _write_curve(out / "curves" / f"{name}_expected.csv", c_exp, prov)
        _write_curve(out / "curves" / f"{name}_diff.csv", c_diff, prov)
        if of.data.likelihood.kind is not LikelihoodKind.NORMAL_SUMMARY:
            c_ind = individual_prediction_curve(of.pooled, grid, _seed(cfg.seed, i, 555), name)
            _write_curve(out / "curves" / f"{name}_individual.csv", c_ind, prov)
        if cfg.svg:
            for kind, c in curves[name].items():
                lo, hi = simultaneous_band(c)
                svg_curves(out / "svg" / f"{name}_{kind}.svg",
                           [(f"{name} mean", c.doses, c.mean, c.quantiles[0], c.quantiles[-1]),
                            ("sup-t band lo", c.doses, lo, None, None),
                            ("sup-t band hi", c.doses, hi, None, None)],
                           title=f"{name} ({kind})", prov=prov)

    report = {"grid": grid.to_dict(), "intervals": {}, "weights": {}}
    for name, of in fit.outcomes.items():
        report["weights"][name] = of.weights.to_dict()

    # acceptable ranges, by the stated bound and by the posterior mean
    ranges = {"bound": [], "mean": []}
    for crit in cfg.criteria:
        if crit.outcome not in curves:
            raise ConfigError(f"criterion refers to unknown outcome {crit.outcome!r}")
        curve = curves[crit.outcome][crit.curve]
        for label, q in (("bound", "default"), ("mean", None)):
            iv = acceptable_range(curve, crit.mode(q))
            report["intervals"][f"{crit.outcome}_{label}"] = iv.to_dict()
            ranges[label].append(iv)
    for label, ivs in ranges.items():
        if len(ivs) >= 2:
            joint = ivs[0]
            for iv in ivs[1:]:
                joint = intersect(joint, iv)
            report["intervals"][f"joint_{label}"] = joint.to_dict()

    if cfg.criteria:
        doses = _table_doses(cfg, grid)
        header = ["dose"]
        cols = []
        for crit in cfg.criteria:
            curve = curves[crit.outcome][crit.curve]
            q = crit.quantile
            header.append(f"{crit.outcome}_{crit.curve}_{'mean' if q is None else f'q{q:g}'}")
            cols.append(curve.stat(q))
        idx = [grid.index(d) for d in doses]
        write_csv(out / "bounds_table.csv", header,
                  ((grid.doses[i], *(c[i] for c in cols)) for i in idx), prov)

    if cfg.success is not None:
        s = cfg.success
        tab = success_probability(fit[s.efficacy].pooled, fit[s.toxicity].pooled, grid,
                                  s.eff_threshold, s.risk_threshold, s.min_prob)
        write_csv(out / "success.csv", ("dose", "p_eff", "p_tox", "success"), tab.rows(), prov)
        report["success"] = {"criterion": s.to_dict(), "region": tab.region().to_dict(),
                             "any_success": bool(tab.success.any())}

    if cfg.contour_doses and "efficacy" in fit.outcomes and "toxicity" in fit.outcomes:
        report["contours"] = []
        for level in cfg.contour_levels:
            for dose in cfg.contour_doses:
                c = joint_contour(fit["efficacy"].pooled, fit["toxicity"].pooled, dose, level,
                                  cfg.contour_control)
                fname = f"contour_d{dose:g}_l{level:g}.csv"
                write_csv(out / "contours" / fname, ("efficacy", "toxicity"), c.points, prov)
                report["contours"].append({"dose": dose, "level": level, "file": fname,
                                           "center": c.center.tolist(), "degenerate": c.degenerate})

    if CONDITIONAL in fit.outcomes:
        report["conditional"] = {"outcome": CONDITIONAL,
                                 "n": len(fit[CONDITIONAL].data),
                                 "doses": fit[CONDITIONAL].data.doses.tolist()}
    write_json(out / "report.json", report, prov)
    report["curves"] = curves
    return report


def categorical_report(fit: FitResult, out_dir) -> dict:
    """Category-probability curves, Table-3-style intervals and distances."""
    cfg = fit.config
    out = Path(out_dir)
    prov = fit.provenance
    grid = _grid_for(cfg, fit)
    of = fit["categories"]
    curves = {}
    for label, cs in NAMED_SETS.items():
        if max(cs) > of.data.likelihood.n_categories:
            continue
        c = category_prob_curve(of.pooled, grid, cs, label)
        curves[label] = c
        _write_curve(out / "curves" / f"category_{label.replace('+', '_')}.csv", c, prov)
    dists = {}
    for m in Metric:
        d = distance_curve(of.pooled, grid, m)
        dists[m.value] = d
        _write_curve(out / f"distance_{m.value}.csv", d, prov)
    doses = _table_doses(cfg, grid)
    idx = [grid.index(x) for x in doses]
    header = ["dose"]
    cols = []
    for label, c in curves.items():
        header += [f"{label}_lb", f"{label}_ub"]
        cols += [c.stat(0.025), c.stat(0.975)]
    write_csv(out / "category_table.csv", header,
              ((grid.doses[i], *(c[i] for c in cols)) for i in idx), prov)
    if cfg.svg:
        svg_curves(out / "svg" / "categories.svg",
                   [(k, c.doses, c.mean, c.quantiles[0], c.quantiles[-1]) for k, c in curves.items()],
                   title="category probabilities", prov=prov)
        svg_curves(out / "svg" / "distances.svg",
                   [(k, c.doses, c.mean, c.quantiles[0], c.quantiles[-1]) for k, c in dists.items()],
                   title="distance from control", prov=prov)
    report = {
        "grid": grid.to_dict(),
        "rule": (cfg.rule or default_rule()).to_dict(),
        "weights": of.weights.to_dict(),
        "distance_argmax": {k: float(grid.doses[int(np.argmax(c.mean))]) for k, c in dists.items()},
    }
    write_json(out / "report.json", report, prov)
    report["curves"] = curves
    report["distances"] = dists
    return report


def run_pipeline(cfg: PipelineConfig, out_dir, stages=("fit", "report")) -> tuple[FitResult, dict]:
    """Fit (and optionally report) per ``cfg``; returns the fit and report."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        fit = fit_all(cfg)
    except ConvergenceError as exc:
        # keep the evidence on disk before failing
        exc.result.save(out)
        raise
    fit.save(out)
    report = {}
    if "report" in stages:
        if cfg.strategy == "categorical":
            report = categorical_report(fit, out)
        else:
            report = marginal_report(fit, out)
    return fit, report


def simulate_only(cfg: PipelineConfig, out_dir) -> PairedDataset:
    if cfg.source != "simulate":
        raise ConfigError("the simulate command needs an input.simulate block")
    data = generate_example_dataset(simulation_config(cfg))
    write_dataset(Path(out_dir) / "data.csv", data, cfg.provenance())
    return data


__all__ = [
    "PipelineConfig", "CriterionSpec", "SuccessSpec", "FitResult", "OutcomeFit",
    "load_config", "load_inputs", "fit_outcome", "fit_all", "run_pipeline",
    "marginal_report", "categorical_report", "simulate_only", "save_draws", "load_draws",
]
