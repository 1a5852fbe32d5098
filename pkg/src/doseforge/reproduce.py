"""One-call reruns of the four worked examples.

Each ``example_config*`` function returns a ready-to-run pipeline config
dict; :func:`reproduce_example` runs them and writes ``summary.json`` with
the headline numbers next to the per-run output directories.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ConfigError
from .output import Provenance, config_hash, write_csv, write_json
from .pipeline import CONDITIONAL, PipelineConfig, run_pipeline
from .simulation import EXAMPLE1_COPULAS, example1_config, example2_config, example3_config

# Per-arm trial summary: dose (ug), N, mean SBM change, SE, satisfactory relief, any AE
ARM_SUMMARY = (
    (0.0, 42, 1.5, 0.4, 13, 2),
    (16.0, 41, 2.3, 0.4, 13, 1),
    (32.0, 43, 3.5, 0.5, 20, 13),
    (48.0, 44, 6.8, 1.1, 31, 17),
)

EX1_TABLE_DOSES = tuple(np.round(np.arange(0.2, 0.8001, 0.02), 2).tolist())
EX1_EFFICACY_MIN = 5.0
EX1_RISK_MAX = 0.2


def _base(sim, likelihoods, grid, seed, **extra) -> dict:
    d = {"schema": 1, "input": {"simulate": sim.to_dict()}, "likelihoods": likelihoods,
         "grid": grid, "seed": seed}
    d.update(extra)
    return d


def example1_marginal(copula, seed: int = 0) -> dict:
    sim = example1_config(copula, seed)
    return _base(
        sim,
        {"efficacy": {"kind": "normal"}, "toxicity": {"kind": "bernoulli", "link": "logit"}},
        {"lo": 0.0, "hi": 1.0, "step": 0.01},
        seed,
        selection={
            "efficacy": {"threshold": EX1_EFFICACY_MIN, "quantile": 0.025, "curve": "diff"},
            "toxicity": {"threshold": EX1_RISK_MAX, "quantile": 0.975, "curve": "expected"},
        },
        contours={"doses": [0.3, 0.4, 0.5, 0.6, 0.7, 0.8], "levels": [0.95]},
        table_doses=list(EX1_TABLE_DOSES),
        conditional=True,
    )


def example1_categorical(copula, seed: int = 0) -> dict:
    sim = example1_config(copula, seed)
    return _base(sim, {}, {"lo": 0.0, "hi": 1.0, "step": 0.01}, seed,
                 strategy="categorical", table_doses=list(EX1_TABLE_DOSES))


def example2(rho: float, seed: int = 0) -> dict:
    sim = example2_config(rho, seed)
    return _base(
        sim,
        {"efficacy": {"kind": "normal"}, "toxicity": {"kind": "bernoulli", "link": "probit"}},
        {"lo": 0.0, "hi": 6.0, "step": 0.05},
        seed,
        selection={"success": {"eff_threshold": 80.0, "risk_threshold": 0.3, "min_prob": 0.7}},
        contours={"doses": [1.0, 2.0, 3.0, 4.0], "levels": [0.4, 0.95]},
    )


EX3_EFFICACY_MIN = 3.0
EX3_SAFETY_MAX = 3.0


def example3(rho: float, seed: int = 0) -> dict:
    sim = example3_config(rho, seed)
    return _base(
        sim,
        {"efficacy": {"kind": "normal"}, "toxicity": {"kind": "normal"}},
        {"lo": 0.0, "hi": 1.0, "step": 0.005},
        seed,
        selection={
            "efficacy": {"threshold": EX3_EFFICACY_MIN, "quantile": 0.025, "curve": "diff"},
            "toxicity": {"threshold": EX3_SAFETY_MAX, "quantile": 0.975, "curve": "diff"},
        },
    )


def write_arm_tables(out_dir) -> dict:
    """Write the arm summary as three CSV files; return the ``tables`` input block."""
    out = Path(out_dir)
    prov = Provenance(config_hash({"arm_summary": ARM_SUMMARY}), 0)
    write_csv(out / "sbm.csv", ("dose", "mean", "se", "n"),
              ((d, m, se, n) for d, n, m, se, _, _ in ARM_SUMMARY), prov)
    write_csv(out / "relief.csv", ("dose", "events", "n"),
              ((d, r, n) for d, n, _, _, r, _ in ARM_SUMMARY), prov)
    write_csv(out / "ae.csv", ("dose", "events", "n"),
              ((d, a, n) for d, n, _, _, _, a in ARM_SUMMARY), prov)
    return {
        "efficacy": {"path": str(out / "sbm.csv"), "schema": "summary"},
        "toxicity": {"path": str(out / "ae.csv"), "schema": "counts"},
        "relief": {"path": str(out / "relief.csv"), "schema": "counts"},
    }


def example4(table_dir, seed: int = 0) -> dict:
    return {
        "schema": 1,
        "input": {"tables": write_arm_tables(table_dir)},
        "likelihoods": {"toxicity": {"kind": "binomial", "link": "logit"},
                        "relief": {"kind": "binomial", "link": "logit"}},
        "exclude_doses": [0.0],
        "grid": {"lo": 16.0, "hi": 48.0, "step": 1.0, "control": 16.0},
        "contours": {"doses": [16.0, 24.0, 32.0, 40.0, 48.0], "levels": [0.95], "control": None},
        "seed": seed,
    }


def _max_rhat(fit) -> float:
    return max(d.max_rhat for of in fit.outcomes.values() for d in of.draws)


def _curve_at(curve, dose, key="mean"):
    return curve.at(dose)[key]


def reproduce_example(n: int, seed: int = 0, out_dir="reproduce", svg: bool = False,
                      mcmc: dict | None = None) -> dict:
    """Run worked example ``n`` (1 to 4) and return its summary."""
    out = Path(out_dir) / f"example{n}"
    extra = {"svg": svg}
    if mcmc:
        extra["mcmc"] = mcmc

    def run(d, sub):
        cfg = PipelineConfig.from_dict({**d, **extra})
        return run_pipeline(cfg, out / sub)

    summary: dict = {"example": n, "seed": seed, "runs": {}}
    if n == 1:
        for cop in EXAMPLE1_COPULAS:
            fit, rep = run(example1_marginal(cop, seed), f"{cop.label}/marginal")
            eff = rep["curves"]["efficacy"]["diff"]
            tox = rep["curves"]["toxicity"]["expected"]
            cond = fit[CONDITIONAL].pooled.expected([0.0, 0.6])
            cfit, crep = run(example1_categorical(cop, seed), f"{cop.label}/categorical")
            best = crep["curves"]["Best"]
            summary["runs"][cop.label] = {
                "eff_diff_q025_at_0.58": _curve_at(eff, 0.58, "q025"),
                "tox_q975_at_0.60": _curve_at(tox, 0.60, "q975"),
                "AR_E": rep["intervals"]["efficacy_bound"],
                "AR_S": rep["intervals"]["toxicity_bound"],
                "AR_ES": rep["intervals"]["joint_bound"],
                "conditional_diff_at_0.6": float((cond[:, 1] - cond[:, 0]).mean()),
                "best_at_0.20": [_curve_at(best, 0.2, "q025"), _curve_at(best, 0.2, "q975")],
                "distance_argmax": crep["distance_argmax"],
                "max_rhat": max(_max_rhat(fit), _max_rhat(cfit)),
            }
    elif n == 2:
        for rho in (0.0, 0.8):
            fit, rep = run(example2(rho, seed), f"rho{rho:g}")
            tox0 = fit["toxicity"].pooled.expected([0.0])[:, 0]
            summary["runs"][f"rho={rho:g}"] = {
                "success_region": rep["success"]["region"],
                "tox_mean_at_0": float(tox0.mean()),
                "eff_diff_mean_at_4": _curve_at(rep["curves"]["efficacy"]["diff"], 4.0),
                "max_rhat": _max_rhat(fit),
            }
    elif n == 3:
        for rho in (0.0, 0.8):
            fit, rep = run(example3(rho, seed), f"rho{rho:g}")
            iv = rep["intervals"]
            summary["runs"][f"rho={rho:g}"] = {
                "MED": iv["efficacy_bound"]["lo"],
                "MSD": iv["toxicity_bound"]["hi"],
                "MED_mean": iv["efficacy_mean"]["lo"],
                "MSD_mean": iv["toxicity_mean"]["hi"],
                "max_rhat": _max_rhat(fit),
            }
    elif n == 4:
        fit, rep = run(example4(out / "input", seed), "fit")
        eff = rep["curves"]["efficacy"]["expected"]
        tox = rep["curves"]["toxicity"]["expected"]
        summary["runs"]["arm_summary"] = {
            "input_efficacy": [[float(d), float(y), float(s), float(k)] for d, y, s, k in zip(
                fit["efficacy"].data.dose, fit["efficacy"].data.response,
                fit["efficacy"].data.se, fit["efficacy"].data.trials)],
            "input_ae": [[float(d), float(y), float(k)] for d, y, k in zip(
                fit["toxicity"].data.dose, fit["toxicity"].data.response, fit["toxicity"].data.trials)],
            "eff_mean_at": {str(d): _curve_at(eff, d) for d in (16.0, 32.0, 40.0, 48.0)},
            "ae_mean_curve": [float(x) for x in tox.mean],
            "max_rhat": _max_rhat(fit),
        }
    else:
        raise ConfigError(f"there are four worked examples; got {n}")
    write_json(out / "summary.json", summary, Provenance(config_hash(summary["runs"]), seed))
    return summary
