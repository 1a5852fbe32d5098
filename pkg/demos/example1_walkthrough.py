"""Both analysis strategies on one simulated antihypertensive trial.

Fits the marginal efficacy/toxicity models, derives the acceptable dose
ranges, then fits the ordered-category model to the same subjects.

Run:  python3 demos/example1_walkthrough.py [--quick] [--out DIR]

``--quick`` uses short chains (fine for a look, not for numbers).
"""

import argparse
import json

from doseforge.pipeline import PipelineConfig, run_pipeline
from doseforge.reproduce import example1_categorical, example1_marginal
from doseforge.simulation import EXAMPLE1_COPULAS

QUICK = {"chains": 2, "warmup": 500, "post_warmup": 500, "thin": 1}

ap = argparse.ArgumentParser()
ap.add_argument("--quick", action="store_true")
ap.add_argument("--copula", default="gaussian_rho=0", choices=[c.label for c in EXAMPLE1_COPULAS])
ap.add_argument("--out", default="demo_out/example1")
args = ap.parse_args()

cop = next(c for c in EXAMPLE1_COPULAS if c.label == args.copula)
extra = {"mcmc": QUICK, "max_rhat": 1.5} if args.quick else {}

cfg = PipelineConfig.from_dict({**example1_marginal(cop), **extra})
fit, rep = run_pipeline(cfg, f"{args.out}/marginal")
for name, of in fit.outcomes.items():
    print(f"\n[{name}] model weights\n{of.weights.table()}")
print("\nacceptable ranges:")
print(json.dumps({k: (v["lo"], v["hi"]) for k, v in rep["intervals"].items()}, indent=1))

cfg = PipelineConfig.from_dict({**example1_categorical(cop), **extra})
_, crep = run_pipeline(cfg, f"{args.out}/categorical")
best = crep["curves"]["Best"]
print("\nP(Best) by dose (mean, 95% interval):")
for d in (0.0, 0.2, 0.4, 0.6, 0.8):
    r = best.at(d)
    print(f"  {d:.1f}  {r['mean']:.3f}  [{r['q025']:.3f}, {r['q975']:.3f}]")
print("dose furthest from control:", crep["distance_argmax"])
