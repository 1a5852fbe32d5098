"""Dose response from per-arm trial summaries (mean, SE, counts).

Writes the three summary tables, fits them and prints the fitted mean
SBM change and AE risk on a 4 ug grid.

Run:  python3 demos/example4_summary_data.py [--out DIR]
"""

import argparse

from doseforge.pipeline import PipelineConfig, run_pipeline
from doseforge.reproduce import example4

ap = argparse.ArgumentParser()
ap.add_argument("--out", default="demo_out/example4")
args = ap.parse_args()

cfg = PipelineConfig.from_dict(example4(f"{args.out}/input"))
fit, rep = run_pipeline(cfg, f"{args.out}/fit")
eff, ae = rep["curves"]["efficacy"]["expected"], rep["curves"]["toxicity"]["expected"]
print(f"{'dose':>6}{'SBM change':>12}{'P(AE)':>8}")
for d in range(16, 49, 4):
    print(f"{d:6d}{eff.at(d)['mean']:12.2f}{ae.at(d)['mean']:8.3f}")
