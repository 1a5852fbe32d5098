"""Command-line entry point: ``doseforge <command> ...``.

Exit status is 0 on success, 2 for invalid configuration or data and 3 when
a candidate fit fails the convergence check.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import ConfigError, ConvergenceError, DataError, DoseForgeError
from .pipeline import FitResult, categorical_report, load_config, marginal_report, run_pipeline, simulate_only
from .reproduce import reproduce_example

EXIT_OK, EXIT_INVALID, EXIT_CONVERGENCE = 0, 2, 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="doseforge", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("-c", "--config", required=True, help="pipeline config (JSON, schema 1)")
        sp.add_argument("-o", "--out", required=True, help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed")

    common(sub.add_parser("simulate", help="simulate a paired dataset only"))
    common(sub.add_parser("fit", help="fit candidate models and save draws and weights"))
    sp = sub.add_parser("select", help="fit (or load a fit) and derive acceptable dose ranges")
    common(sp)
    sp.add_argument("--fit", help="directory of a previous 'fit' run to reuse")
    common(sub.add_parser("categorize", help="categorical strategy: ordinal fits and distances"))
    rp = sub.add_parser("reproduce", help="rerun a worked example")
    rp.add_argument("--example", type=int, required=True, choices=(1, 2, 3, 4))
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("-o", "--out", default="reproduce")
    rp.add_argument("--svg", action="store_true", help="also write SVG plots")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "reproduce":
            summary = reproduce_example(args.example, args.seed, args.out, svg=args.svg)
            print(json.dumps(summary["runs"], indent=2, default=str))
            return EXIT_OK
        cfg = load_config(args.config, args.seed)
        if args.command == "simulate":
            data = simulate_only(cfg, args.out)
            print(f"wrote {len(data)} rows to {args.out}/data.csv")
        elif args.command == "fit":
            fit, _ = run_pipeline(cfg, args.out, stages=("fit",))
            for name, of in fit.outcomes.items():
                print(f"[{name}]\n{of.weights.table()}")
        elif args.command == "select":
            if cfg.strategy != "marginal":
                raise ConfigError("select runs the marginal strategy; use 'categorize' for categories")
            if args.fit:
                fit = FitResult.load(args.fit)
                rep = marginal_report(fit, args.out)
            else:
                _, rep = run_pipeline(cfg, args.out)
            print(json.dumps({k: rep[k] for k in ("intervals", "success") if k in rep}, indent=2))
        elif args.command == "categorize":
            if cfg.strategy != "categorical":
                cfg = load_config_categorical(args.config, args.seed)
            _, rep = run_pipeline(cfg, args.out)
            if "distance_argmax" in rep:
                print(json.dumps({"distance_argmax": rep["distance_argmax"]}, indent=2))
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ConfigError, DataError, DoseForgeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def load_config_categorical(path, seed=None):
    """Load a config and switch it to the categorical strategy."""
    with open(path) as fh:
        d = json.load(fh)
    d["strategy"] = d.get("strategy") if isinstance(d.get("strategy"), dict) else "categorical"
    tmp = load_config(path, seed)
    raw = {**tmp.raw, "strategy": d["strategy"]}
    return type(tmp).from_dict(raw, seed)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
