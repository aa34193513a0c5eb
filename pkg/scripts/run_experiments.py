"""Full-scale experiment driver: level-set traversal, weight-decay sweep,
PCA/loss-surface analysis, and the cost comparison table for one dataset.

Examples
--------
    python3 scripts/run_experiments.py iris --out results
    python3 scripts/run_experiments.py autompg --out results --jobs 4

Budgets follow the built-in presets (iris: 500 epochs + 20000 predictor
steps; autompg: 500 + 30000; mnist-ff: 100 + 10000). Expect minutes per
traversal run on one core for iris/autompg; see run_mnist_ff.py for the
multi-hour MNIST configuration.
"""

import argparse
from pathlib import Path

from levelwalk.cli import (compare_cost, config_from_dict, config_to_dict,
                           default_config, run_analyze, run_decay_sweep,
                           run_experiment)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("dataset", choices=["iris", "autompg", "mnist-ff"])
    ap.add_argument("--out", default="results")
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--jobs", type=int, default=0)
    ap.add_argument("--snapshot-stride", type=int, default=100,
                    help="keep every k-th parameter vector for PCA")
    ap.add_argument("--skip-decay", action="store_true")
    args = ap.parse_args()

    base = config_to_dict(default_config(args.dataset))
    base.update(out=args.out, runs=args.runs, jobs=args.jobs)
    base["traversal"].update(snapshot_stride=args.snapshot_stride,
                             metric_stride=10)
    cfg = config_from_dict(base)

    name = args.dataset
    out = Path(args.out)
    manifest = run_experiment(cfg, f"{name}-traverse")
    print(f"traversal mean test metric: {manifest['mean_test_metric']:.4f} "
          f"+/- {manifest['std_test_metric']:.4f}")

    run_analyze(out / f"{name}-traverse", out / f"{name}-analysis")

    if not args.skip_decay:
        sweep = run_decay_sweep(cfg, f"{name}-decay")
        print(f"weight-decay best lambda {sweep['best_lambda']:g}: "
              f"{sweep['best_mean_test_metric']:.4f} "
              f"+/- {sweep['best_std_test_metric']:.4f}")
        compare_cost(out / f"{name}-traverse", out / f"{name}-decay",
                     out / f"{name}-cost.csv")
        print(f"cost comparison written to {out / (name + '-cost.csv')}")


if __name__ == "__main__":
    main()
