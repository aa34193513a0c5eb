"""MNIST feed-forward reproduction (long-running; hours on one core).

Trains a 784-100-100-100-10 tanh/softmax network on a 1000-example MNIST
subsample per run, then traverses the training-loss level set for 10000
predictor steps. Expected 10-run mean test accuracy is roughly 89%.

    python3 scripts/run_mnist_ff.py --out results --runs 10
"""

import argparse

from levelwalk.cli import (config_from_dict, config_to_dict, default_config,
                           run_experiment)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--jobs", type=int, default=0)
    ap.add_argument("--subsample", type=int, default=1000)
    args = ap.parse_args()

    base = config_to_dict(default_config("mnist-ff"))
    base.update(out=args.out, runs=args.runs, jobs=args.jobs,
                mnist_subsample=args.subsample)
    manifest = run_experiment(config_from_dict(base), "mnist-ff-traverse")
    print(f"mean test accuracy: {manifest['mean_test_metric']:.4f} "
          f"+/- {manifest['std_test_metric']:.4f}")


if __name__ == "__main__":
    main()
