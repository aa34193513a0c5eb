"""Experiment orchestrator.

Subcommands: traverse, decay-sweep, toy, analyze, compare-cost, fetch-data.
Configuration is a nested JSON document (see --print-default-config);
command-line flags override file values. Output layout per experiment:

    <out>/<experiment>/run_000/trace.csv
    <out>/<experiment>/run_000/theta_final.bin (+ .txt sidecar)
    <out>/<experiment>/manifest.json
"""

import argparse
import dataclasses
import json
import os
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import artifacts, datasets, toy
from .analysis import grid_ranges, loss_grid, mean_endpoint, pca_fit, pca_project
from .network import GradEvalCounter, NetworkSpec
from .phase1 import Phase1Config, train_phase1
from .traversal import NetworkProblem, TraversalConfig, traverse
from .weight_decay import DecayConfig, lambda_sweep

DATASETS = ("iris", "autompg", "mnist-ff", "toy")

# Per-dataset experiment protocol: architecture, phase-1 epochs, and the
# phase-2 predictor-step budget.
PRESETS = {
    "iris": dict(layers=(4, 100, 100, 100, 3), head="softmax", epochs=500,
                 max_predictor_steps=20000, metric_stride=1, decay_epochs=500),
    "autompg": dict(layers=(7, 100, 100, 100, 1), head="linear", epochs=100,
                    max_predictor_steps=30000, metric_stride=1, decay_epochs=500),
    "mnist-ff": dict(layers=(784, 100, 100, 100, 10), head="softmax", epochs=100,
                     max_predictor_steps=10000, metric_stride=10, decay_epochs=200),
}


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str = "iris"
    runs: int = 10
    seed_base: int = 0
    out: str = "out"
    jobs: int = 0            # 0 = number of cores
    mnist_subsample: int = 1000
    phase1: Phase1Config = field(default_factory=Phase1Config)
    traversal: TraversalConfig = field(default_factory=TraversalConfig)
    decay: DecayConfig = field(default_factory=DecayConfig)

    def __post_init__(self):
        if self.dataset not in DATASETS:
            raise ValueError(f"unknown dataset {self.dataset!r}")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


def default_config(dataset: str) -> ExperimentConfig:
    if dataset == "toy":
        return ExperimentConfig(dataset="toy", traversal=toy.TOY_CONFIG)
    p = PRESETS[dataset]
    return ExperimentConfig(
        dataset=dataset,
        phase1=Phase1Config(epochs=p["epochs"]),
        traversal=TraversalConfig(max_predictor_steps=p["max_predictor_steps"],
                                  metric_stride=p["metric_stride"]),
        decay=DecayConfig(epochs=p["decay_epochs"]),
    )


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return dataclasses.asdict(cfg)


def config_from_dict(d: dict) -> ExperimentConfig:
    d = dict(d)
    for key, cls in (("phase1", Phase1Config), ("traversal", TraversalConfig),
                     ("decay", DecayConfig)):
        if key in d and isinstance(d[key], dict):
            d[key] = cls(**d[key])
    return ExperimentConfig(**d)


def load_config(path, dataset=None) -> ExperimentConfig:
    base = config_to_dict(default_config(dataset or "iris"))
    file_cfg = json.loads(Path(path).read_text())
    if dataset is None and "dataset" in file_cfg:
        base = config_to_dict(default_config(file_cfg["dataset"]))
    for key, value in file_cfg.items():
        if isinstance(value, dict):
            base[key].update(value)
        else:
            base[key] = value
    return config_from_dict(base)


def network_spec(cfg: ExperimentConfig) -> NetworkSpec:
    p = PRESETS[cfg.dataset]
    return NetworkSpec(p["layers"], head=p["head"])


def load_split(cfg: ExperimentConfig, run_seed: int):
    """Iris and Auto-MPG use one fixed split (seed_base); MNIST draws a
    fresh training subsample per run."""
    if cfg.dataset == "iris":
        return datasets.prepare_iris(seed=cfg.seed_base)
    if cfg.dataset == "autompg":
        return datasets.prepare_autompg(seed=cfg.seed_base)
    if cfg.dataset == "mnist-ff":
        return datasets.load_mnist_subsample(n=cfg.mnist_subsample, seed=run_seed)
    raise ValueError(cfg.dataset)


def run_traversal_once(cfg: ExperimentConfig, run: int, run_dir: Path) -> dict:
    run_dir.mkdir(parents=True, exist_ok=True)
    seed = cfg.seed_base + run
    spec = network_spec(cfg)
    train, test = load_split(cfg, seed)
    counter = GradEvalCounter()
    t0 = time.time()
    theta0, reference_loss = train_phase1(
        spec, train.features, train.targets, replace(cfg.phase1, seed=seed), counter)
    phase1_evals = counter.count
    problem = NetworkProblem(spec, train.features, train.targets,
                             test.features, test.targets, counter,
                             metric_scale=train.metric_scale)
    result = traverse(problem, theta0, cfg.traversal)
    wall = time.time() - t0

    artifacts.write_trace_csv(run_dir / "trace.csv", result.trace)
    artifacts.save_theta(run_dir / "theta_final.bin", result.final_theta)
    artifacts.save_theta_sidecar(run_dir / "theta_final.txt", spec, seed)
    if result.snapshots:
        artifacts.save_snapshots(run_dir / "snapshots.bin", result.snapshots)
        (run_dir / "snapshot_indices.txt").write_text(
            "\n".join(str(i) for i in result.snapshot_indices) + "\n")
    test_loss, test_metric = problem.eval_metrics(result.final_theta)
    return {
        "run": run, "seed": seed, "stop_reason": result.stop_reason,
        "wall_clock_s": wall, "phase1_evals": phase1_evals,
        "cum_grad_evals": counter.count, "train_examples": len(train.features),
        "reference_loss": reference_loss,
        "initial_sq_norm": float(theta0 @ theta0),
        "final_sq_norm": float(result.final_theta @ result.final_theta),
        "final_test_loss": test_loss, "final_test_metric": test_metric,
        "corrector_stalls": result.corrector_stalls,
        "corrector_budget_hits": result.corrector_budget_hits,
        "trace_len": len(result.trace),
    }


def run_toy_once(cfg: ExperimentConfig, run: int, run_dir: Path) -> dict:
    run_dir.mkdir(parents=True, exist_ok=True)
    seed = cfg.seed_base + run
    start = toy.random_start(seed)
    t0 = time.time()
    result = toy.toy_traverse(start, cfg.traversal)
    wall = time.time() - t0
    artifacts.write_trace_csv(run_dir / "trace.csv", result.trace)
    artifacts.write_path_csv(run_dir / "path.csv", toy.path_points(result))
    final = result.final_theta
    return {
        "run": run, "seed": seed, "stop_reason": result.stop_reason,
        "wall_clock_s": wall, "cum_grad_evals": result.trace[-1].cum_grad_evals,
        "start": list(start), "final": [float(final[0]), float(final[1])],
        "distance_to_optimum": float(np.linalg.norm(final - toy.OPTIMUM)),
        "final_angle_deg": result.trace[-1].angle_deg,
        "trace_len": len(result.trace),
    }


def _traversal_worker(args):
    cfg, run, run_dir, is_toy = args
    fn = run_toy_once if is_toy else run_traversal_once
    return fn(cfg, run, Path(run_dir))


def run_experiment(cfg: ExperimentConfig, name: str) -> dict:
    """Dispatch all runs of a traverse/toy experiment, then write the
    manifest. Individual numerical failures are recorded; the experiment
    only fails if every run does."""
    exp_dir = Path(cfg.out) / name
    exp_dir.mkdir(parents=True, exist_ok=True)
    is_toy = cfg.dataset == "toy"
    tasks = [(cfg, run, str(exp_dir / f"run_{run:03d}"), is_toy)
             for run in range(cfg.runs)]
    jobs = cfg.jobs or os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            run_infos = list(pool.map(_traversal_worker, tasks))
    else:
        run_infos = [_traversal_worker(t) for t in tasks]

    manifest = {
        "experiment": name, "mode": "traverse", "config": config_to_dict(cfg),
        "runs": run_infos,
    }
    ok = [r for r in run_infos if r["stop_reason"] != "numerical-failure"]
    if not is_toy and ok:
        metrics = [r["final_test_metric"] for r in ok]
        manifest["mean_test_metric"] = float(np.mean(metrics))
        manifest["std_test_metric"] = float(np.std(metrics))
    artifacts.write_manifest(exp_dir / "manifest.json", manifest)
    if not ok:
        raise RuntimeError("all runs failed")
    return manifest


def run_decay_sweep(cfg: ExperimentConfig, name: str) -> dict:
    exp_dir = Path(cfg.out) / name
    exp_dir.mkdir(parents=True, exist_ok=True)
    spec = network_spec(cfg)
    train, test = load_split(cfg, cfg.seed_base)
    decay = replace(cfg.decay, seed_base=cfg.seed_base,
                    batch_size=cfg.phase1.batch_size)
    t0 = time.time()
    sweep = lambda_sweep(spec, train, test, decay,
                         jobs=cfg.jobs or os.cpu_count() or 1)
    artifacts.write_sweep_csv(exp_dir / "sweep.csv", sweep.runs)
    best_mean, best_std, _ = sweep.per_lambda[sweep.best_lambda]
    manifest = {
        "experiment": name, "mode": "decay-sweep", "config": config_to_dict(cfg),
        "dataset": cfg.dataset, "task": sweep.task,
        "train_examples": len(train.features),
        "per_lambda": {f"{lam:.17g}": {"mean": m, "std": s, "runs": n}
                       for lam, (m, s, n) in sweep.per_lambda.items()},
        "best_lambda": sweep.best_lambda,
        "best_mean_test_metric": best_mean, "best_std_test_metric": best_std,
        # example-wise gradient evals: every example touched once per epoch
        "evals_per_run": decay.epochs * len(train.features),
        "wall_clock_s": time.time() - t0,
    }
    artifacts.write_manifest(exp_dir / "manifest.json", manifest)
    return manifest


def run_analyze(traverse_dir, out_dir, k=6, resolution=100, subsample=1) -> dict:
    """PCA over pooled traversal snapshots (per-run subsampling first, then
    pooling), projections of each trajectory, a top-2 loss grid, and the
    endpoint mean."""
    traverse_dir = Path(traverse_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = artifacts.read_manifest(traverse_dir / "manifest.json")
    cfg = config_from_dict(manifest["config"])
    if cfg.dataset == "toy":
        raise ValueError("analyze applies to network traversals")
    spec = network_spec(cfg)
    train, _ = load_split(cfg, cfg.seed_base)

    per_run, endpoints = [], []
    for run_dir in sorted(traverse_dir.glob("run_*")):
        snap_file = run_dir / "snapshots.bin"
        if not snap_file.exists():
            raise FileNotFoundError(
                f"{snap_file} missing: rerun traverse with a snapshot stride")
        snaps = artifacts.load_snapshots(snap_file)[::subsample]
        idx = [int(v) for v in
               (run_dir / "snapshot_indices.txt").read_text().split()][::subsample]
        per_run.append((run_dir.name, idx, snaps))
        endpoints.append(artifacts.load_theta(run_dir / "theta_final.bin"))

    pooled = np.concatenate([np.array(s) for _, _, s in per_run])
    k = min(k, len(pooled) - 1, pooled.shape[1])
    model = pca_fit(pooled, k)
    artifacts.save_pca(out_dir / "pca", model)

    rows = ["run,predictor_index," + ",".join(f"c{i+1}" for i in range(k))]
    for name, idx, snaps in per_run:
        for i, theta in zip(idx, snaps):
            coords = pca_project(model, theta)
            rows.append(f"{name},{i}," + ",".join(artifacts.fmt(c) for c in coords))
    (out_dir / "projections.csv").write_text("\n".join(rows) + "\n")

    ranges = grid_ranges(model, pooled)
    grid = loss_grid(model, spec, train, ranges, resolution)
    artifacts.write_loss_grid_csv(out_dir / "loss_grid.csv", grid)

    mean_theta, mean_loss = mean_endpoint(np.array(endpoints), spec, train)
    artifacts.save_theta(out_dir / "theta_mean_endpoint.bin", mean_theta)
    result = {
        "mode": "analyze", "source": str(traverse_dir), "components": k,
        "explained_variance_ratio": [float(r) for r in model.explained_variance_ratio],
        "mean_endpoint_train_loss": mean_loss,
        "mean_endpoint_coords": [float(c) for c in pca_project(model, mean_theta)],
        "grid_resolution": resolution,
    }
    artifacts.write_manifest(out_dir / "manifest.json", result)
    return result


def compare_cost(traverse_dir, decay_dir, out_path) -> list:
    """Per-method (cum_grad_evals, best-so-far test metric) table.

    Traversal rows come from each run's trace (running best of the test
    metric). Weight-decay runs have a fixed analytic cost of
    epochs * train_count example-wise gradient evaluations each; costs
    accumulate over the whole sweep grid in run order.
    """
    traverse_dir, decay_dir = Path(traverse_dir), Path(decay_dir)
    t_manifest = artifacts.read_manifest(traverse_dir / "manifest.json")
    d_manifest = artifacts.read_manifest(decay_dir / "manifest.json")
    ds = t_manifest["config"]["dataset"]
    if ds != d_manifest["config"]["dataset"]:
        raise ValueError("manifests compare different datasets")
    higher_better = d_manifest["task"] == "classification"
    better = max if higher_better else min

    rows = []
    run_dirs = sorted(traverse_dir.glob("run_*"))
    if not run_dirs:
        raise ValueError(f"no runs under {traverse_dir}")
    for run_dir in run_dirs:
        trace = artifacts.read_trace_csv(run_dir / "trace.csv")
        best = None
        for rec in trace:
            if np.isnan(rec.test_metric):
                continue
            best = rec.test_metric if best is None else better(best, rec.test_metric)
            rows.append(("traversal", run_dir.name, rec.cum_grad_evals, best))

    per_run_cost = d_manifest["evals_per_run"]
    sweep_runs = [line.split(",") for line in
                  (decay_dir / "sweep.csv").read_text().splitlines()[1:]]
    cum = 0
    best = None
    for f in sweep_runs:
        cum += per_run_cost
        if f[5] == "1":
            continue
        metric = float(f[3])
        best = metric if best is None else better(best, metric)
        rows.append(("weight-decay", f"lambda={f[0]}", cum, best))

    out = ["method,source,cum_grad_evals,best_test_metric"]
    out += [f"{m},{s},{c},{artifacts.fmt(b)}" for m, s, c, b in rows]
    Path(out_path).write_text("\n".join(out) + "\n")
    return rows


FETCH_URLS = {
    "iris.data": "https://archive.ics.uci.edu/ml/machine-learning-databases/iris/iris.data",
    "auto-mpg.data": "https://archive.ics.uci.edu/ml/machine-learning-databases/auto-mpg/auto-mpg.data",
    "mnist/train-images-idx3-ubyte.gz": "https://storage.googleapis.com/cvdf-datasets/mnist/train-images-idx3-ubyte.gz",
    "mnist/train-labels-idx1-ubyte.gz": "https://storage.googleapis.com/cvdf-datasets/mnist/train-labels-idx1-ubyte.gz",
    "mnist/t10k-images-idx3-ubyte.gz": "https://storage.googleapis.com/cvdf-datasets/mnist/t10k-images-idx3-ubyte.gz",
    "mnist/t10k-labels-idx1-ubyte.gz": "https://storage.googleapis.com/cvdf-datasets/mnist/t10k-labels-idx1-ubyte.gz",
}


def fetch_data(dest, mirror=None):
    """Download any missing dataset files; already-present files are kept
    (offline use with a pre-populated directory is fine)."""
    dest = Path(dest)
    for rel, url in FETCH_URLS.items():
        if mirror:
            url = mirror.rstrip("/") + "/" + rel
        target = dest / rel
        if target.exists():
            print(f"have {target}")
            continue
        print(f"fetching {url}")
        datasets.fetch(url, target)


def _apply_flag_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    updates = {}
    for flag, key in (("runs", "runs"), ("seed", "seed_base"),
                      ("out", "out"), ("jobs", "jobs")):
        v = getattr(args, flag, None)
        if v is not None:
            updates[key] = v
    if getattr(args, "steps", None) is not None:
        cfg = replace(cfg, traversal=replace(cfg.traversal,
                                             max_predictor_steps=args.steps))
    if getattr(args, "snapshot_stride", None) is not None:
        cfg = replace(cfg, traversal=replace(cfg.traversal,
                                             snapshot_stride=args.snapshot_stride))
    if getattr(args, "epochs", None) is not None:
        cfg = replace(cfg, phase1=replace(cfg.phase1, epochs=args.epochs),
                      decay=replace(cfg.decay, epochs=args.epochs))
    return replace(cfg, **updates) if updates else cfg


def _resolve_config(args, dataset=None) -> ExperimentConfig:
    dataset = dataset or getattr(args, "dataset", None)
    if args.config:
        cfg = load_config(args.config, dataset)
    else:
        cfg = default_config(dataset or "iris")
    return _apply_flag_overrides(cfg, args)


def _add_common(sub, with_dataset=True):
    sub.add_argument("--config", default=None, help="JSON config file")
    if with_dataset:
        sub.add_argument("--dataset", choices=[d for d in DATASETS if d != "toy"],
                         default=None)
    sub.add_argument("--runs", type=int, default=None)
    sub.add_argument("--seed", type=int, default=None, help="seed base")
    sub.add_argument("--out", default=None)
    sub.add_argument("--jobs", type=int, default=None)
    sub.add_argument("--print-default-config", action="store_true")


def build_parser():
    ap = argparse.ArgumentParser(prog="levelwalk", description=__doc__)
    sp = ap.add_subparsers(dest="command", required=True)

    t = sp.add_parser("traverse", help="phase 1 + level-set walk")
    _add_common(t)
    t.add_argument("--steps", type=int, default=None,
                   help="override max predictor steps")
    t.add_argument("--epochs", type=int, default=None,
                   help="override phase-1 epochs")
    t.add_argument("--snapshot-stride", type=int, default=None,
                   help="store every k-th theta for later analysis")
    t.add_argument("--name", default=None, help="experiment directory name")

    d = sp.add_parser("decay-sweep", help="weight-decay lambda sweep baseline")
    _add_common(d)
    d.add_argument("--epochs", type=int, default=None)
    d.add_argument("--name", default=None)

    y = sp.add_parser("toy", help="unit-circle toy problem")
    _add_common(y, with_dataset=False)
    y.add_argument("--steps", type=int, default=None)
    y.add_argument("--name", default=None)

    a = sp.add_parser("analyze", help="PCA + loss grid over a traverse output")
    a.add_argument("--traverse-dir", required=True)
    a.add_argument("--out", required=True)
    a.add_argument("--components", type=int, default=6)
    a.add_argument("--resolution", type=int, default=100)
    a.add_argument("--subsample", type=int, default=1,
                   help="extra per-run snapshot subsampling before pooling")

    c = sp.add_parser("compare-cost", help="gradient-evals vs performance table")
    c.add_argument("--traverse-dir", required=True)
    c.add_argument("--decay-dir", required=True)
    c.add_argument("--out", required=True)

    f = sp.add_parser("fetch-data", help="download datasets (checksummed)")
    f.add_argument("--dest", default=None,
                   help="target directory (default: $LEVELWALK_DATA or ./data)")
    f.add_argument("--mirror", default=None, help="base URL overriding defaults")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "print_default_config", False):
        ds = getattr(args, "dataset", None) or "iris"
        print(json.dumps(config_to_dict(default_config(ds)), indent=2))
        return 0

    if args.command == "traverse":
        if args.dataset is None and not args.config:
            print("traverse: --dataset or --config required", file=sys.stderr)
            return 2
        cfg = _resolve_config(args)
        name = args.name or f"{cfg.dataset}-traverse"
        manifest = run_experiment(cfg, name)
        print(json.dumps({k: v for k, v in manifest.items() if k != "config"
                          and k != "runs"}, indent=2))
    elif args.command == "decay-sweep":
        if args.dataset is None and not args.config:
            print("decay-sweep: --dataset or --config required", file=sys.stderr)
            return 2
        cfg = _resolve_config(args)
        name = args.name or f"{cfg.dataset}-decay"
        manifest = run_decay_sweep(cfg, name)
        print(f"best lambda {manifest['best_lambda']:g}: "
              f"{manifest['best_mean_test_metric']:.4f} "
              f"+/- {manifest['best_std_test_metric']:.4f}")
    elif args.command == "toy":
        cfg = _resolve_config(args, dataset="toy")
        if args.steps is not None:
            cfg = replace(cfg, traversal=replace(cfg.traversal,
                                                 max_predictor_steps=args.steps))
        manifest = run_experiment(cfg, args.name or "toy")
        dists = [r["distance_to_optimum"] for r in manifest["runs"]]
        print(f"{len(dists)} runs, max distance to optimum {max(dists):.2e}")
    elif args.command == "analyze":
        result = run_analyze(args.traverse_dir, args.out, args.components,
                             args.resolution, args.subsample)
        print(json.dumps(result, indent=2))
    elif args.command == "compare-cost":
        compare_cost(args.traverse_dir, args.decay_dir, args.out)
        print(f"wrote {args.out}")
    elif args.command == "fetch-data":
        fetch_data(args.dest or datasets.data_dir(), args.mirror)
    return 0


if __name__ == "__main__":
    sys.exit(main())
