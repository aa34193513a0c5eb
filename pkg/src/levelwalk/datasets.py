"""Dataset ingestion and deterministic splitting for Iris, Auto-MPG, and
MNIST subsamples.

File formats: classic UCI Iris CSV; UCI Auto-MPG whitespace format with '?'
missing-value markers; MNIST IDX (big-endian, gzip accepted). The bundled
data/ directory at the repo root holds local copies; LEVELWALK_DATA
overrides the location.
"""

import gzip
import hashlib
import os
import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

CLASSIFICATION = "classification"
REGRESSION = "regression"

IRIS_CLASSES = ["Iris-setosa", "Iris-versicolor", "Iris-virginica"]
MPG_FEATURES = ["cylinders", "displacement", "horsepower", "weight",
                "acceleration", "model_year", "origin"]

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801


class ParseError(ValueError):
    pass


def data_dir() -> Path:
    """Dataset directory: $LEVELWALK_DATA, else ./data, else the data/
    directory bundled next to this checkout."""
    env = os.environ.get("LEVELWALK_DATA")
    if env:
        return Path(env)
    local = Path("data")
    if local.is_dir():
        return local
    return Path(__file__).resolve().parents[2] / "data"


@dataclass
class Dataset:
    name: str
    features: np.ndarray
    targets: np.ndarray
    feature_names: list
    task: str
    # multiplier taking model-unit regression MSE to reporting units
    # (1.0 unless the targets were rescaled)
    metric_scale: float = 1.0

    def __post_init__(self):
        if not np.all(np.isfinite(self.features)):
            raise ValueError("non-finite feature values")
        if len(self.features) != len(self.targets):
            raise ValueError("feature/target count mismatch")

    def __len__(self):
        return len(self.features)


@dataclass(frozen=True)
class SplitSpec:
    train_count: int
    test_count: int
    seed: int
    strategy: str = "random"  # random | stratified | sequential


def load_iris(path=None) -> Dataset:
    """150-example, 4-feature, 3-class Iris from the UCI CSV layout.
    Features are left raw here; standardization happens at split time."""
    path = Path(path) if path else data_dir() / "iris.data"
    feats, targets = [], []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 5 or parts[4] not in IRIS_CLASSES:
            raise ParseError(f"{path}:{lineno}: malformed iris row {line!r}")
        try:
            feats.append([float(v) for v in parts[:4]])
        except ValueError as e:
            raise ParseError(f"{path}:{lineno}: {e}") from e
        targets.append(IRIS_CLASSES.index(parts[4]))
    return Dataset("iris", np.array(feats), np.array(targets, dtype=np.int64),
                   ["sepal_length", "sepal_width", "petal_length", "petal_width"],
                   CLASSIFICATION)


def load_autompg(path=None) -> Dataset:
    """Auto-MPG regression data: 7 numeric features, target mpg in original
    units. Rows with '?' markers (missing horsepower) are dropped, leaving
    392 of the 398."""
    path = Path(path) if path else data_dir() / "auto-mpg.data"
    feats, targets = [], []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        numeric = line.split("\t")[0].split()
        if len(numeric) != 8:
            raise ParseError(f"{path}:{lineno}: expected 8 numeric fields, "
                             f"got {len(numeric)}")
        if "?" in numeric:
            continue
        try:
            row = [float(v) for v in numeric]
        except ValueError as e:
            raise ParseError(f"{path}:{lineno}: {e}") from e
        targets.append(row[0])
        feats.append(row[1:])
    return Dataset("autompg", np.array(feats), np.array(targets),
                   list(MPG_FEATURES), REGRESSION)


def _read_idx(path: Path, expected_magic: int) -> np.ndarray:
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rb") as f:
        raw = f.read()
    magic, = struct.unpack(">I", raw[:4])
    if magic != expected_magic:
        raise ParseError(f"{path}: IDX magic 0x{magic:08x}, expected "
                         f"0x{expected_magic:08x}")
    ndim = magic & 0xFF
    dims = struct.unpack(f">{ndim}I", raw[4:4 + 4 * ndim])
    data = np.frombuffer(raw, dtype=np.uint8, offset=4 + 4 * ndim)
    return data.reshape(dims)


def _find_idx(directory: Path, stem: str) -> Path:
    for suffix in (".gz", ""):
        p = directory / (stem + suffix)
        if p.exists():
            return p
    raise FileNotFoundError(f"missing {stem}[.gz] under {directory}")


def load_mnist_subsample(path=None, n=1000, seed=0):
    """(train, test) MNIST pair: n training examples sampled without
    replacement (seeded), the full 10k test set, pixels scaled to [0, 1]."""
    directory = Path(path) if path else data_dir() / "mnist"
    train_x = _read_idx(_find_idx(directory, "train-images-idx3-ubyte"), IDX_IMAGES_MAGIC)
    train_y = _read_idx(_find_idx(directory, "train-labels-idx1-ubyte"), IDX_LABELS_MAGIC)
    test_x = _read_idx(_find_idx(directory, "t10k-images-idx3-ubyte"), IDX_IMAGES_MAGIC)
    test_y = _read_idx(_find_idx(directory, "t10k-labels-idx1-ubyte"), IDX_LABELS_MAGIC)
    if n > len(train_x):
        raise ValueError(f"subsample of {n} exceeds {len(train_x)} examples")
    idx = np.random.default_rng(seed).choice(len(train_x), size=n, replace=False)
    names = [f"px{i}" for i in range(28 * 28)]
    train = Dataset("mnist-train", train_x[idx].reshape(n, -1) / 255.0,
                    train_y[idx].astype(np.int64), names, CLASSIFICATION)
    test = Dataset("mnist-test", test_x.reshape(len(test_x), -1) / 255.0,
                   test_y.astype(np.int64), names, CLASSIFICATION)
    return train, test


def train_test_split(ds: Dataset, spec: SplitSpec):
    """Deterministic disjoint split. The stratified strategy allocates each
    class proportionally (only for classification)."""
    n = len(ds)
    if spec.train_count + spec.test_count > n:
        raise ValueError("split exceeds dataset size")
    rng = np.random.default_rng(spec.seed)
    if spec.strategy == "sequential":
        train_idx = np.arange(spec.train_count)
        test_idx = np.arange(spec.train_count, spec.train_count + spec.test_count)
    elif spec.strategy == "stratified":
        if ds.task != CLASSIFICATION:
            raise ValueError("stratified split needs class targets")
        train_parts, test_parts = [], []
        frac = spec.train_count / (spec.train_count + spec.test_count)
        for c in np.unique(ds.targets):
            members = rng.permutation(np.flatnonzero(ds.targets == c))
            k = round(len(members) * frac)
            train_parts.append(members[:k])
            test_parts.append(members[k:])
        train_idx = np.concatenate(train_parts)
        test_idx = np.concatenate(test_parts)
    elif spec.strategy == "random":
        order = rng.permutation(n)
        train_idx = order[:spec.train_count]
        test_idx = order[spec.train_count:spec.train_count + spec.test_count]
    else:
        raise ValueError(f"unknown split strategy {spec.strategy!r}")
    make = lambda idx, tag: replace(ds, name=f"{ds.name}-{tag}",
                                    features=ds.features[idx],
                                    targets=ds.targets[idx])
    return make(np.sort(train_idx), "train"), make(np.sort(test_idx), "test")


def standardize(train: Dataset, test: Dataset):
    """Zero-mean/unit-variance features using training-split statistics, the
    same affine transform applied to the test split. Targets untouched."""
    mean = train.features.mean(axis=0)
    std = train.features.std(axis=0)
    std[std == 0] = 1.0
    scale = lambda ds: replace(ds, features=(ds.features - mean) / std)
    return scale(train), scale(test)


def prepare_iris(path=None, seed=0):
    """Standardized stratified 120/30 Iris split (40/10 per class)."""
    ds = load_iris(path)
    train, test = train_test_split(ds, SplitSpec(120, 30, seed, "stratified"))
    return standardize(train, test)


def prepare_autompg(path=None, seed=0):
    """Standardized random 314/78 Auto-MPG split.

    Targets are z-scored with training statistics so the regression loss is
    O(1) and the absolute traversal thresholds behave as they do for the
    classification losses; metric_scale carries the training variance so
    reported test MSE stays in original mpg units."""
    ds = load_autompg(path)
    train, test = train_test_split(ds, SplitSpec(314, 78, seed, "random"))
    train, test = standardize(train, test)
    mean = train.targets.mean()
    std = train.targets.std()
    rescale = lambda d: replace(d, targets=(d.targets - mean) / std,
                                metric_scale=float(std * std))
    return rescale(train), rescale(test)


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def fetch(url: str, dest: Path, checksum: str = None) -> Path:
    """Download a dataset file with optional sha256 verification; an existing
    file with a matching checksum is kept."""
    dest = Path(dest)
    if dest.exists() and (checksum is None or sha256(dest) == checksum):
        return dest
    import requests
    dest.parent.mkdir(parents=True, exist_ok=True)
    resp = requests.get(url, timeout=60)
    resp.raise_for_status()
    dest.write_bytes(resp.content)
    if checksum is not None and sha256(dest) != checksum:
        raise IOError(f"checksum mismatch for {url}")
    return dest
