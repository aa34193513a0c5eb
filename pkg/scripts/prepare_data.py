"""Build the bundled data/ directory from local sources.

Produces UCI-format files so the loaders in levelwalk.datasets exercise the
real on-disk formats:

  data/iris.data          classic 150-row CSV (4 features + species label)
  data/auto-mpg.data      whitespace-delimited, '?' for missing horsepower
  data/mnist/*.gz         gzipped IDX image/label files

Iris comes from scikit-learn. Auto-MPG is reconstructed from a cars.json in
the vega-datasets layout (406 records; the 8 with missing mpg are dropped to
give the canonical 398). MNIST expects the four raw IDX files in a source
directory.
"""

import argparse
import gzip
import json
import shutil
from pathlib import Path

IRIS_LABELS = ["Iris-setosa", "Iris-versicolor", "Iris-virginica"]
ORIGIN_CODES = {"USA": 1, "Europe": 2, "Japan": 3}
MNIST_FILES = [
    "train-images-idx3-ubyte",
    "train-labels-idx1-ubyte",
    "t10k-images-idx3-ubyte",
    "t10k-labels-idx1-ubyte",
]


def write_iris(out: Path) -> None:
    from sklearn.datasets import load_iris

    iris = load_iris()
    lines = []
    for x, y in zip(iris.data, iris.target):
        feats = ",".join(f"{v:.1f}" for v in x)
        lines.append(f"{feats},{IRIS_LABELS[int(y)]}")
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out} ({len(lines)} rows)")


def write_autompg(cars_json: Path, out: Path) -> None:
    records = json.loads(cars_json.read_text())
    lines = []
    for r in records:
        if r["Miles_per_Gallon"] is None:
            continue
        hp = "?" if r["Horsepower"] is None else f"{float(r['Horsepower']):.1f}"
        year = int(r["Year"][:4]) - 1900
        lines.append(
            f"{float(r['Miles_per_Gallon']):.1f}   {int(r['Cylinders'])}   "
            f"{float(r['Displacement']):.1f}      {hp}      "
            f"{float(r['Weight_in_lbs']):.1f}      {float(r['Acceleration']):.1f}   "
            f"{year}  {ORIGIN_CODES[r['Origin']]}\t\"{r['Name']}\""
        )
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out} ({len(lines)} rows)")


def write_mnist(src_dir: Path, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in MNIST_FILES:
        src = src_dir / name
        dst = out_dir / (name + ".gz")
        with open(src, "rb") as f_in, gzip.open(dst, "wb", compresslevel=6) as f_out:
            shutil.copyfileobj(f_in, f_out)
        print(f"wrote {dst}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("data"))
    ap.add_argument("--cars-json", type=Path, default=None,
                    help="path to a vega-datasets style cars.json")
    ap.add_argument("--mnist-src", type=Path, default=None,
                    help="directory holding the four raw IDX files")
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    write_iris(args.out / "iris.data")
    if args.cars_json:
        write_autompg(args.cars_json, args.out / "auto-mpg.data")
    if args.mnist_src:
        write_mnist(args.mnist_src, args.out / "mnist")


if __name__ == "__main__":
    main()
