"""Unit-circle toy traversal: minimize x + y constrained to x^2 + y^2 = 1.

Writes one path.csv per seeded start plus a manifest with the distance of
each endpoint from the analytic optimum (-sqrt(2)/2, -sqrt(2)/2).

    python3 scripts/run_toy.py --runs 20 --out results
"""

import argparse

from levelwalk.cli import main as cli_main


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--runs", type=int, default=20)
    args = ap.parse_args()
    raise SystemExit(cli_main(["toy", "--runs", str(args.runs),
                               "--out", args.out]))
