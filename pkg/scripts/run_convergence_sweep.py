"""Test error of DF-MLP (VAL) as the training set grows.

Uses multi-cluster classes with fixed centers so the error is not already
at its floor for small m. Prints the least-squares slope of log error vs log m.

    python scripts/run_convergence_sweep.py --sizes 200 400 800 1600 3200 --repeats 10
"""
import argparse
from pathlib import Path

import numpy as np

from fuzzyclf.dataio import SyntheticConfig, write_csv_table
from fuzzyclf.experiments import RESULT_HEADER, SUMMARY_HEADER, MlpSettings, summarize, sweep
from fuzzyclf.mlp import TrainConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 400, 800, 1600, 3200])
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--spread", type=float, default=3.5)
    ap.add_argument("--clusters-per-class", type=int, default=4)
    ap.add_argument("--center-seed", type=int, default=7)
    ap.add_argument("--epochs", type=int, default=30)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--seed", type=int, default=6)
    ap.add_argument("--out", default="results/convergence.csv")
    args = ap.parse_args()

    data = SyntheticConfig(spread=args.spread, center_seed=args.center_seed, clusters_per_class=args.clusters_per_class)
    model = MlpSettings("val", (100, 100), TrainConfig(epochs=args.epochs))
    results = sweep("m", args.sizes, model, args.repeats, seed=args.seed, synthetic=data,
                    select_on_val=False, jobs=args.jobs)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv_table(out, RESULT_HEADER, [r.row() for r in results])
    write_csv_table(out.with_name(out.stem + "_summary.csv"), SUMMARY_HEADER, summarize(results))

    err = [np.mean([1 - r.report.accuracy for r in results if r.param == str(m)]) for m in args.sizes]
    for m, e in zip(args.sizes, err):
        print(f"m={m:<6} mean test error {e:.4f}")
    slope = np.polyfit(np.log(args.sizes), np.log(err), 1)[0]
    print(f"slope of log error vs log m: {slope:.3f} (-0.5 for 1/sqrt(m))")


if __name__ == "__main__":
    main()
