"""Accuracy of DF-MLP on interval data converted with different apex weights beta.

    python scripts/run_beta_sweep.py --betas 0 0.25 0.5 0.75 1 --repeats 5
"""
import argparse
from pathlib import Path

from fuzzyclf.dataio import SyntheticConfig, generate_synthetic_intervals, write_csv_table
from fuzzyclf.experiments import RESULT_HEADER, SUMMARY_HEADER, MlpSettings, summarize, sweep
from fuzzyclf.mlp import TrainConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--betas", type=float, nargs="+", default=[0, 0.25, 0.5, 0.75, 1])
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--spread", type=float, default=4.0)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--defuzz", default="val")
    ap.add_argument("--epochs", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/beta.csv")
    args = ap.parse_args()

    ds = generate_synthetic_intervals(SyntheticConfig(n=args.n, spread=args.spread, seed=args.seed))
    model = MlpSettings(args.defuzz, (100, 100), TrainConfig(epochs=args.epochs))
    results = sweep("beta", args.betas, model, args.repeats, seed=args.seed, dataset=ds, select_on_val=False)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv_table(out, RESULT_HEADER, [r.row() for r in results])
    summary = summarize(results)
    write_csv_table(out.with_name(out.stem + "_summary.csv"), SUMMARY_HEADER, summary)
    for row in summary:
        print(f"beta={row[0]:<5} accuracy {row[8]}  balanced {row[9]}")


if __name__ == "__main__":
    main()
