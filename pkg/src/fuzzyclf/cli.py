"""Command-line entry point.

Exit codes: 0 success, 1 invalid flags, 2 runtime failure. Every file
written is accompanied by ``<file>.manifest.json`` holding the resolved
flags, so a run can be repeated exactly.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dataio import (
    SplitSpec,
    SyntheticConfig,
    convert_intervals,
    generate_synthetic,
    generate_synthetic_intervals,
    read_csv_table,
    read_fuzzy_csv,
    smote_oversample,
    split,
    write_csv_table,
    write_fuzzy_csv,
)
from .defuzz import METHODS, DefuzzMethod
from .experiments import (
    RESULT_HEADER,
    SUMMARY_HEADER,
    MlpSettings,
    SvmSettings,
    evaluate,
    fit,
    summarize,
    sweep,
)
from .kvformat import read_kv, write_kv
from .metrics import wilcoxon_rank_sum
from .mlp import MlpModel, TrainConfig
from .svm import KERNELS, KernelSpec, SvmModel
from .theory import empirical_kernel_rademacher, lemma1_bound

class ValidationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from None


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="global random seed")
    common.add_argument("--quiet", action="store_true", help="suppress console output")
    return common


def _model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=("svm", "mlp"), default="svm")
    p.add_argument("--defuzz", choices=METHODS, default="val")
    p.add_argument("--resolution", type=int, default=1001, help="quadrature points for integral defuzzifiers")
    g = p.add_argument_group("svm")
    g.add_argument("--kernel", choices=KERNELS, default="rbf")
    g.add_argument("--c", type=float, default=1.0, help="regularization parameter C")
    g.add_argument("--gamma", type=float, default=None, help="kernel gamma (default 1/p)")
    g.add_argument("--degree", type=int, default=3)
    g.add_argument("--coef0", type=float, default=0.0)
    g.add_argument("--tol", type=float, default=1e-3)
    g.add_argument("--max-passes", type=int, default=100)
    g = p.add_argument_group("mlp")
    g.add_argument("--hidden", type=_ints, default=[100, 100], help="two hidden layer sizes, e.g. 100,100")
    g.add_argument("--lr", type=float, default=1e-3)
    g.add_argument("--epochs", type=int, default=200)
    g.add_argument("--batch-size", type=int, default=32)
    g.add_argument("--weight-decay", type=float, default=1e-4)
    g.add_argument("--activation", choices=("relu", "tanh"), default="relu")


def _gen_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=int, default=20, help="number of features")
    p.add_argument("--k", type=int, default=5, help="number of classes")
    p.add_argument("--spread", type=float, default=10.0, help="class centers are uniform on [0, spread]^p")
    p.add_argument("--sigma", type=float, default=1.0, help="within-class standard deviation")
    p.add_argument("--clusters-per-class", type=int, default=1)
    p.add_argument("--center-seed", type=int, default=None, help="fix class centers independently of --seed")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="fuzzyclf", description="Classification of fuzzy-feature observations.")
    parser.add_argument("--version", action="version", version=f"fuzzyclf {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", parents=[common], help="generate a synthetic fuzzy dataset")
    p.add_argument("--n", type=int, required=True)
    _gen_flags(p)
    p.add_argument("--intervals", action="store_true", help="emit interval features instead of triangular ones")
    p.add_argument("--out", required=True)

    p = sub.add_parser("convert", parents=[common], help="map interval features to triangular fuzzy numbers")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("oversample", parents=[common], help="SMOTE-style class balancing")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--target", type=int, required=True, help="instances per class after oversampling")
    p.add_argument("--k-neighbors", type=int, default=5)
    p.add_argument("--out", required=True)

    p = sub.add_parser("split", parents=[common], help="train/validation/test split")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--fractions", type=_floats, default=[0.6, 0.2, 0.2])
    p.add_argument("--out", required=True, help="output prefix; writes <prefix>_{train,val,test}.csv")

    p = sub.add_parser("train", parents=[common], help="train a DF-SVM or DF-MLP model")
    p.add_argument("--in", dest="input", required=True)
    _model_flags(p)
    p.add_argument("--loss-trace", default=None, help="mlp only: write the per-epoch loss CSV here")
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--metrics", default="accuracy,balanced,auc")
    p.add_argument("--out", default=None)

    p = sub.add_parser("sweep", parents=[common], help="repeated train/evaluate over a parameter")
    p.add_argument("--param", choices=("m", "beta", "defuzz"), required=True)
    p.add_argument("--values", nargs="+", required=True)
    p.add_argument("--repeats", type=int, default=20)
    p.add_argument("--in", dest="input", default=None, help="dataset for beta/defuzz sweeps")
    _model_flags(p)
    _gen_flags(p)
    p.add_argument("--c-grid", type=_floats, default=None, help="C candidates selected on validation")
    p.add_argument("--lr-grid", type=_floats, default=None, help="learning rates selected on validation")
    p.add_argument("--select-on", choices=("val", "none"), default="val")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("rademacher", parents=[common], help="Monte Carlo kernel Rademacher complexity")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--defuzz", choices=METHODS, default="val")
    p.add_argument("--kernel", choices=KERNELS, default="rbf")
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--coef0", type=float, default=0.0)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--draws", type=int, default=200)
    p.add_argument("--classes", type=int, default=None, help="number of score functions K (default: dataset K)")
    p.add_argument("--out", default=None)

    p = sub.add_parser("compare", parents=[common], help="Wilcoxon rank-sum test on two result CSVs")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--metric", choices=("accuracy", "balanced_accuracy", "auc"), default="accuracy")
    p.add_argument("--param", default=None, help="restrict both files to rows with this param value")
    p.add_argument("--out", default=None)
    return parser


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


def validate(args) -> None:
    cmd = args.command
    if cmd in ("gen", "sweep"):
        _check(args.p >= 1 and args.k >= 1, "--p and --k must be >= 1")
        _check(args.spread >= 0 and args.sigma >= 0, "--spread and --sigma must be nonnegative")
        _check(args.clusters_per_class >= 1, "--clusters-per-class must be >= 1")
    if cmd == "gen":
        _check(args.n >= args.k, f"--n must be at least --k ({args.k})")
    if cmd == "convert":
        _check(0.0 <= args.beta <= 1.0, "--beta must lie in [0, 1]")
    if cmd == "oversample":
        _check(args.target >= 1, "--target must be >= 1")
        _check(args.k_neighbors >= 1, "--k-neighbors must be >= 1")
    if cmd == "split":
        _check(len(args.fractions) == 3, "--fractions needs three values")
        _check(all(f > 0 for f in args.fractions), "--fractions must be positive")
        _check(abs(sum(args.fractions) - 1.0) <= 1e-12, "--fractions must sum to 1")
    if cmd in ("train", "sweep"):
        _check(args.resolution >= 2, "--resolution must be >= 2")
        _check(args.c > 0, "--c must be > 0")
        _check(args.gamma is None or args.gamma > 0, "--gamma must be > 0")
        _check(args.degree >= 1 and args.coef0 >= 0, "--degree must be >= 1 and --coef0 >= 0")
        _check(args.tol > 0 and args.max_passes >= 1, "--tol must be > 0 and --max-passes >= 1")
        _check(len(args.hidden) == 2 and min(args.hidden) >= 1, "--hidden needs two positive sizes")
        _check(args.lr > 0 and args.epochs >= 1 and args.batch_size >= 1, "--lr, --epochs, --batch-size must be positive")
        _check(args.weight_decay >= 0, "--weight-decay must be nonnegative")
    if cmd == "eval":
        names = [m.strip() for m in args.metrics.split(",") if m.strip()]
        bad = set(names) - {"accuracy", "balanced", "auc"}
        _check(not bad and names, f"--metrics accepts accuracy, balanced, auc; got {args.metrics!r}")
    if cmd == "sweep":
        _check(args.repeats >= 1 and args.jobs >= 1, "--repeats and --jobs must be >= 1")
        if args.param == "m":
            try:
                ms = [int(v) for v in args.values]
            except ValueError:
                raise ValidationError("--values for m must be integers") from None
            _check(all(m >= max(args.k, 5) for m in ms), "every m must be at least max(K, 5)")
        elif args.param == "beta":
            try:
                betas = [float(v) for v in args.values]
            except ValueError:
                raise ValidationError("--values for beta must be numbers") from None
            _check(all(0 <= b <= 1 for b in betas), "beta values must lie in [0, 1]")
        else:
            _check(all(v in METHODS for v in args.values), f"defuzz values must be among {', '.join(METHODS)}")
        if args.param in ("beta", "defuzz"):
            _check(args.input is not None, f"--in is required when sweeping {args.param}")
        if args.c_grid is not None:
            _check(args.c_grid and all(c > 0 for c in args.c_grid), "--c-grid values must be > 0")
        if args.lr_grid is not None:
            _check(args.lr_grid and all(v > 0 for v in args.lr_grid), "--lr-grid values must be > 0")
    if cmd == "rademacher":
        _check(args.lam > 0 and args.draws >= 1, "--lambda must be > 0 and --draws >= 1")
        _check(args.classes is None or args.classes >= 1, "--classes must be >= 1")
        _check(args.gamma is None or args.gamma > 0, "--gamma must be > 0")


def _manifest(path, args, argv) -> None:
    flags = {k: v for k, v in vars(args).items()}
    data = {"tool": "fuzzyclf", "version": __version__, "command": args.command, "argv": list(argv),
            "seed": args.seed, "flags": flags}
    Path(f"{path}.manifest.json").write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _settings(args):
    if args.model == "svm":
        kernel = KernelSpec(args.kernel, args.gamma, args.degree, args.coef0)
        grid = tuple(getattr(args, "c_grid", None) or [args.c])
        return SvmSettings(args.defuzz, kernel, grid, args.tol, args.max_passes)
    cfg = TrainConfig(lr=args.lr, epochs=args.epochs, batch_size=args.batch_size,
                      weight_decay=args.weight_decay, seed=args.seed)
    grid = tuple(getattr(args, "lr_grid", None) or ())
    return MlpSettings(args.defuzz, tuple(args.hidden), cfg, grid, args.activation)


def _with_resolution(settings, resolution: int):
    settings.method = DefuzzMethod(settings.method, resolution)
    return settings


def _synthetic(args, n: int) -> SyntheticConfig:
    return SyntheticConfig(n=n, p=args.p, K=args.k, seed=args.seed, spread=args.spread, sigma=args.sigma,
                           center_seed=args.center_seed, clusters_per_class=args.clusters_per_class)


def cmd_gen(args, argv, say):
    cfg = _synthetic(args, args.n)
    ds = generate_synthetic_intervals(cfg) if args.intervals else generate_synthetic(cfg)
    write_fuzzy_csv(ds, args.out)
    _manifest(args.out, args, argv)
    say(f"wrote {ds.m} instances ({ds.p} features, {ds.K} classes) to {args.out}")


def cmd_convert(args, argv, say):
    ds = convert_intervals(read_fuzzy_csv(args.input), args.beta)
    write_fuzzy_csv(ds, args.out)
    _manifest(args.out, args, argv)
    say(f"converted {ds.m} instances with beta={args.beta} to {args.out}")


def cmd_oversample(args, argv, say):
    ds = read_fuzzy_csv(args.input)
    out = smote_oversample(ds, args.target, args.k_neighbors, args.seed)
    write_fuzzy_csv(out, args.out)
    _manifest(args.out, args, argv)
    say(f"class counts {ds.class_counts().tolist()} -> {out.class_counts().tolist()}")


def cmd_split(args, argv, say):
    ds = read_fuzzy_csv(args.input)
    parts = split(ds, SplitSpec(*args.fractions, seed=args.seed))
    for name, part in zip(("train", "val", "test"), parts):
        path = f"{args.out}_{name}.csv"
        write_fuzzy_csv(part, path)
        _manifest(path, args, argv)
        say(f"{name}: {part.m} instances -> {path}")


def cmd_train(args, argv, say):
    ds = read_fuzzy_csv(args.input)
    settings = _with_resolution(_settings(args), args.resolution)
    model = fit(settings, ds, args.seed)
    model.save(args.out)
    _manifest(args.out, args, argv)
    if isinstance(model, MlpModel) and args.loss_trace:
        model.save_loss_trace(args.loss_trace)
        _manifest(args.loss_trace, args, argv)
    report = evaluate(model, ds)
    say(f"trained {args.model} ({args.defuzz}); training accuracy {report.accuracy:.4f}; model -> {args.out}")


def load_model(path):
    kv = read_kv(path)
    kind = kv.get("model")
    if kind == "svm":
        return SvmModel.from_kv(kv)
    if kind == "mlp":
        return MlpModel.from_kv(kv)
    raise ValueError(f"{path}: unknown model type {kind!r}")


def cmd_eval(args, argv, say):
    model = load_model(args.model)
    ds = read_fuzzy_csv(args.input)
    report = evaluate(model, ds)
    wanted = {m.strip() for m in args.metrics.split(",")}
    if "auc" not in wanted:
        report.macro_auc = None
    entries = {"report": "metrics", "model_file": str(args.model), "data_file": str(args.input)}
    kv = report.to_kv()
    if "accuracy" in wanted:
        entries["accuracy"] = kv["accuracy"]
    if "balanced" in wanted:
        entries["balanced_accuracy"] = kv["balanced_accuracy"]
    if "auc" in wanted:
        entries["macro_auc"] = kv["macro_auc"]
    entries["recalls"] = kv["recalls"]
    entries["confusion"] = kv["confusion"]
    if args.out:
        write_kv(args.out, entries, header="classification metrics (confusion rows = truth)")
        _manifest(args.out, args, argv)
    say(report.format_table())


def cmd_sweep(args, argv, say):
    settings = _with_resolution(_settings(args), args.resolution)
    dataset = read_fuzzy_csv(args.input) if args.input else None
    results = sweep(
        args.param, args.values, settings, args.repeats, seed=args.seed, dataset=dataset,
        synthetic=_synthetic(args, max(args.k, 5)), select_on_val=args.select_on == "val", jobs=args.jobs,
    )
    write_csv_table(args.out, RESULT_HEADER, [r.row() for r in results])
    _manifest(args.out, args, argv)
    summary = summarize(results)
    out = Path(args.out)
    summary_path = out.with_name(f"{out.stem}_summary{out.suffix or '.csv'}")
    write_csv_table(summary_path, SUMMARY_HEADER, summary)
    _manifest(summary_path, args, argv)
    say(f"{'param':<10}{'accuracy':>18}{'balanced':>18}{'auc':>18}")
    for row in summary:
        say(f"{row[0]:<10}{row[8]:>18}{row[9]:>18}{row[10]:>18}")


def cmd_rademacher(args, argv, say):
    ds = read_fuzzy_csv(args.input)
    X = ds.defuzzify(args.defuzz)
    kernel = KernelSpec(args.kernel, args.gamma, args.degree, args.coef0).resolved(ds.p)
    gram = kernel.gram(X, X)
    K = args.classes or ds.K
    est = empirical_kernel_rademacher(gram, args.lam, K, args.draws, args.seed)
    r = float(np.sqrt(np.max(np.diag(gram))))
    bound = lemma1_bound(r, args.lam, K, ds.m) if r > 0 else 0.0
    entries = {"report": "rademacher", "kernel": kernel.kind, "gamma": float(kernel.gamma), "defuzz": args.defuzz,
               "m": ds.m, "K": K, "lambda": args.lam, "draws": args.draws, "estimate": est.mean,
               "stderr": est.stderr, "r": r, "lemma1_bound": bound}
    if args.out:
        write_kv(args.out, entries, header="empirical kernel Rademacher complexity")
        _manifest(args.out, args, argv)
    say(f"estimate {est.mean:.6g} ± {est.stderr:.2g} (SE, {args.draws} draws); bound {bound:.6g}")


def _metric_column(path, metric, param):
    header, rows = read_csv_table(path)
    if metric not in header:
        raise ValueError(f"{path}: no column {metric!r}")
    if param is not None:
        rows = [r for r in rows if r.get("param") == param]
    values = [float(r[metric]) for r in rows if r[metric] != ""]
    if not values:
        raise ValueError(f"{path}: no {metric} values" + (f" for param {param!r}" if param else ""))
    return values


def cmd_compare(args, argv, say):
    a = _metric_column(args.a, args.metric, args.param)
    b = _metric_column(args.b, args.metric, args.param)
    stat, p = wilcoxon_rank_sum(a, b)
    entries = {"report": "wilcoxon", "metric": args.metric, "n_a": len(a), "n_b": len(b),
               "mean_a": float(np.mean(a)), "mean_b": float(np.mean(b)), "statistic": stat, "p_two_sided": p}
    if args.out:
        write_kv(args.out, entries, header="Wilcoxon rank-sum test")
        _manifest(args.out, args, argv)
    say(f"{args.metric}: mean {np.mean(a):.4f} vs {np.mean(b):.4f}; rank sum {stat:g}; two-sided p = {p:.4g}")


COMMANDS = {
    "gen": cmd_gen, "convert": cmd_convert, "oversample": cmd_oversample, "split": cmd_split,
    "train": cmd_train, "eval": cmd_eval, "sweep": cmd_sweep, "rademacher": cmd_rademacher, "compare": cmd_compare,
}


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        validate(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    def say(msg: str) -> None:
        if not args.quiet:
            print(msg)

    try:
        COMMANDS[args.command](args, argv, say)
    except (OSError, ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())
