"""Train/select/evaluate protocols shared by the CLI, scripts and tests."""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .dataio import (
    FuzzyDataset,
    SplitSpec,
    SyntheticConfig,
    convert_intervals,
    generate_synthetic,
    split,
)
from .defuzz import DefuzzMethod
from .metrics import MetricsReport, mean_sd
from .mlp import TrainConfig, train_df_mlp
from .svm import KernelSpec, SvmModel, train_df_svm

RESULT_HEADER = ("param", "repeat", "accuracy", "balanced_accuracy", "auc")


@dataclass
class SvmSettings:
    method: str = "val"
    kernel: KernelSpec = field(default_factory=KernelSpec)
    C_grid: Sequence[float] = (1.0,)
    tol: float = 1e-3
    max_passes: int = 100


@dataclass
class MlpSettings:
    method: str = "val"
    arch: tuple[int, int] = (100, 100)
    cfg: TrainConfig = field(default_factory=TrainConfig)
    lr_grid: Sequence[float] = ()
    activation: str = "relu"


def model_scores(model, ds: FuzzyDataset) -> np.ndarray:
    if isinstance(model, SvmModel):
        return model.scores(ds.features)
    return model.predict_proba(ds.features)


def evaluate(model, ds: FuzzyDataset) -> MetricsReport:
    scores = model_scores(model, ds)
    preds = np.argmax(scores, axis=1)
    return MetricsReport.compute(preds, ds.y(), ds.n_classes, scores)


def fit(settings, train: FuzzyDataset, seed: int, **override):
    if isinstance(settings, SvmSettings):
        C = override.get("C", settings.C_grid[0])
        return train_df_svm(train, settings.method, settings.kernel, C, settings.tol, settings.max_passes, seed)
    cfg = replace(settings.cfg, seed=seed, lr=override.get("lr", settings.cfg.lr))
    return train_df_mlp(train, settings.arch, cfg, settings.method, settings.activation)


def fit_select(settings, train: FuzzyDataset, val: FuzzyDataset | None, seed: int):
    """Fit every grid candidate and keep the one with best validation accuracy.

    Ties keep the earliest candidate in grid order.
    """
    if isinstance(settings, SvmSettings):
        grid = [{"C": c} for c in settings.C_grid]
    else:
        grid = [{"lr": lr} for lr in settings.lr_grid] or [{}]
    if len(grid) == 1 or val is None:
        return fit(settings, train, seed, **grid[0]), grid[0]
    best = None
    for cand in grid:
        model = fit(settings, train, seed, **cand)
        acc = evaluate(model, val).accuracy
        if best is None or acc > best[0]:
            best = (acc, model, cand)
    return best[1], best[2]


@dataclass
class RunResult:
    param: str
    repeat: int
    report: MetricsReport
    chosen: dict

    def row(self) -> tuple:
        auc = self.report.macro_auc
        return (
            self.param,
            self.repeat,
            repr(self.report.accuracy),
            repr(self.report.balanced_accuracy),
            "" if auc is None else repr(auc),
        )


def run_once(ds: FuzzyDataset, settings, split_seed: int, train_seed: int, param: str = "", repeat: int = 0,
             select_on_val: bool = True) -> RunResult:
    train, val, test = split(ds, SplitSpec(seed=split_seed))
    model, chosen = fit_select(settings, train, val if select_on_val else None, train_seed)
    return RunResult(param, repeat, evaluate(model, test), chosen)


def run_seed(base: int, *keys: int) -> int:
    return int(np.random.SeedSequence([base, *keys]).generate_state(1)[0])


@dataclass
class SweepTask:
    param: str
    value: str
    index: int
    repeat: int
    seed: int
    settings: object
    dataset: FuzzyDataset | None = None
    synthetic: SyntheticConfig | None = None
    select_on_val: bool = True


def _run_task(task: SweepTask) -> RunResult:
    s = run_seed(task.seed, task.index, task.repeat)
    settings = task.settings
    if task.param == "m":
        base = task.synthetic or SyntheticConfig()
        cfg = replace(base, n=int(task.value), seed=s)
        ds = generate_synthetic(cfg)
    elif task.param == "beta":
        ds = convert_intervals(task.dataset, float(task.value))
    elif task.param == "defuzz":
        ds = task.dataset
        settings = replace(settings, method=DefuzzMethod.parse(task.value).name)
    else:
        raise ValueError(f"unknown sweep parameter {task.param!r}")
    return run_once(ds, settings, split_seed=s, train_seed=s, param=task.value, repeat=task.repeat,
                    select_on_val=task.select_on_val)


def sweep(param: str, values: Sequence, settings, repeats: int, seed: int = 0, dataset: FuzzyDataset | None = None,
          synthetic: SyntheticConfig | None = None, select_on_val: bool = True, jobs: int = 1) -> list[RunResult]:
    """Repeated train/evaluate runs for each value of ``param`` (m, beta or defuzz).

    Every run derives its seed from ``(seed, value index, repeat)``, so
    results do not depend on ``jobs`` or execution order.
    """
    if param in ("beta", "defuzz") and dataset is None:
        raise ValueError(f"sweeping {param} needs an input dataset")
    tasks = [
        SweepTask(param, str(v), i, r, seed, settings, dataset, synthetic, select_on_val)
        for i, v in enumerate(values)
        for r in range(repeats)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_task, tasks))
    return [_run_task(t) for t in tasks]


SUMMARY_HEADER = (
    "param", "repeats",
    "accuracy_mean", "accuracy_sd", "balanced_accuracy_mean", "balanced_accuracy_sd", "auc_mean", "auc_sd",
    "accuracy", "balanced_accuracy", "auc",
)


def summarize(results: Sequence[RunResult]) -> list[tuple]:
    """One row per parameter value with mean, sample sd and ``mean±sd`` strings."""
    rows = []
    for value, group in itertools.groupby(results, key=lambda r: r.param):
        group = list(group)
        acc = [g.report.accuracy for g in group]
        bal = [g.report.balanced_accuracy for g in group]
        auc = [g.report.macro_auc for g in group if g.report.macro_auc is not None]

        def stats(v):
            if not v:
                return "", ""
            return repr(float(np.mean(v))), repr(float(np.std(v, ddof=1)) if len(v) > 1 else 0.0)

        rows.append((value, len(group), *stats(acc), *stats(bal), *stats(auc),
                     mean_sd(acc), mean_sd(bal), mean_sd(auc) if auc else ""))
    return rows
