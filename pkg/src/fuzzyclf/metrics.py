"""Classification metrics and the Wilcoxon rank-sum comparison test."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, rankdata

from . import kvformat


class UndefinedRecallError(ValueError):
    pass


def _pair(preds, truths) -> tuple[np.ndarray, np.ndarray]:
    preds = np.asarray(preds, dtype=int).ravel()
    truths = np.asarray(truths, dtype=int).ravel()
    if len(preds) != len(truths):
        raise ValueError(f"length mismatch: {len(preds)} predictions, {len(truths)} truths")
    if len(preds) == 0:
        raise ValueError("empty input")
    return preds, truths


def accuracy(preds, truths) -> float:
    preds, truths = _pair(preds, truths)
    return float(np.mean(preds == truths))


def confusion_matrix(preds, truths, K: int) -> np.ndarray:
    """``K x K`` counts with rows indexed by the true class."""
    preds, truths = _pair(preds, truths)
    cm = np.zeros((K, K), dtype=int)
    np.add.at(cm, (truths, preds), 1)
    return cm


def per_class_recall(preds, truths, K: int) -> np.ndarray:
    cm = confusion_matrix(preds, truths, K)
    support = cm.sum(axis=1)
    if (support == 0).any():
        raise UndefinedRecallError(f"classes {np.flatnonzero(support == 0).tolist()} are absent from the truths")
    return np.diag(cm) / support


def balanced_accuracy(preds, truths, K: int) -> float:
    return float(np.mean(per_class_recall(preds, truths, K)))


def binary_auc(scores, positive) -> float:
    """Mann-Whitney AUC with mid-ranks for ties."""
    scores = np.asarray(scores, dtype=float)
    positive = np.asarray(positive, dtype=bool)
    n_pos = int(positive.sum())
    n_neg = len(positive) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedRecallError("AUC needs both positive and negative instances")
    ranks = rankdata(scores)
    u = ranks[positive].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def macro_auc(scores, truths) -> float:
    """Mean one-vs-rest AUC over the columns of an ``(m, K)`` score matrix."""
    scores = np.asarray(scores, dtype=float)
    truths = np.asarray(truths, dtype=int)
    if scores.ndim != 2 or scores.shape[0] != len(truths):
        raise ValueError("scores must have shape (m, K) matching the truths")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    K = scores.shape[1]
    return float(np.mean([binary_auc(scores[:, k], truths == k) for k in range(K)]))


def wilcoxon_rank_sum(sample_a, sample_b) -> tuple[float, float]:
    """Rank-sum statistic of ``sample_a`` and its two-sided p-value.

    Normal approximation with tie-corrected variance and a 0.5
    continuity correction.
    """
    a = np.asarray(sample_a, dtype=float).ravel()
    b = np.asarray(sample_b, dtype=float).ravel()
    n1, n2 = len(a), len(b)
    if n1 == 0 or n2 == 0:
        raise ValueError("both samples must be nonempty")
    ranks = rankdata(np.concatenate([a, b]))
    w = float(ranks[:n1].sum())
    n = n1 + n2
    mean = n1 * (n + 1) / 2.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(tie_counts**3 - tie_counts)) / (n * (n - 1)) if n > 1 else 0.0
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var <= 0:
        return w, 1.0
    z = max(abs(w - mean) - 0.5, 0.0) / math.sqrt(var)
    p = float(min(1.0, 2.0 * norm.sf(z)))
    return w, p


@dataclass
class MetricsReport:
    accuracy: float
    balanced_accuracy: float
    recalls: np.ndarray
    confusion: np.ndarray
    macro_auc: float | None = None

    @classmethod
    def compute(cls, preds, truths, K: int, scores=None) -> "MetricsReport":
        cm = confusion_matrix(preds, truths, K)
        support = cm.sum(axis=1)
        present = support > 0
        recalls = np.where(present, np.diag(cm) / np.maximum(support, 1), np.nan)
        bal = float(np.mean(recalls[present]))
        auc = None
        if scores is not None and present.all():
            auc = macro_auc(scores, truths)
        return cls(float(np.trace(cm) / cm.sum()), bal, recalls, cm, auc)

    def to_kv(self) -> dict:
        entries = {
            "report": "metrics",
            "accuracy": self.accuracy,
            "balanced_accuracy": self.balanced_accuracy,
            "macro_auc": "none" if self.macro_auc is None else self.macro_auc,
            "recalls": self.recalls,
            "confusion": self.confusion,
        }
        return entries

    def save(self, path) -> None:
        kvformat.write_kv(path, self.to_kv(), header="classification metrics (confusion rows = truth)")

    def format_table(self) -> str:
        lines = [
            f"{'accuracy':<20}{self.accuracy:>10.4f}",
            f"{'balanced_accuracy':<20}{self.balanced_accuracy:>10.4f}",
        ]
        if self.macro_auc is not None:
            lines.append(f"{'macro_auc':<20}{self.macro_auc:>10.4f}")
        K = len(self.recalls)
        lines.append("")
        lines.append(f"{'class':<8}{'recall':>10}  " + " ".join(f"{k:>6}" for k in range(K)))
        for k in range(K):
            row = " ".join(f"{c:>6d}" for c in self.confusion[k])
            lines.append(f"{k:<8}{self.recalls[k]:>10.4f}  {row}")
        return "\n".join(lines)


def mean_sd(values) -> str:
    """``mean±sd`` with sample standard deviation."""
    v = np.asarray(values, dtype=float)
    sd = float(np.std(v, ddof=1)) if len(v) > 1 else 0.0
    return f"{np.mean(v):.4f}±{sd:.4f}"
