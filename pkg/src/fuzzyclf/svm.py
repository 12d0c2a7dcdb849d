"""One-vs-rest kernel SVM on defuzzified features, solved by SMO."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kvformat
from .dataio import FuzzyDataset, SchemaError
from .defuzz import DefuzzMethod, defuzzify_rows
from .fuzzy_core import Feature

KERNELS = ("linear", "poly", "rbf")


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class ConvergenceWarning(UserWarning):
    pass


class DegenerateTrainingWarning(UserWarning):
    pass


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "rbf"
    gamma: float | None = None  # None -> 1/p at training time
    degree: int = 3
    coef0: float = 0.0

    def __post_init__(self):
        if self.kind not in KERNELS:
            raise ValueError(f"unknown kernel {self.kind!r}; choose from {', '.join(KERNELS)}")
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.degree < 1:
            raise ValueError(f"degree must be >= 1, got {self.degree}")
        if self.coef0 < 0:
            raise ValueError(f"coef0 must be >= 0, got {self.coef0}")

    def resolved(self, p: int) -> "KernelSpec":
        if self.gamma is not None:
            return self
        return KernelSpec(self.kind, 1.0 / max(p, 1), self.degree, self.coef0)

    def gram(self, X: np.ndarray, Z: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        if X.shape[1] != Z.shape[1]:
            raise ValueError(f"feature length mismatch: {X.shape[1]} vs {Z.shape[1]}")
        gamma = self.gamma if self.gamma is not None else 1.0 / max(X.shape[1], 1)
        if self.kind == "linear":
            return X @ Z.T
        if self.kind == "poly":
            return (gamma * (X @ Z.T) + self.coef0) ** self.degree
        sq = np.sum(X**2, axis=1)[:, None] + np.sum(Z**2, axis=1)[None, :] - 2.0 * (X @ Z.T)
        return np.exp(-gamma * np.maximum(sq, 0.0))


def kernel_eval(spec: KernelSpec, x, z) -> float:
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if x.shape != z.shape:
        raise ValueError(f"feature length mismatch: {x.shape} vs {z.shape}")
    return float(spec.gram(x[None, :], z[None, :])[0, 0])


@dataclass
class SmoResult:
    alpha: np.ndarray
    b: float
    n_iter: int
    converged: bool
    gap: float
    objective: list[float] = field(default_factory=list)


def dual_objective(alpha: np.ndarray, y: np.ndarray, K: np.ndarray) -> float:
    """``1/2 sum_ij a_i a_j y_i y_j K_ij - sum_i a_i`` (minimized)."""
    ay = alpha * y
    return float(0.5 * ay @ K @ ay - alpha.sum())


def smo_solve(
    K: np.ndarray,
    y: np.ndarray,
    C: float,
    tol: float = 1e-3,
    max_iter: int | None = None,
    rng: np.random.Generator | None = None,
    record_objective: bool = False,
) -> SmoResult:
    """Solve the binary C-SVM dual for Gram matrix ``K`` and labels ``y`` in {-1, +1}.

    Each step picks the maximal KKT-violating pair (ties broken at random
    by ``rng``) and updates it analytically. Stops when the violation gap
    ``max_up(-y*G) - min_low(-y*G)`` is at most ``tol``.
    """
    y = np.asarray(y, dtype=float)
    m = len(y)
    rng = rng if rng is not None else np.random.default_rng(0)
    max_iter = max_iter if max_iter is not None else 100 * max(m, 10)
    alpha = np.zeros(m)
    grad = -np.ones(m)  # G = Q alpha - 1
    pos = y > 0
    diag = np.diag(K).copy()
    objective = [0.0] if record_objective else []

    def pick(values: np.ndarray, mask: np.ndarray, best) -> int:
        cand = np.flatnonzero(mask)
        vals = values[cand]
        top = cand[vals == best(vals)]
        return int(top[0]) if len(top) == 1 else int(rng.choice(top))

    n_iter = 0
    converged = False
    gap = np.inf
    while True:
        up = (pos & (alpha < C)) | (~pos & (alpha > 0))
        low = (pos & (alpha > 0)) | (~pos & (alpha < C))
        if not up.any() or not low.any():
            converged, gap = True, 0.0
            break
        v = -y * grad
        v_up = np.where(up, v, -np.inf)
        v_low = np.where(low, v, np.inf)
        gap = float(v_up.max() - v_low.min())
        if gap <= tol:
            converged = True
            break
        if n_iter >= max_iter:
            break
        i = pick(v, up, np.max)
        j = pick(v, low, np.min)

        eta = diag[i] + diag[j] - 2.0 * K[i, j]
        room_i = C - alpha[i] if y[i] > 0 else alpha[i]
        room_j = alpha[j] if y[j] > 0 else C - alpha[j]
        step = min(room_i, room_j)
        if eta > 1e-12:
            step = min(step, (v[i] - v[j]) / eta)

        ai = alpha[i] + y[i] * step
        aj = alpha[j] - y[j] * step
        # land exactly on the box when the step is clipped by it
        if step == room_i:
            ai = C if y[i] > 0 else 0.0
        if step == room_j:
            aj = 0.0 if y[j] > 0 else C
        alpha[i] = min(max(ai, 0.0), C)
        alpha[j] = min(max(aj, 0.0), C)
        grad += step * y * (K[i] - K[j])
        n_iter += 1
        if record_objective:
            objective.append(float(0.5 * alpha @ (grad - 1.0)))

    v = -y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        b = float(np.mean(v[free]))
    else:
        up = (pos & (alpha < C)) | (~pos & (alpha > 0))
        low = (pos & (alpha > 0)) | (~pos & (alpha < C))
        lb = v[up].max() if up.any() else v[low].min()
        ub = v[low].min() if low.any() else lb
        b = float(0.5 * (lb + ub))
    return SmoResult(alpha, b, n_iter, converged, gap, objective)


@dataclass
class SvmModel:
    """Trained one-vs-rest DF-SVM.

    ``X`` holds the defuzzified training inputs shared by all ``K``
    sub-models; row ``l`` of ``alpha``/``signs`` is sub-problem ``l``
    (+1 iff the label is ``l``), and ``b[l]`` its bias.
    """

    kernel: KernelSpec
    C: float
    method: DefuzzMethod
    schema: tuple[str, ...]
    X: np.ndarray
    labels: np.ndarray
    alpha: np.ndarray
    b: np.ndarray
    converged: np.ndarray
    names: tuple[str, ...] = ()

    @property
    def n_classes(self) -> int:
        return len(self.b)

    @property
    def signs(self) -> np.ndarray:
        return np.where(self.labels[None, :] == np.arange(self.n_classes)[:, None], 1.0, -1.0)

    def decision_function(self, Xq: np.ndarray) -> np.ndarray:
        """Per-class scores ``(n, K)`` for already-defuzzified inputs."""
        Kq = self.kernel.gram(np.atleast_2d(Xq), self.X)
        return Kq @ (self.alpha * self.signs).T + self.b[None, :]

    def _check(self, rows: Sequence[Sequence[Feature]]):
        for i, row in enumerate(rows):
            kinds = tuple(f.kind for f in row)
            if kinds != self.schema:
                raise SchemaError(f"input {i} has feature kinds {kinds}, model expects {self.schema}")

    def scores(self, rows: Sequence[Sequence[Feature]]) -> np.ndarray:
        self._check(rows)
        return self.decision_function(defuzzify_rows(rows, self.method))

    def predict(self, rows: Sequence[Sequence[Feature]]) -> np.ndarray:
        return np.argmax(self.scores(rows), axis=1)

    def save(self, path) -> None:
        kvformat.write_kv(
            path,
            {
                "model": "svm",
                "kernel": self.kernel.kind,
                "gamma": float(self.kernel.gamma),
                "degree": self.kernel.degree,
                "coef0": self.kernel.coef0,
                "C": float(self.C),
                "defuzz": self.method.name,
                "resolution": self.method.resolution,
                "schema": " ".join(self.schema),
                "names": " ".join(self.names),
                "n_classes": self.n_classes,
                "X": self.X,
                "labels": self.labels.astype(int),
                "alpha": self.alpha,
                "b": self.b,
                "converged": self.converged.astype(int),
            },
            header="DF-SVM model (one-vs-rest)",
        )

    @classmethod
    def from_kv(cls, kv: dict[str, str]) -> "SvmModel":
        get = kvformat.get
        if get(kv, "model") != "svm":
            raise kvformat.KVFormatError("not an svm model file")
        kernel = KernelSpec(get(kv, "kernel"), get(kv, "gamma", float), get(kv, "degree", int), get(kv, "coef0", float))
        return cls(
            kernel=kernel,
            C=get(kv, "C", float),
            method=DefuzzMethod(get(kv, "defuzz"), get(kv, "resolution", int)),
            schema=tuple(get(kv, "schema").split()),
            X=kvformat.get_array(kv, "X"),
            labels=kvformat.get_array(kv, "labels", int),
            alpha=kvformat.get_array(kv, "alpha"),
            b=kvformat.get_array(kv, "b"),
            converged=kvformat.get_array(kv, "converged", int).astype(bool),
            names=tuple(get(kv, "names").split()),
        )

    @classmethod
    def load(cls, path) -> "SvmModel":
        return cls.from_kv(kvformat.read_kv(path))


def train_svm_crisp(
    X: np.ndarray,
    labels: np.ndarray,
    n_classes: int,
    spec: KernelSpec = KernelSpec(),
    C: float = 1.0,
    tol: float = 1e-3,
    max_passes: int = 100,
    seed=0,
):
    """One-vs-rest training on a real-valued design matrix.

    Returns ``(kernel, alpha, b, converged)`` with one row per class.
    """
    if not C > 0:
        raise ValueError(f"C must be > 0, got {C}")
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels, dtype=int)
    m = len(labels)
    if m == 0:
        raise ValueError("training set is empty")
    counts = np.bincount(labels, minlength=n_classes)
    if (counts == 0).any():
        missing = np.flatnonzero(counts == 0).tolist()
        raise ValueError(f"classes {missing} have no training instances")
    if (counts == 1).any():
        warnings.warn(
            f"classes {np.flatnonzero(counts == 1).tolist()} have a single training instance",
            DegenerateTrainingWarning,
            stacklevel=2,
        )
    kernel = spec.resolved(X.shape[1])
    gram = kernel.gram(X, X)
    rng = np.random.default_rng(seed)
    alpha = np.zeros((n_classes, m))
    b = np.zeros(n_classes)
    converged = np.zeros(n_classes, dtype=bool)
    for l in range(n_classes):
        y = np.where(labels == l, 1.0, -1.0)
        res = smo_solve(gram, y, C, tol=tol, max_iter=max_passes * max(m, 10), rng=rng)
        residual = abs(float(res.alpha @ y))
        if residual > 1e-8:
            raise ConvergenceError(f"class {l}: dual equality constraint violated", residual)
        if not res.converged:
            warnings.warn(
                f"class {l}: SMO stopped after {res.n_iter} updates with KKT gap {res.gap:.3e} > tol {tol}",
                ConvergenceWarning,
                stacklevel=2,
            )
        alpha[l], b[l], converged[l] = res.alpha, res.b, res.converged
    return kernel, alpha, b, converged


def train_df_svm(
    train: FuzzyDataset,
    method: "str | DefuzzMethod" = "val",
    spec: KernelSpec = KernelSpec(),
    C: float = 1.0,
    tol: float = 1e-3,
    max_passes: int = 100,
    seed=0,
) -> SvmModel:
    """Defuzzify once, then solve the ``K`` one-vs-rest duals by SMO."""
    method = DefuzzMethod.parse(method)
    X = train.defuzzify(method)
    labels = train.y()
    kernel, alpha, b, converged = train_svm_crisp(X, labels, train.n_classes, spec, C, tol, max_passes, seed)
    return SvmModel(kernel, float(C), method, train.schema, X, labels, alpha, b, converged, train.names)


def svm_scores(model: SvmModel, x: Sequence[Feature]) -> np.ndarray:
    return model.scores([x])[0]


def svm_predict(model: SvmModel, x: Sequence[Feature]) -> int:
    # np.argmax returns the first maximum: ties go to the lowest class index
    return int(np.argmax(svm_scores(model, x)))
