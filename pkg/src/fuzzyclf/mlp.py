"""Two-hidden-layer perceptron on defuzzified features, trained with Adam."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import kvformat
from .dataio import FuzzyDataset, SchemaError
from .defuzz import DefuzzMethod, defuzzify_rows
from .fuzzy_core import Feature

PROB_FLOOR = 1e-12
PARAM_NAMES = ("W1", "b1", "W2", "b2", "W0", "b0")
ACTIVATIONS = ("relu", "tanh")


class NumericError(FloatingPointError):
    def __init__(self, message: str, layer: int):
        super().__init__(f"layer {layer}: {message}")
        self.layer = layer


class TrainingError(RuntimeError):
    def __init__(self, message: str, epoch: int):
        super().__init__(f"epoch {epoch}: {message}")
        self.epoch = epoch


@dataclass
class TrainConfig:
    lr: float = 1e-3
    epochs: int = 200
    batch_size: int = 32
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if not self.lr > 0:
            raise ValueError(f"learning rate must be > 0, got {self.lr}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch size must be >= 1, got {self.batch_size}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("Adam betas must lie in [0, 1)")


@dataclass
class MlpParams:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    W0: np.ndarray
    b0: np.ndarray
    activation: str = "relu"

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        p, h1 = self.W1.shape
        h2 = self.W2.shape[1]
        K = self.W0.shape[1]
        shapes = {"b1": (h1,), "W2": (h1, h2), "b2": (h2,), "W0": (h2, K), "b0": (K,)}
        for name, shape in shapes.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")

    @property
    def arch(self) -> tuple[int, int, int, int]:
        return (self.W1.shape[0], self.W1.shape[1], self.W2.shape[1], self.W0.shape[1])

    @classmethod
    def init(cls, p: int, h1: int, h2: int, K: int, rng: np.random.Generator, activation: str = "relu") -> "MlpParams":
        def glorot(fan_in, fan_out):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            return rng.uniform(-limit, limit, size=(fan_in, fan_out))

        return cls(glorot(p, h1), np.zeros(h1), glorot(h1, h2), np.zeros(h2), glorot(h2, K), np.zeros(K), activation)

    @classmethod
    def zeros(cls, p: int, h1: int, h2: int, K: int, activation: str = "relu") -> "MlpParams":
        return cls(np.zeros((p, h1)), np.zeros(h1), np.zeros((h1, h2)), np.zeros(h2), np.zeros((h2, K)), np.zeros(K), activation)

    def as_dict(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def with_arrays(self, arrays: dict[str, np.ndarray]) -> "MlpParams":
        return replace(self, **arrays)


def _act(z: np.ndarray, kind: str) -> np.ndarray:
    return np.maximum(z, 0.0) if kind == "relu" else np.tanh(z)


def _act_grad(z: np.ndarray, a: np.ndarray, kind: str) -> np.ndarray:
    return (z > 0).astype(float) if kind == "relu" else 1.0 - a**2


def softmax(logits: np.ndarray) -> np.ndarray:
    z = np.asarray(logits, dtype=float)
    z = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=-1, keepdims=True)


def _forward(params: MlpParams, X: np.ndarray):
    act = params.activation
    z1 = X @ params.W1 + params.b1
    a1 = _act(z1, act)
    if not np.all(np.isfinite(a1)):
        raise NumericError("non-finite activation", 1)
    z2 = a1 @ params.W2 + params.b2
    a2 = _act(z2, act)
    if not np.all(np.isfinite(a2)):
        raise NumericError("non-finite activation", 2)
    logits = a2 @ params.W0 + params.b0
    if not np.all(np.isfinite(logits)):
        raise NumericError("non-finite logits", 3)
    return logits, (z1, a1, z2, a2)


def forward_crisp(params: MlpParams, X) -> tuple[np.ndarray, np.ndarray]:
    """Logits and softmax probabilities for real-valued inputs ``(n, p)``."""
    logits, _ = _forward(params, np.atleast_2d(np.asarray(X, dtype=float)))
    return logits, softmax(logits)


def forward(params: MlpParams, x: Sequence[Feature], method: "str | DefuzzMethod" = "val"):
    """Logits and probabilities for one fuzzy feature vector."""
    X = defuzzify_rows([x], method)
    logits, probs = forward_crisp(params, X)
    return logits[0], probs[0]


def cross_entropy(probs, y: int) -> float:
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-6:
        raise ValueError("probs must be a probability vector")
    if not 0 <= y < len(probs):
        raise ValueError(f"label {y} out of range for {len(probs)} classes")
    return float(-np.log(max(probs[y], PROB_FLOOR)))


def loss_and_grads(params: MlpParams, X: np.ndarray, y: np.ndarray):
    """Mean cross-entropy over the batch and its gradients."""
    n = len(y)
    logits, (z1, a1, z2, a2) = _forward(params, X)
    probs = softmax(logits)
    loss = float(-np.mean(np.log(np.maximum(probs[np.arange(n), y], PROB_FLOOR))))

    d_logits = probs.copy()
    d_logits[np.arange(n), y] -= 1.0
    d_logits /= n
    grads = {"W0": a2.T @ d_logits, "b0": d_logits.sum(axis=0)}
    d_z2 = (d_logits @ params.W0.T) * _act_grad(z2, a2, params.activation)
    grads["W2"] = a1.T @ d_z2
    grads["b2"] = d_z2.sum(axis=0)
    d_z1 = (d_z2 @ params.W2.T) * _act_grad(z1, a1, params.activation)
    grads["W1"] = X.T @ d_z1
    grads["b1"] = d_z1.sum(axis=0)
    return loss, grads


@dataclass
class AdamState:
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    t: int = 0

    @classmethod
    def zeros_like(cls, arrays: dict[str, np.ndarray]) -> "AdamState":
        return cls({k: np.zeros_like(a) for k, a in arrays.items()}, {k: np.zeros_like(a) for k, a in arrays.items()})


def adam_step(
    arrays: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    cfg: TrainConfig,
    decay: Sequence[str] = ("W1", "W2", "W0"),
) -> tuple[dict[str, np.ndarray], AdamState]:
    """One bias-corrected Adam update with decoupled weight decay on ``decay`` keys."""
    t = state.t + 1
    new_arrays, new_m, new_v = {}, {}, {}
    for key, value in arrays.items():
        g = grads[key]
        if g.shape != value.shape:
            raise ValueError(f"gradient for {key} has shape {g.shape}, parameter has {value.shape}")
        m = cfg.beta1 * state.m[key] + (1.0 - cfg.beta1) * g
        v = cfg.beta2 * state.v[key] + (1.0 - cfg.beta2) * g * g
        m_hat = m / (1.0 - cfg.beta1**t)
        v_hat = v / (1.0 - cfg.beta2**t)
        updated = value
        if key in decay and cfg.weight_decay:
            updated = updated * (1.0 - cfg.lr * cfg.weight_decay)
        new_arrays[key] = updated - cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.eps)
        new_m[key], new_v[key] = m, v
    return new_arrays, AdamState(new_m, new_v, t)


@dataclass
class MlpModel:
    params: MlpParams
    method: DefuzzMethod
    schema: tuple[str, ...]
    loss_trace: list[float] = field(default_factory=list)
    names: tuple[str, ...] = ()

    @property
    def n_classes(self) -> int:
        return self.params.W0.shape[1]

    def _check(self, rows):
        for i, row in enumerate(rows):
            kinds = tuple(f.kind for f in row)
            if kinds != self.schema:
                raise SchemaError(f"input {i} has feature kinds {kinds}, model expects {self.schema}")

    def predict_proba(self, rows: Sequence[Sequence[Feature]]) -> np.ndarray:
        self._check(rows)
        return forward_crisp(self.params, defuzzify_rows(rows, self.method))[1]

    def predict(self, rows: Sequence[Sequence[Feature]]) -> np.ndarray:
        return np.argmax(self.predict_proba(rows), axis=1)

    def save(self, path) -> None:
        p, h1, h2, K = self.params.arch
        entries = {
            "model": "mlp",
            "arch": f"{p} {h1} {h2} {K}",
            "activation": self.params.activation,
            "defuzz": self.method.name,
            "resolution": self.method.resolution,
            "schema": " ".join(self.schema),
            "names": " ".join(self.names),
        }
        entries.update(self.params.as_dict())
        entries["loss_trace"] = np.asarray(self.loss_trace, dtype=float)
        kvformat.write_kv(path, entries, header="DF-MLP model")

    @classmethod
    def from_kv(cls, kv: dict[str, str]) -> "MlpModel":
        get = kvformat.get
        if get(kv, "model") != "mlp":
            raise kvformat.KVFormatError("not an mlp model file")
        arrays = {name: kvformat.get_array(kv, name) for name in PARAM_NAMES}
        params = MlpParams(**arrays, activation=get(kv, "activation"))
        return cls(
            params=params,
            method=DefuzzMethod(get(kv, "defuzz"), get(kv, "resolution", int)),
            schema=tuple(get(kv, "schema").split()),
            loss_trace=kvformat.get_array(kv, "loss_trace").tolist(),
            names=tuple(get(kv, "names").split()),
        )

    @classmethod
    def load(cls, path) -> "MlpModel":
        return cls.from_kv(kvformat.read_kv(path))

    def save_loss_trace(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["epoch", "loss"])
            for epoch, loss in enumerate(self.loss_trace, start=1):
                w.writerow([epoch, repr(loss)])


def train_mlp_crisp(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    arch: tuple[int, int] = (100, 100),
    cfg: TrainConfig = TrainConfig(),
    activation: str = "relu",
) -> tuple[MlpParams, list[float]]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    m = len(y)
    if m == 0:
        raise ValueError("training set is empty")
    rng = np.random.default_rng(cfg.seed)
    params = MlpParams.init(X.shape[1], arch[0], arch[1], n_classes, rng, activation)
    arrays = params.as_dict()
    state = AdamState.zeros_like(arrays)
    trace = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(m)
        total = 0.0
        for start in range(0, m, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            try:
                loss, grads = loss_and_grads(params, X[idx], y[idx])
            except NumericError as exc:
                raise TrainingError(str(exc), epoch) from exc
            if not np.isfinite(loss):
                raise TrainingError("non-finite loss", epoch)
            arrays, state = adam_step(arrays, grads, state, cfg)
            params = params.with_arrays(arrays)
            total += loss * len(idx)
        trace.append(total / m)
    return params, trace


def train_df_mlp(
    train: FuzzyDataset,
    arch: tuple[int, int] = (100, 100),
    cfg: TrainConfig = TrainConfig(),
    method: "str | DefuzzMethod" = "val",
    activation: str = "relu",
) -> MlpModel:
    """Defuzzify once, then fit the network with seeded mini-batch Adam."""
    method = DefuzzMethod.parse(method)
    X = train.defuzzify(method)
    y = train.y()
    counts = np.bincount(y, minlength=train.n_classes)
    if (counts == 0).any():
        raise ValueError(f"classes {np.flatnonzero(counts == 0).tolist()} have no training instances")
    params, trace = train_mlp_crisp(X, y, train.n_classes, arch, cfg, activation)
    return MlpModel(params, method, train.schema, trace, train.names)


def mlp_predict(model: MlpModel, x: Sequence[Feature]) -> int:
    return int(model.predict([x])[0])
