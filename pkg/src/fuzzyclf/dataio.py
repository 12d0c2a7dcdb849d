"""Fuzzy datasets: construction, CSV I/O, synthetic generation, conversion,
oversampling and splitting."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .defuzz import DefuzzMethod, defuzzify_params, defuzzify_rows
from .fuzzy_core import (
    CRISP,
    GAUSSIAN,
    INTERVAL,
    N_PARAMS,
    TRAPEZOIDAL,
    TRIANGULAR,
    Feature,
    FuzzyDomainError,
    FuzzyNumber,
    Interval,
)

# CSV kind tag -> internal kind, and number of numeric cells per feature
CSV_TAGS = {"tri": TRIANGULAR, "trap": TRAPEZOIDAL, "gauss": GAUSSIAN, "crisp": CRISP, "interval": INTERVAL}
KIND_TAGS = {v: k for k, v in CSV_TAGS.items()}
N_CELLS = {**N_PARAMS, INTERVAL: 2}


class SchemaError(ValueError):
    """Instances disagree with the dataset schema."""


class CsvFormatError(ValueError):
    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.row = row
        self.column = column


class PartitionError(ValueError):
    pass


class InterpolationError(ValueError):
    pass


def make_feature(kind: str, params: Sequence[float]) -> Feature:
    if kind == INTERVAL:
        lo, hi = params
        return Interval(lo, hi)
    return FuzzyNumber(kind, tuple(params))


@dataclass(frozen=True)
class FuzzyDataset:
    """``m`` labeled feature vectors sharing a per-feature kind schema."""

    schema: tuple[str, ...]
    features: tuple[tuple[Feature, ...], ...]
    labels: tuple[int, ...]
    n_classes: int
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        schema = tuple(self.schema)
        features = tuple(tuple(row) for row in self.features)
        labels = tuple(int(y) for y in self.labels)
        names = tuple(self.names) or tuple(f"f{j + 1}" for j in range(len(schema)))
        if len(features) != len(labels):
            raise SchemaError(f"{len(features)} feature rows but {len(labels)} labels")
        if len(names) != len(schema):
            raise SchemaError("feature names do not match the schema length")
        for kind in schema:
            if kind not in N_CELLS:
                raise SchemaError(f"unknown feature kind {kind!r}")
        for i, row in enumerate(features):
            if len(row) != len(schema):
                raise SchemaError(f"instance {i} has {len(row)} features, schema has {len(schema)}")
            for j, (f, kind) in enumerate(zip(row, schema)):
                if f.kind != kind:
                    raise SchemaError(f"instance {i} feature {j} is {f.kind}, schema says {kind}")
        k = int(self.n_classes)
        bad = [y for y in labels if not 0 <= y < k]
        if bad:
            raise SchemaError(f"labels must lie in 0..{k - 1}, got {bad[0]}")
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "n_classes", k)
        object.__setattr__(self, "names", names)

    @property
    def m(self) -> int:
        return len(self.labels)

    @property
    def p(self) -> int:
        return len(self.schema)

    @property
    def K(self) -> int:
        return self.n_classes

    def __len__(self) -> int:
        return self.m

    def y(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=int)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y(), minlength=self.n_classes)

    def subset(self, indices) -> "FuzzyDataset":
        idx = [int(i) for i in indices]
        return FuzzyDataset(
            self.schema,
            tuple(self.features[i] for i in idx),
            tuple(self.labels[i] for i in idx),
            self.n_classes,
            self.names,
        )

    def defuzzify(self, method: "str | DefuzzMethod" = "val") -> np.ndarray:
        return defuzzify_rows(self.features, method)

    def param_matrix(self, j: int) -> np.ndarray:
        """Parameters of feature ``j`` stacked into an ``(m, k)`` array."""
        return np.array([row[j].params for row in self.features], dtype=float).reshape(self.m, N_CELLS[self.schema[j]])


def from_arrays(schema: Sequence[str], columns: Sequence[np.ndarray], labels, n_classes: int, names=()) -> FuzzyDataset:
    """Build a dataset from per-feature parameter arrays of shape ``(m, k)``."""
    m = len(labels)
    rows = []
    for i in range(m):
        rows.append(tuple(make_feature(kind, col[i]) for kind, col in zip(schema, columns)))
    return FuzzyDataset(tuple(schema), tuple(rows), tuple(int(y) for y in labels), n_classes, tuple(names))


# -- synthetic data ---------------------------------------------------------


@dataclass(frozen=True)
class SyntheticConfig:
    n: int = 2000
    p: int = 20
    K: int = 5
    seed: int = 0
    spread: float = 10.0
    sigma: float = 1.0
    # fixes the class centers independently of ``seed`` when set
    center_seed: int | None = None
    clusters_per_class: int = 1

    def __post_init__(self):
        if self.K < 1 or self.p < 1:
            raise ValueError("need K >= 1 and p >= 1")
        if self.n < self.K:
            raise ValueError(f"n={self.n} must be at least K={self.K}")
        if self.spread < 0 or self.sigma < 0:
            raise ValueError("spread and sigma must be nonnegative")
        if self.clusters_per_class < 1:
            raise ValueError("clusters_per_class must be >= 1")


def _true_values(cfg: SyntheticConfig, rng: np.random.Generator):
    center_rng = rng if cfg.center_seed is None else np.random.default_rng(cfg.center_seed)
    q = cfg.clusters_per_class
    centers = center_rng.uniform(0.0, cfg.spread, size=(cfg.K * q, cfg.p))
    counts = np.full(cfg.K, cfg.n // cfg.K)
    counts[: cfg.n % cfg.K] += 1
    labels = np.repeat(np.arange(cfg.K), counts)
    component = labels * q + (rng.integers(q, size=cfg.n) if q > 1 else 0)
    x = centers[component] + cfg.sigma * rng.standard_normal((cfg.n, cfg.p))
    order = rng.permutation(cfg.n)
    return x[order], labels[order]


def generate_synthetic(cfg: SyntheticConfig) -> FuzzyDataset:
    """Triangular fuzzy observations ``(x - a, x + b, x + c)`` of Gaussian class data.

    Class centers are uniform on ``[0, spread]^p``; true values are normal
    around their class center with standard deviation ``sigma``. With
    ``clusters_per_class > 1`` each class is an equal mixture of that many
    centers. ``a``,
    ``b`` and ``c`` are drawn from U[1.5, 3], U[-0.5, 0.5] and U[2, 4].
    """
    rng = np.random.default_rng(cfg.seed)
    x, labels = _true_values(cfg, rng)
    a = rng.uniform(1.5, 3.0, size=x.shape)
    b = rng.uniform(-0.5, 0.5, size=x.shape)
    c = rng.uniform(2.0, 4.0, size=x.shape)
    tri = np.stack([x - a, x + b, x + c], axis=-1)
    columns = [tri[:, j, :] for j in range(cfg.p)]
    return from_arrays((TRIANGULAR,) * cfg.p, columns, labels, cfg.K)


def generate_synthetic_intervals(cfg: SyntheticConfig) -> FuzzyDataset:
    """Interval observations ``[x - a, x + c]`` of the same class data."""
    rng = np.random.default_rng(cfg.seed)
    x, labels = _true_values(cfg, rng)
    a = rng.uniform(1.5, 3.0, size=x.shape)
    c = rng.uniform(2.0, 4.0, size=x.shape)
    iv = np.stack([x - a, x + c], axis=-1)
    columns = [iv[:, j, :] for j in range(cfg.p)]
    return from_arrays((INTERVAL,) * cfg.p, columns, labels, cfg.K)


# -- interval conversion ----------------------------------------------------


def interval_to_fuzzy(iv: Interval, beta: float) -> FuzzyNumber:
    """Triangular number ``(A, beta*A + (1-beta)*B, B)`` for ``iv = [A, B]``."""
    if not 0.0 <= beta <= 1.0:
        raise FuzzyDomainError(f"beta must lie in [0, 1], got {beta}")
    lo, hi = iv.lo, iv.hi
    apex = beta * lo + (1.0 - beta) * hi
    return FuzzyNumber.triangular(lo, min(max(apex, lo), hi), hi)


def convert_intervals(ds: FuzzyDataset, beta: float) -> FuzzyDataset:
    """Replace every interval feature with its triangular conversion."""
    schema = tuple(TRIANGULAR if k == INTERVAL else k for k in ds.schema)
    rows = tuple(
        tuple(interval_to_fuzzy(f, beta) if isinstance(f, Interval) else f for f in row)
        for row in ds.features
    )
    return FuzzyDataset(schema, rows, ds.labels, ds.n_classes, ds.names)


# -- oversampling -----------------------------------------------------------


def _embedding(ds: FuzzyDataset) -> np.ndarray:
    # VAL for fuzzy features, midpoints for intervals
    cols = []
    for j, kind in enumerate(ds.schema):
        params = ds.param_matrix(j)
        if kind == INTERVAL:
            cols.append(0.5 * (params[:, 0] + params[:, 1]))
        else:
            cols.append(defuzzify_params(kind, params, "val"))
    return np.stack(cols, axis=1) if cols else np.zeros((ds.m, 0))


def smote_oversample(ds: FuzzyDataset, target_per_class: int, k_neighbors: int = 5, seed=0) -> FuzzyDataset:
    """SMOTE-style oversampling in fuzzy-parameter space.

    Each class below ``target_per_class`` is topped up with convex
    combinations ``lam*u + (1-lam)*v`` of parameter tuples, where ``v`` is
    one of the ``k_neighbors`` nearest same-class neighbours of ``u``
    (Euclidean distance on VAL-defuzzified features). Originals are kept.
    """
    if k_neighbors < 1:
        raise ValueError("k_neighbors must be >= 1")
    rng = np.random.default_rng(seed)
    counts = ds.class_counts()
    y = ds.y()
    emb = _embedding(ds)
    params = [ds.param_matrix(j) for j in range(ds.p)]

    new_rows: list[tuple[Feature, ...]] = []
    new_labels: list[int] = []
    for k in range(ds.n_classes):
        need = int(target_per_class) - int(counts[k])
        if need <= 0:
            continue
        members = np.flatnonzero(y == k)
        if len(members) < 2:
            raise InterpolationError(
                f"class {k} has {len(members)} instance(s); at least 2 are needed to interpolate"
            )
        sub = emb[members]
        dist = np.sum((sub[:, None, :] - sub[None, :, :]) ** 2, axis=-1)
        np.fill_diagonal(dist, np.inf)
        kk = min(k_neighbors, len(members) - 1)
        neighbours = np.argsort(dist, axis=1, kind="stable")[:, :kk]
        for _ in range(need):
            u = rng.integers(len(members))
            v = neighbours[u, rng.integers(kk)]
            lam = rng.uniform()
            iu, iv = members[u], members[v]
            row = []
            for j, kind in enumerate(ds.schema):
                mixed = lam * params[j][iu] + (1.0 - lam) * params[j][iv]
                # convex combinations of ordered tuples stay ordered up to rounding
                mixed = np.maximum.accumulate(mixed) if kind in (TRIANGULAR, TRAPEZOIDAL, INTERVAL) else mixed
                row.append(make_feature(kind, mixed))
            new_rows.append(tuple(row))
            new_labels.append(k)

    if not new_rows:
        return ds
    return FuzzyDataset(
        ds.schema, ds.features + tuple(new_rows), ds.labels + tuple(new_labels), ds.n_classes, ds.names
    )


# -- splitting --------------------------------------------------------------


@dataclass(frozen=True)
class SplitSpec:
    train: float = 0.6
    val: float = 0.2
    test: float = 0.2
    seed: int = 0

    def __post_init__(self):
        fracs = (self.train, self.val, self.test)
        if any(f <= 0 for f in fracs):
            raise ValueError(f"split fractions must be positive, got {fracs}")
        if abs(sum(fracs) - 1.0) > 1e-12:
            raise ValueError(f"split fractions must sum to 1, got {sum(fracs)}")

    def sizes(self, m: int) -> tuple[int, int, int]:
        n_val = int(round(m * self.val))
        n_test = int(round(m * self.test))
        return m - n_val - n_test, n_val, n_test


def split(ds: FuzzyDataset, spec: SplitSpec = SplitSpec()):
    """Seeded random train/validation/test partition (remainder goes to train)."""
    if ds.m < 3:
        raise PartitionError(f"need at least 3 instances to split, got {ds.m}")
    n_train, n_val, n_test = spec.sizes(ds.m)
    if min(n_train, n_val, n_test) <= 0:
        raise PartitionError(f"split of m={ds.m} gives an empty partition {(n_train, n_val, n_test)}")
    perm = np.random.default_rng(spec.seed).permutation(ds.m)
    return (
        ds.subset(perm[:n_train]),
        ds.subset(perm[n_train : n_train + n_val]),
        ds.subset(perm[n_train + n_val :]),
    )


# -- CSV --------------------------------------------------------------------


def write_fuzzy_csv(ds: FuzzyDataset, path) -> None:
    header = [f"{name}:{KIND_TAGS[kind]}" for name, kind in zip(ds.names, ds.schema)] + ["label"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row, label in zip(ds.features, ds.labels):
            cells = [repr(v) for f in row for v in f.params]
            w.writerow(cells + [str(label)])


def _parse_header(header: list[str]):
    names, kinds, label_col = [], [], None
    for col, cell in enumerate(header, start=1):
        cell = cell.strip()
        if cell == "label":
            if label_col is not None:
                raise CsvFormatError("duplicate label column", row=1, column=col)
            label_col = len(kinds)
            continue
        if ":" not in cell:
            raise CsvFormatError(f"header cell {cell!r} is not of the form name:kind", row=1, column=col)
        name, tag = cell.rsplit(":", 1)
        if tag not in CSV_TAGS:
            raise CsvFormatError(f"unknown kind tag {tag!r}; expected one of {sorted(CSV_TAGS)}", row=1, column=col)
        names.append(name)
        kinds.append(CSV_TAGS[tag])
    if label_col is None:
        raise CsvFormatError("header has no label column", row=1)
    return names, kinds, label_col


def read_fuzzy_csv(path) -> FuzzyDataset:
    """Read a fuzzy CSV file; errors carry 1-based row and column positions."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError("empty file", row=1) from None
        names, kinds, label_pos = _parse_header(header)
        widths = [N_CELLS[k] for k in kinds]
        n_cells = sum(widths) + 1
        # cell offset at which the label sits
        label_cell = sum(widths[:label_pos])

        rows, labels = [], []
        for line_no, cells in enumerate(reader, start=2):
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) != n_cells:
                raise CsvFormatError(f"expected {n_cells} cells, found {len(cells)}", row=line_no)
            label_raw = cells[label_cell]
            values = cells[:label_cell] + cells[label_cell + 1 :]
            try:
                label = int(label_raw)
            except ValueError:
                raise CsvFormatError(f"label {label_raw!r} is not an integer", row=line_no, column=label_cell + 1) from None
            feats = []
            pos = 0
            for j, (kind, width) in enumerate(zip(kinds, widths)):
                chunk = values[pos : pos + width]
                col = pos + 1 + (1 if pos >= label_cell else 0)
                try:
                    nums = [float(v) for v in chunk]
                except ValueError:
                    raise CsvFormatError(f"non-numeric value in feature {names[j]!r}", row=line_no, column=col) from None
                try:
                    feats.append(make_feature(kind, nums))
                except FuzzyDomainError as exc:
                    raise CsvFormatError(f"feature {names[j]!r}: {exc}", row=line_no, column=col) from None
                pos += width
            if label < 0:
                raise CsvFormatError(f"negative label {label}", row=line_no, column=label_cell + 1)
            rows.append(tuple(feats))
            labels.append(label)

    n_classes = max(labels) + 1 if labels else 0
    return FuzzyDataset(tuple(kinds), tuple(rows), tuple(labels), n_classes, tuple(names))


def write_csv_table(path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def read_csv_table(path) -> tuple[list[str], list[dict[str, str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return list(reader.fieldnames or []), list(reader)

