"""Defuzzification operators mapping fuzzy numbers (and intervals) to reals.

MOM, COG, ALC and VAL act on every fuzzy number kind; M1 is the mean of
the four trapezoid parameters and M2 the midpoint of an interval. All
operators are available both per number and vectorized over parameter
arrays, which is what dataset-level defuzzification uses.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fuzzy_core import (
    CRISP,
    GAUSSIAN,
    INTERVAL,
    TRAPEZOIDAL,
    TRIANGULAR,
    ALPHA_MIN,
    Feature,
    FuzzyNumber,
    Interval,
)

METHODS = ("mom", "cog", "alc", "val", "m1", "m2")
DEFAULT_RESOLUTION = 1001


class DefuzzError(ValueError):
    """Defuzzifier not applicable to an input."""


class UnsupportedKindError(DefuzzError):
    pass


@dataclass(frozen=True)
class DefuzzMethod:
    name: str = "val"
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        name = self.name.lower()
        if name not in METHODS:
            raise DefuzzError(f"unknown defuzzifier {self.name!r}; choose from {', '.join(METHODS)}")
        if int(self.resolution) < 2:
            raise DefuzzError(f"resolution must be >= 2, got {self.resolution}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "resolution", int(self.resolution))

    @classmethod
    def parse(cls, value: "str | DefuzzMethod") -> "DefuzzMethod":
        if isinstance(value, DefuzzMethod):
            return value
        return cls(value)

    def __call__(self, feature: Feature) -> float:
        return defuzzify(feature, self)


def _as_trapezoid(kind: str, params: np.ndarray) -> np.ndarray:
    """Rows of ``(a1, b1, b2, a2)`` for triangular/trapezoidal/crisp rows."""
    if kind == TRAPEZOIDAL:
        return params
    if kind == TRIANGULAR:
        return params[:, [0, 1, 1, 2]]
    if kind == CRISP:
        return np.repeat(params[:, :1], 4, axis=1)
    raise UnsupportedKindError(f"{kind} has no trapezoid form")


def _trapezoid_cog(tp: np.ndarray) -> np.ndarray:
    # centroid of the trapezoid area, computed relative to a1 for stability
    origin = tp[:, 0]
    a1, b1, b2, a2 = (tp - origin[:, None]).T
    den = 3.0 * (a2 + b2 - a1 - b1)
    num = (a2**2 + b2**2 + a2 * b2) - (a1**2 + b1**2 + a1 * b1)
    safe = den > 0
    rel = np.where(safe, num / np.where(safe, den, 1.0), b1)
    return origin + rel


def _gaussian_cog(params: np.ndarray, resolution: int) -> np.ndarray:
    c, delta = params[:, 0], params[:, 1]
    # truncated support c +- delta*sqrt(-2 ln alpha_min), sampled symmetrically
    half = np.sqrt(-2.0 * np.log(ALPHA_MIN))
    u = np.linspace(-half, half, resolution)
    w = np.full(resolution, u[1] - u[0])
    w[0] = w[-1] = 0.5 * (u[1] - u[0])
    mu = np.exp(-0.5 * u**2)
    # membership in standardized units is shared by every row
    offset = np.sum(w * u * mu) / np.sum(w * mu)
    return c + delta * offset


def defuzzify_params(kind: str, params, method: "str | DefuzzMethod" = "val") -> np.ndarray:
    """Vectorized defuzzification of ``n`` numbers of one kind.

    ``params`` has shape ``(n, k)`` with ``k`` the parameter count of
    ``kind`` (``kind == "interval"`` takes ``(lo, hi)`` rows).
    """
    method = DefuzzMethod.parse(method)
    params = np.atleast_2d(np.asarray(params, dtype=float))
    name = method.name

    if kind == INTERVAL:
        if name != "m2":
            raise UnsupportedKindError(
                f"interval features need m2 or conversion to fuzzy numbers before {name}"
            )
        return 0.5 * (params[:, 0] + params[:, 1])
    if name == "m2":
        raise UnsupportedKindError(f"m2 applies to intervals, not {kind} fuzzy numbers")

    if kind == CRISP:
        return params[:, 0].copy()
    if kind == GAUSSIAN:
        if name == "m1":
            raise UnsupportedKindError("m1 is undefined for gaussian fuzzy numbers")
        if name == "cog":
            return _gaussian_cog(params, method.resolution)
        # symmetric membership: MOM, ALC and VAL all sit at the center
        return params[:, 0].copy()

    tp = _as_trapezoid(kind, params)
    a1, b1, b2, a2 = tp.T
    if name == "mom":
        return 0.5 * (b1 + b2)
    if name == "cog":
        return _trapezoid_cog(tp)
    if name in ("alc", "m1"):
        return (a1 + b1 + b2 + a2) / 4.0
    if name == "val":
        return (a1 + 2.0 * b1 + 2.0 * b2 + a2) / 6.0
    raise AssertionError(name)


def defuzzify(feature: Feature, method: "str | DefuzzMethod" = "val") -> float:
    if isinstance(feature, Interval):
        return float(defuzzify_params(INTERVAL, [feature.params], method)[0])
    return float(defuzzify_params(feature.kind, [feature.params], method)[0])


def mom(fz: FuzzyNumber) -> float:
    """Mean of the maximizers of the membership function."""
    return defuzzify(fz, "mom")


def cog(fz: FuzzyNumber, resolution: int = DEFAULT_RESOLUTION) -> float:
    """Centre of gravity of the membership function.

    Closed form for piecewise-linear shapes; Gaussian numbers use composite
    trapezoid quadrature with ``resolution`` points over the truncated support.
    """
    return defuzzify(fz, DefuzzMethod("cog", resolution))


def alc(fz: FuzzyNumber, resolution: int = DEFAULT_RESOLUTION) -> float:
    """Flat average of alpha-cut midpoints over ``alpha`` in ``(0, 1]``."""
    return defuzzify(fz, DefuzzMethod("alc", resolution))


def val(fz: FuzzyNumber, resolution: int = DEFAULT_RESOLUTION) -> float:
    """Alpha-weighted average of alpha-cut midpoints."""
    return defuzzify(fz, DefuzzMethod("val", resolution))


def m1(fz: FuzzyNumber) -> float:
    return defuzzify(fz, "m1")


def m2(iv: Interval) -> float:
    return defuzzify(iv, "m2")


def defuzzify_vector(fv: Sequence[Feature], method: "str | DefuzzMethod" = "val") -> np.ndarray:
    """Componentwise defuzzification of one feature vector."""
    method = DefuzzMethod.parse(method)
    out = np.empty(len(fv))
    for j, feature in enumerate(fv):
        try:
            out[j] = defuzzify(feature, method)
        except DefuzzError as exc:
            raise type(exc)(f"feature {j}: {exc}") from exc
    return out


def defuzzify_rows(rows: Sequence[Sequence[Feature]], method: "str | DefuzzMethod" = "val") -> np.ndarray:
    """Defuzzify a table of feature vectors into an ``(m, p)`` real matrix.

    Columns holding a single kind are processed in one vectorized call.
    """
    method = DefuzzMethod.parse(method)
    m = len(rows)
    p = len(rows[0]) if m else 0
    out = np.empty((m, p))
    for j in range(p):
        column = [row[j] for row in rows]
        kinds = {f.kind for f in column}
        try:
            if len(kinds) == 1:
                kind = kinds.pop()
                out[:, j] = defuzzify_params(kind, [f.params for f in column], method)
            else:
                out[:, j] = [defuzzify(f, method) for f in column]
        except DefuzzError as exc:
            raise type(exc)(f"feature {j}: {exc}") from exc
    return out

