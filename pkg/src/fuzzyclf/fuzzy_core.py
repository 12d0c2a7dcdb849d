"""Fuzzy number value types: membership evaluation, alpha-cuts and supports."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

TRIANGULAR = "triangular"
TRAPEZOIDAL = "trapezoidal"
GAUSSIAN = "gaussian"
CRISP = "crisp"
INTERVAL = "interval"

N_PARAMS = {TRIANGULAR: 3, TRAPEZOIDAL: 4, GAUSSIAN: 2, CRISP: 1}

# Gaussian supports are truncated at this membership level.
ALPHA_MIN = 1e-6


class FuzzyDomainError(ValueError):
    """Invalid fuzzy number parameters or alpha level."""


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise FuzzyDomainError(f"interval bounds must be finite, got [{lo}, {hi}]")
        if lo > hi:
            raise FuzzyDomainError(f"interval requires lo <= hi, got [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    kind = INTERVAL

    @property
    def params(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __contains__(self, t: float) -> bool:
        return self.lo <= t <= self.hi


@dataclass(frozen=True)
class FuzzyNumber:
    """A triangular, trapezoidal, Gaussian or crisp fuzzy number.

    ``params`` holds the characterizing tuple of the kind:
    triangular ``(a1, b1, a2)``, trapezoidal ``(a1, b1, b2, a2)``,
    gaussian ``(c, delta)`` and crisp ``(c,)``. Ties in the ordering
    constraints are legal, so degenerate shapes are valid values.
    """

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in N_PARAMS:
            raise FuzzyDomainError(f"unknown fuzzy number kind {self.kind!r}")
        params = tuple(float(v) for v in self.params)
        if len(params) != N_PARAMS[self.kind]:
            raise FuzzyDomainError(
                f"{self.kind} takes {N_PARAMS[self.kind]} parameters, got {len(params)}"
            )
        if not all(math.isfinite(v) for v in params):
            raise FuzzyDomainError(f"non-finite parameter in {self.kind}{params}")
        if self.kind in (TRIANGULAR, TRAPEZOIDAL):
            if any(x > y for x, y in zip(params, params[1:])):
                raise FuzzyDomainError(f"{self.kind} parameters must be nondecreasing, got {params}")
        elif self.kind == GAUSSIAN and params[1] <= 0:
            raise FuzzyDomainError(f"gaussian spread must be > 0, got {params[1]}")
        object.__setattr__(self, "params", params)

    @classmethod
    def triangular(cls, a1: float, b1: float, a2: float) -> "FuzzyNumber":
        return cls(TRIANGULAR, (a1, b1, a2))

    @classmethod
    def trapezoidal(cls, a1: float, b1: float, b2: float, a2: float) -> "FuzzyNumber":
        return cls(TRAPEZOIDAL, (a1, b1, b2, a2))

    @classmethod
    def gaussian(cls, c: float, delta: float) -> "FuzzyNumber":
        return cls(GAUSSIAN, (c, delta))

    @classmethod
    def crisp(cls, c: float) -> "FuzzyNumber":
        return cls(CRISP, (c,))

    def trapezoid_params(self) -> tuple[float, float, float, float]:
        """``(a1, b1, b2, a2)`` view of a piecewise-linear or crisp number."""
        if self.kind == TRAPEZOIDAL:
            return self.params  # type: ignore[return-value]
        if self.kind == TRIANGULAR:
            a1, b1, a2 = self.params
            return (a1, b1, b1, a2)
        if self.kind == CRISP:
            (c,) = self.params
            return (c, c, c, c)
        raise FuzzyDomainError("gaussian fuzzy numbers have no trapezoid form")

    def membership(self, t):
        return membership(self, t)

    def alpha_cut(self, alpha: float) -> Interval:
        return alpha_cut(self, alpha)

    def support(self) -> Interval:
        return support(self)


Feature = Union[FuzzyNumber, Interval]
FuzzyVector = Sequence[FuzzyNumber]


def membership(fz: FuzzyNumber, t):
    """Membership degree of ``t`` (scalar or array) in ``fz``."""
    t_arr = np.asarray(t, dtype=float)
    if fz.kind == GAUSSIAN:
        c, delta = fz.params
        out = np.exp(-((t_arr - c) ** 2) / (2.0 * delta**2))
    else:
        a1, b1, b2, a2 = fz.trapezoid_params()
        out = np.zeros_like(t_arr)
        out[(t_arr >= b1) & (t_arr <= b2)] = 1.0
        if b1 > a1:
            rising = (t_arr > a1) & (t_arr < b1)
            out[rising] = (t_arr[rising] - a1) / (b1 - a1)
        if a2 > b2:
            falling = (t_arr > b2) & (t_arr < a2)
            out[falling] = (a2 - t_arr[falling]) / (a2 - b2)
    if np.ndim(t) == 0:
        return float(out)
    return out


def alpha_cut(fz: FuzzyNumber, alpha: float) -> Interval:
    """The closed set ``{t : membership(t) >= alpha}`` for ``0 < alpha <= 1``."""
    if not (0.0 < alpha <= 1.0):
        raise FuzzyDomainError(f"alpha must lie in (0, 1], got {alpha}")
    if fz.kind == GAUSSIAN:
        c, delta = fz.params
        half = delta * math.sqrt(-2.0 * math.log(alpha))
        lo, hi, core_lo, core_hi = c - half, c + half, c, c
    else:
        a1, b1, b2, a2 = fz.trapezoid_params()
        core_lo, core_hi = b1, b2
        lo = min(a1 + alpha * (b1 - a1), b1)
        hi = max(a2 - alpha * (a2 - b2), b2)
    # pull endpoints inward by ulps until membership agrees with alpha
    for _ in range(64):
        if lo >= core_lo or membership(fz, lo) >= alpha:
            break
        lo = math.nextafter(lo, core_lo)
    for _ in range(64):
        if hi <= core_hi or membership(fz, hi) >= alpha:
            break
        hi = math.nextafter(hi, core_hi)
    return Interval(lo, hi)


def support(fz: FuzzyNumber) -> Interval:
    if fz.kind == GAUSSIAN:
        return alpha_cut(fz, ALPHA_MIN)
    a1, _, _, a2 = fz.trapezoid_params()
    return Interval(a1, a2)
