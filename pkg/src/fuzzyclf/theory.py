"""Rademacher complexity of the norm-bounded kernel hypothesis class.

For ``K`` score functions ``x -> <w_k, Phi(x)>`` with ``||w_k|| <= Lambda``
the supremum inside the empirical complexity has the closed form
``Lambda * ||sum_i sigma_ik Phi(x_i)||``, so only the expectation over the
signs needs Monte Carlo.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class MatrixError(ValueError):
    pass


@dataclass(frozen=True)
class RademacherEstimate:
    mean: float
    stderr: float
    draws: int
    Lambda: float
    K: int
    m: int


def empirical_kernel_rademacher(gram, Lambda: float, K: int = 1, T: int = 200, seed=0) -> RademacherEstimate:
    """Monte Carlo estimate of ``E_sigma[(Lambda/m) sum_k sqrt(sigma_k' G sigma_k)]``."""
    G = np.asarray(gram, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise MatrixError(f"gram must be square, got shape {G.shape}")
    if not Lambda > 0:
        raise ValueError(f"Lambda must be > 0, got {Lambda}")
    if K < 1 or T < 1:
        raise ValueError("K and T must be >= 1")
    if not np.allclose(G, G.T, atol=1e-8, rtol=0):
        raise MatrixError("gram matrix is not symmetric")
    m = G.shape[0]
    rng = np.random.default_rng(seed)
    sigma = rng.choice(np.array([-1.0, 1.0]), size=(T, K, m))
    quad = np.einsum("tkm,mn,tkn->tk", sigma, G, sigma, optimize=True)
    if quad.min() < -1e-8:
        raise MatrixError(f"gram is not positive semidefinite (quadratic form {quad.min():.3e})")
    per_draw = Lambda / m * np.sqrt(np.maximum(quad, 0.0)).sum(axis=1)
    stderr = float(per_draw.std(ddof=1) / math.sqrt(T)) if T > 1 else 0.0
    return RademacherEstimate(float(per_draw.mean()), stderr, T, float(Lambda), int(K), m)


def lemma1_bound(r: float, Lambda: float, K: int, m: int) -> float:
    """``K * sqrt(r^2 Lambda^2 / m)`` where ``r^2`` bounds the kernel diagonal."""
    if not (r > 0 and Lambda > 0):
        raise ValueError("r and Lambda must be > 0")
    if K < 1 or m < 1:
        raise ValueError("K and m must be >= 1")
    return K * math.sqrt(r**2 * Lambda**2 / m)


def theorem3_gap_bound(K: int, L_l: float, r: float, Lambda: float, C_l: float, delta: float, m: int) -> float:
    """Generalization-gap bound holding with probability at least ``1 - delta``:
    ``2 K L_l sqrt(2 r^2 Lambda^2 / m) + C_l sqrt(2 log(1/delta) / m)``.
    """
    if not all(v > 0 for v in (L_l, r, Lambda, C_l)):
        raise ValueError("L_l, r, Lambda and C_l must be > 0")
    if K < 1 or m < 1:
        raise ValueError("K and m must be >= 1")
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    return 2 * K * L_l * math.sqrt(2 * r**2 * Lambda**2 / m) + C_l * math.sqrt(2 * math.log(1 / delta) / m)
