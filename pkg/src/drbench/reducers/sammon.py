"""Sammon mapping: distance-ratio weighted stress minimized by line search."""

import numpy as np

from ..geometry import pairwise_distances
from .base import (
    Embedding,
    Param,
    jittered_pca_init,
    line_search_descent,
    low_dim_distances,
    reducer_rng,
    resolve_params,
)

SCHEMA = (
    Param("learning_rate", float, 1.0, low=1e-12),
    Param("max_iter", int, 100, low=1),
    Param("jitter", float, 1e-4, low=0.0),
)

_EPS = 1e-12


def _stress_context(d_hi: np.ndarray):
    """Precompute the fixed pieces: c = sum_{i<j} D_ij and off-diagonal 1/D."""
    inv = np.zeros_like(d_hi)
    off = ~np.eye(d_hi.shape[0], dtype=bool)
    inv[off] = 1.0 / d_hi[off]
    c = d_hi[off].sum() / 2.0
    return c, inv


def _stress(y, d_hi, c, inv) -> float:
    diff = d_hi - low_dim_distances(y)
    return float((diff * diff * inv).sum() / (2.0 * c))


def _stress_grad(y, d_hi, c, inv) -> tuple[float, np.ndarray]:
    d_lo = low_dim_distances(y)
    diff = d_hi - d_lo
    stress = float((diff * diff * inv).sum() / (2.0 * c))
    f = diff * inv / np.maximum(d_lo, _EPS)
    grad = -(2.0 / c) * (f.sum(axis=1)[:, None] * y - f @ y)
    return stress, grad


def sammon_stress(y: np.ndarray, d_hi: np.ndarray) -> float:
    """Stress = (1/c) sum_{i<j} (D_ij - d_ij)^2 / D_ij with c = sum_{i<j} D_ij."""
    c, inv = _stress_context(d_hi)
    return _stress(y, d_hi, c, inv)


def sammon_stress_grad(y: np.ndarray, d_hi: np.ndarray) -> tuple[float, np.ndarray]:
    """Stress and its analytic gradient with respect to the layout."""
    c, inv = _stress_context(d_hi)
    return _stress_grad(y, d_hi, c, inv)


def sammon(points: np.ndarray, params: dict | None = None, seed: int = 0, dim: int = 2) -> Embedding:
    """Minimize Sammon stress from a jittered PCA start.

    Coincident input points would make the stress undefined, so duplicates are
    separated by a deterministic 1e-9-scale perturbation before the distance
    matrix is formed.
    """
    p = resolve_params("sammon", SCHEMA, params)
    x = np.asarray(points, dtype=float)
    d_hi = pairwise_distances(x).values
    off = ~np.eye(x.shape[0], dtype=bool)
    if np.any(d_hi[off] == 0.0):
        mean_d = d_hi[off].mean()
        scale = 1e-9 * (mean_d if mean_d > 0 else 1.0)
        x = x + scale * reducer_rng("sammon", seed).standard_normal(x.shape)
        d_hi = pairwise_distances(x).values
        if np.any(d_hi[off] == 0.0):
            raise ValueError("could not separate duplicate points")

    c, inv = _stress_context(d_hi)
    y0 = jittered_pca_init(x, dim, "sammon", seed, p["jitter"])
    y, stress, iterations, converged = line_search_descent(
        y0,
        lambda y: _stress(y, d_hi, c, inv),
        lambda y: _stress_grad(y, d_hi, c, inv),
        step0=p["learning_rate"],
        max_iter=p["max_iter"],
    )
    y = y - y.mean(axis=0)
    provenance = {
        "algorithm": "sammon",
        "params": p,
        "seed": int(seed),
        "iterations": iterations,
        "objective": stress,
        "converged": converged,
    }
    return Embedding(y, provenance)
