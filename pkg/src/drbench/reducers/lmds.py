"""Local multidimensional scaling: MDS attraction on neighbor pairs plus a
linear repulsion on everything else (Chen & Buja style stress)."""

import numpy as np

from ..geometry import DistanceMatrix, pairwise_distances, rank_matrix
from .base import (
    Embedding,
    Param,
    jittered_pca_init,
    line_search_descent,
    low_dim_distances,
    resolve_params,
)

SCHEMA = (
    Param("k", int, 10, low=1),
    Param("tau", float, 0.05, low=0.0),
    Param("n_iter", int, 100, low=1),
    Param("learning_rate", float, 0.1, low=1e-12),
    Param("jitter", float, 1e-4, low=0.0),
)

_EPS = 1e-12


def neighbor_mask(d_hi: np.ndarray, k: int) -> np.ndarray:
    """Symmetrized union of the directed k-nearest-neighbor relations."""
    ranks = rank_matrix(DistanceMatrix(d_hi)).ranks
    directed = (ranks >= 1) & (ranks <= k)
    return directed | directed.T


def _context(d_hi: np.ndarray, mask: np.ndarray, tau: float):
    near = mask.astype(float)
    far = (~mask).astype(float)
    np.fill_diagonal(far, 0.0)
    return near, far * tau


def _objective(y, d_hi, near, far_tau) -> float:
    d_lo = low_dim_distances(y)
    diff = d_hi - d_lo
    return float(0.5 * ((diff * diff * near).sum() - (far_tau * d_lo).sum()))


def _objective_grad(y, d_hi, near, far_tau) -> tuple[float, np.ndarray]:
    d_lo = low_dim_distances(y)
    diff = d_hi - d_lo
    obj = float(0.5 * ((diff * diff * near).sum() - (far_tau * d_lo).sum()))
    inv = 1.0 / np.maximum(d_lo, _EPS)
    f = (-2.0 * diff * near - far_tau) * inv
    np.fill_diagonal(f, 0.0)
    grad = f.sum(axis=1)[:, None] * y - f @ y
    return obj, grad


def lmds_objective(y, d_hi, mask, tau) -> float:
    """sum_{(i,j) in N, i<j} (D - d)^2  -  tau * sum_{(i,j) not in N, i<j} d."""
    near, far_tau = _context(d_hi, mask, tau)
    return _objective(y, d_hi, near, far_tau)


def lmds_objective_grad(y, d_hi, mask, tau) -> tuple[float, np.ndarray]:
    near, far_tau = _context(d_hi, mask, tau)
    return _objective_grad(y, d_hi, near, far_tau)


def local_mds(points: np.ndarray, params: dict | None = None, seed: int = 0,
              dim: int = 2) -> Embedding:
    p = resolve_params("lmds", SCHEMA, params)
    x = np.asarray(points, dtype=float)
    n = x.shape[0]
    if not 1 <= p["k"] <= n - 1:
        raise ValueError(f"k must be in [1, {n - 1}], got {p['k']}")
    d_hi = pairwise_distances(x).values
    near, far_tau = _context(d_hi, neighbor_mask(d_hi, p["k"]), p["tau"])

    y0 = jittered_pca_init(x, dim, "lmds", seed, p["jitter"])
    y, obj, iterations, converged = line_search_descent(
        y0,
        lambda y: _objective(y, d_hi, near, far_tau),
        lambda y: _objective_grad(y, d_hi, near, far_tau),
        step0=p["learning_rate"],
        max_iter=p["n_iter"],
    )
    y = y - y.mean(axis=0)
    provenance = {
        "algorithm": "lmds",
        "params": p,
        "seed": int(seed),
        "iterations": iterations,
        "objective": obj,
        "converged": converged,
    }
    return Embedding(y, provenance)
