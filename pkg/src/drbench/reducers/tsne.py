"""Exact t-SNE: dense joint probabilities, momentum gradient descent.

No tree approximations; everything is O(n^2), which is fine at benchmark
scale and keeps the KL gradient exactly testable against finite differences.
"""

import numpy as np

from ..geometry import pairwise_distances
from .base import Embedding, Param, pca_project, reducer_rng, resolve_params

SCHEMA = (
    Param("perplexity", float, 30.0),
    Param("learning_rate", float, 200.0, low=1e-6),
    Param("n_iter", int, 300, low=1),
    Param("exaggeration", float, 12.0, low=1.0),
    Param("exaggeration_iter", int, 100, low=0),
    Param("momentum_start", float, 0.5, low=0.0, high=1.0),
    Param("momentum_final", float, 0.8, low=0.0, high=1.0),
    Param("momentum_switch", int, 250, low=0),
    Param("init_scale", float, 1e-4, low=0.0),
)

_EPS = 1e-12


def conditional_bandwidths(d2: np.ndarray, perplexity: float, tol: float = 1e-5,
                           max_iter: int = 128) -> tuple[np.ndarray, np.ndarray]:
    """Per-point Gaussian precisions matched to the target perplexity.

    Bisects beta_i = 1/(2 sigma_i^2), all points in lockstep, until every
    conditional distribution has entropy log(perplexity) within tol.
    Returns (P_conditional, betas); rows of P sum to 1, diagonal is 0.
    """
    n = d2.shape[0]
    target = np.log(perplexity)
    beta = np.ones(n)
    lo = np.zeros(n)
    hi = np.full(n, np.inf)
    p = np.zeros((n, n))
    active = np.arange(n)
    diag = np.arange(n)
    for _ in range(max_iter):
        rows = d2[active] * beta[active, None]
        np.exp(-rows, out=rows)
        rows[np.arange(active.size), active] = 0.0
        totals = rows.sum(axis=1)
        ok = totals > 0
        rows[ok] /= totals[ok, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.where(rows > 0, np.log(rows), 0.0)
        entr = -(rows * logs).sum(axis=1)
        p[active] = rows

        diff = entr - target
        done = np.abs(diff) < tol
        too_flat = diff > 0  # entropy above target -> sharpen the kernel
        idx = active
        lo[idx[too_flat & ~done]] = beta[idx[too_flat & ~done]]
        hi[idx[~too_flat & ~done]] = beta[idx[~too_flat & ~done]]
        grow = too_flat & ~done
        shrink = ~too_flat & ~done
        gi = idx[grow]
        beta[gi] = np.where(np.isinf(hi[gi]), beta[gi] * 2.0, (beta[gi] + hi[gi]) / 2.0)
        si = idx[shrink]
        beta[si] = np.where(lo[si] == 0.0, beta[si] / 2.0, (beta[si] + lo[si]) / 2.0)
        active = idx[~done]
        if active.size == 0:
            break
    if active.size:
        raise ValueError(
            f"perplexity calibration did not converge for point {int(active[0])} "
            f"(perplexity={perplexity})"
        )
    p[diag, diag] = 0.0
    return p, beta


def joint_probabilities(d2: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrized joint P; nonnegative, symmetric, sums to 1."""
    cond, _ = conditional_bandwidths(d2, perplexity)
    n = d2.shape[0]
    return (cond + cond.T) / (2.0 * n)


def _student_kernel(y: np.ndarray) -> np.ndarray:
    sq = np.sum(y**2, axis=1)
    w = sq[:, None] + sq[None, :] - 2.0 * (y @ y.T)
    w += 1.0
    np.reciprocal(w, out=w)
    np.fill_diagonal(w, 0.0)
    return w


def _kl_gradient(y: np.ndarray, p: np.ndarray) -> np.ndarray:
    w = _student_kernel(y)
    pqw = (p - w / max(w.sum(), _EPS)) * w
    return 4.0 * (pqw.sum(axis=1)[:, None] * y - pqw @ y)


def kl_divergence_grad(y: np.ndarray, p: np.ndarray) -> tuple[float, np.ndarray]:
    """KL(P || Q) under the Student-t kernel, with its analytic gradient."""
    w = _student_kernel(y)
    q = w / max(w.sum(), _EPS)
    mask = p > 0
    kl = float((p[mask] * np.log(p[mask] / np.maximum(q[mask], _EPS))).sum())
    pqw = (p - q) * w
    grad = 4.0 * (pqw.sum(axis=1)[:, None] * y - pqw @ y)
    return kl, grad


def tsne_exact(points: np.ndarray, params: dict | None = None, seed: int = 0,
               dim: int = 2) -> Embedding:
    p = resolve_params("tsne", SCHEMA, params)
    x = np.asarray(points, dtype=float)
    n = x.shape[0]
    if n < 4:
        raise ValueError("tsne needs at least 4 points")
    if not 1.0 < p["perplexity"] < n:
        raise ValueError(f"perplexity must be in (1, n={n}), got {p['perplexity']}")

    d2 = pairwise_distances(x).values ** 2
    prob = joint_probabilities(d2, p["perplexity"])

    # PCA directions anchor the layout; the seed perturbs it at init_scale
    y, _ = pca_project(x, dim)
    spread = y.std()
    if spread > 0:
        y = y * (p["init_scale"] / spread)
    y = y + p["init_scale"] * reducer_rng("tsne", seed).standard_normal(y.shape)

    exaggerated = prob * p["exaggeration"]
    velocity = np.zeros_like(y)
    gains = np.ones_like(y)
    for it in range(p["n_iter"]):
        grad = _kl_gradient(y, exaggerated if it < p["exaggeration_iter"] else prob)
        momentum = p["momentum_start"] if it < p["momentum_switch"] else p["momentum_final"]
        same_sign = np.sign(grad) == np.sign(velocity)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        np.maximum(gains, 0.01, out=gains)
        velocity = momentum * velocity - p["learning_rate"] * gains * grad
        y = y + velocity
        y = y - y.mean(axis=0)

    kl, _ = kl_divergence_grad(y, prob)
    provenance = {
        "algorithm": "tsne",
        "params": p,
        "seed": int(seed),
        "iterations": p["n_iter"],
        "objective": kl,
        "converged": True,
    }
    return Embedding(y, provenance)
