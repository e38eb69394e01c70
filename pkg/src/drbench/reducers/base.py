"""Shared machinery for the embedding algorithms.

All iterative reducers start from a PCA projection plus seed-scaled Gaussian
jitter, and their outputs are mean-centered so distance-based metrics and
Procrustes alignment see canonical configurations.  Runs are pure functions of
(points, params, seed): identical inputs give bit-identical embeddings.
"""

from dataclasses import dataclass, field

import numpy as np

_EPS = 1e-12

_ALGO_CODES = {"pca": 100, "sammon": 101, "tsne": 102, "lmds": 103}


@dataclass(frozen=True, eq=False)
class Embedding:
    """n x p output points plus run provenance."""

    points: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class Param:
    name: str
    kind: type
    default: float | int
    low: float | None = None
    high: float | None = None


def resolve_params(algorithm: str, schema: tuple[Param, ...], params: dict | None) -> dict:
    """Fill defaults and validate names, types and bounds."""
    params = dict(params or {})
    by_name = {p.name: p for p in schema}
    unknown = sorted(set(params) - set(by_name))
    if unknown:
        valid = ", ".join(p.name for p in schema) or "(none)"
        raise ValueError(
            f"unknown {algorithm} parameter(s) {', '.join(unknown)}; valid: {valid}"
        )
    resolved = {}
    for p in schema:
        raw = params.get(p.name, p.default)
        try:
            value = p.kind(raw)
        except (TypeError, ValueError):
            raise ValueError(f"{algorithm} parameter {p.name} must be {p.kind.__name__}")
        if p.kind is int and float(raw) != value:
            raise ValueError(f"{algorithm} parameter {p.name} must be an integer")
        if p.low is not None and value < p.low:
            raise ValueError(f"{algorithm} parameter {p.name} must be >= {p.low}")
        if p.high is not None and value > p.high:
            raise ValueError(f"{algorithm} parameter {p.name} must be <= {p.high}")
        resolved[p.name] = value
    return resolved


def reducer_rng(algorithm: str, seed: int) -> np.random.Generator:
    return np.random.default_rng([_ALGO_CODES[algorithm], int(seed)])


def pca_project(points: np.ndarray, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Centered projection onto the top `dim` principal directions.

    Sign convention: each component's largest-magnitude loading is positive.
    Returns (projection, singular values).
    """
    x = np.asarray(points, dtype=float)
    centered = x - x.mean(axis=0)
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[:dim].copy()
    for row in comps:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return centered @ comps.T, s


def jittered_pca_init(points, dim, algorithm, seed, jitter_scale) -> np.ndarray:
    y0, _ = pca_project(points, dim)
    rms = float(np.sqrt(np.mean(y0**2)))
    scale = jitter_scale * (rms if rms > 0 else 1.0)
    return y0 + scale * reducer_rng(algorithm, seed).standard_normal(y0.shape)


def line_search_descent(y0, objective, objective_grad, step0, max_iter, tol=1e-9):
    """Gradient descent with step-halving; only strictly decreasing steps accepted.

    Returns (y, objective, accepted iterations, converged).  `converged` is
    False only when max_iter ran out while meaningful progress was still being
    made.
    """
    y = y0
    obj, grad = objective_grad(y)
    step = float(step0)
    iterations = 0
    converged = False
    for _ in range(max_iter):
        accepted = False
        while step >= 1e-15:
            cand = y - step * grad
            cand_obj = objective(cand)
            if cand_obj < obj:
                rel = (obj - cand_obj) / max(abs(obj), _EPS)
                y = cand
                obj, grad = objective_grad(y)
                step *= 1.5
                iterations += 1
                accepted = True
                if rel < tol:
                    converged = True
                break
            step *= 0.5
        if not accepted:
            converged = True
            break
        if converged:
            break
    return y, obj, iterations, converged


def low_dim_distances(y: np.ndarray) -> np.ndarray:
    """Dense Euclidean distances of the current layout (no scipy round trip)."""
    sq = np.sum(y**2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (y @ y.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(d2)
