"""Linear baseline: principal component projection."""

import numpy as np

from .base import Embedding, pca_project


def pca(points: np.ndarray, dim: int = 2) -> Embedding:
    """Project onto the top `dim` principal directions of the centered data."""
    x = np.asarray(points, dtype=float)
    if not 1 <= dim <= x.shape[1]:
        raise ValueError(f"target dim must be in [1, {x.shape[1]}], got {dim}")
    y, s = pca_project(x, dim)
    residual = float((s[dim:] ** 2).sum())
    provenance = {
        "algorithm": "pca",
        "params": {},
        "seed": None,
        "iterations": 0,
        "objective": residual,
        "converged": True,
    }
    return Embedding(y, provenance)
